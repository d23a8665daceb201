#include "qcausal/rng.hpp"

#include <cmath>

namespace qcausal {

double RngState::next_unit() {
  ++draws_;
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<DrawRecord> RngState::take_log() {
  std::vector<DrawRecord> out;
  out.swap(log_);
  return out;
}

void RngState::record(double value, bool discrete) {
  if (logging_) log_.push_back(DrawRecord{draws_, value, discrete});
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
  return mix64(parent ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

namespace {

std::size_t pick(std::span<const double> weights, double total, RngState& rng) {
  if (weights.size() == 1) {
    rng.record(0.0, true);
    return 0;
  }
  const double u = rng.next_unit() * total;
  double acc = 0.0;
  std::size_t chosen = weights.size() - 1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) {
      chosen = i;
      break;
    }
  }
  // rounding can leave u >= acc at the end; fall back to the last positive weight
  while (weights[chosen] <= 0.0 && chosen > 0) --chosen;
  rng.record(static_cast<double>(chosen), true);
  return chosen;
}

double checked_total(std::span<const double> weights) {
  if (weights.empty()) throw DistributionError("empty value range");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DistributionError("negative or non-finite probability");
    total += w;
  }
  return total;
}

}  // namespace

std::size_t random_draw(std::span<const double> probabilities, RngState& rng) {
  const double total = checked_total(probabilities);
  if (std::abs(total - 1.0) > 1e-9) throw DistributionError("distribution does not sum to 1");
  return pick(probabilities, total, rng);
}

std::size_t random_draw_weighted(std::span<const double> weights, RngState& rng) {
  const double total = checked_total(weights);
  if (!(total > 0.0)) throw DistributionError("weights sum to zero");
  return pick(weights, total, rng);
}

double random_draw(RealInterval range, RngState& rng) {
  if (!(range.hi >= range.lo) || !std::isfinite(range.lo) || !std::isfinite(range.hi))
    throw DistributionError("empty or non-finite interval");
  if (range.hi == range.lo) return range.lo;
  const double v = range.lo + rng.next_unit() * (range.hi - range.lo);
  rng.record(v, false);
  return v;
}

}  // namespace qcausal
