#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qcausal/error.hpp"

namespace qcausal {

struct DrawRecord {
  std::uint64_t sequence = 0;  // draw number within the stream
  double value = 0.0;          // uniform draw, or the chosen index for discrete draws
  bool discrete = false;

  bool operator==(const DrawRecord&) const = default;
};

/// Deterministic generator state: mt19937_64 seeded from a 64-bit seed, with
/// a draw counter and an optional draw log for trace replay.
class RngState {
 public:
  explicit RngState(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draw_count() const noexcept { return draws_; }

  /// Uniform in [0, 1) with 53 bits of resolution. Bit-exact across platforms.
  double next_unit();

  void set_logging(bool on) { logging_ = on; }
  bool logging() const noexcept { return logging_; }
  const std::vector<DrawRecord>& log() const noexcept { return log_; }
  std::vector<DrawRecord> take_log();

  void record(double value, bool discrete);

  bool operator==(const RngState& o) const {
    return seed_ == o.seed_ && draws_ == o.draws_ && engine_ == o.engine_;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
  bool logging_ = false;
  std::vector<DrawRecord> log_;
};

/// splitmix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept;

struct RealInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Draws an index from a discrete distribution. Probabilities must be
/// non-negative and sum to 1 within 1e-9.
std::size_t random_draw(std::span<const double> probabilities, RngState& rng);

/// Draws from `values` with matching `probabilities`.
template <class T>
const T& random_draw(std::span<const T> values, std::span<const double> probabilities, RngState& rng) {
  if (values.size() != probabilities.size()) throw DistributionError("value range and distribution differ in size");
  return values[random_draw(probabilities, rng)];
}

/// Uniform draw in [lo, hi). lo == hi returns lo without consuming a draw.
double random_draw(RealInterval range, RngState& rng);

/// Draws an index with probability weight_i / sum(weights). Weights need not
/// be normalized but must be non-negative with a positive sum.
std::size_t random_draw_weighted(std::span<const double> weights, RngState& rng);

}  // namespace qcausal
