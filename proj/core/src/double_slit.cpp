#include <algorithm>
#include <cmath>
#include <numbers>

#include "parallel.hpp"
#include "qcausal/experiments.hpp"
#include "qcausal/lab.hpp"

namespace qcausal {

using namespace slit_lab;

double DoubleSlitGeometry::path_length(int branch, int y) const {
  const double slit = (branch == 0 ? -0.5 : 0.5) * slit_distance;
  const double dy = (y - centre()) * cell_size - slit;
  return std::hypot(screen_distance, dy);
}

void DoubleSlitGeometry::validate() const {
  if (screen_cells < 3) throw ConfigError("geometry.screen_cells", "must be at least 3");
  if (slit_separation < 2 || slit_separation % 2 != 0 || slit_separation >= screen_cells)
    throw ConfigError("geometry.slit_separation", "must be even, positive and smaller than the screen");
  if (!(slit_distance > 0.0)) throw ConfigError("geometry.slit_distance", "must be positive");
  if (!(screen_distance > 0.0)) throw ConfigError("geometry.screen_distance", "must be positive");
  if (!(wavelength > 0.0)) throw ConfigError("geometry.wavelength", "must be positive");
  if (!(cell_size > 0.0)) throw ConfigError("geometry.cell_size", "must be positive");
  if (std::norm(branch_amplitudes[0]) + std::norm(branch_amplitudes[1]) <= 0.0)
    throw ConfigError("geometry.branch_amplitudes", "must not both be zero");
}

std::vector<double> ScreenHistogram::frequencies() const {
  std::vector<double> f(counts.size(), 0.0);
  if (trials == 0) return f;
  for (std::size_t i = 0; i < counts.size(); ++i) f[i] = static_cast<double>(counts[i]) / static_cast<double>(trials);
  return f;
}

double ScreenHistogram::visibility(std::size_t smoothing) const {
  const auto f = frequencies();
  const std::size_t w = std::max<std::size_t>(1, smoothing);
  if (f.size() < w) return 0.0;
  double hi = -INFINITY;
  double lo = INFINITY;
  for (std::size_t i = 0; i + w <= f.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = i; j < i + w; ++j) s += f[j];
    s /= static_cast<double>(w);
    hi = std::max(hi, s);
    lo = std::min(lo, s);
  }
  return hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
}

double ScreenHistogram::tv_distance(const ScreenHistogram& other) const {
  const auto a = frequencies();
  const auto b = other.frequencies();
  double tv = 0.0;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i)
    tv += std::abs((i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0));
  return 0.5 * tv;
}

ScreenHistogram& ScreenHistogram::operator+=(const ScreenHistogram& o) {
  if (counts.size() < o.counts.size()) counts.resize(o.counts.size(), 0);
  for (std::size_t i = 0; i < o.counts.size(); ++i) counts[i] += o.counts[i];
  trials += o.trials;
  return *this;
}

SystemState double_slit_initial_state(const DoubleSlitGeometry& g, bool marker) {
  g.validate();
  SystemState s(Space(2, {kScreenColumn + 1, g.screen_cells, 1}, 1.0), 1.0, 0);
  const auto slits = g.slit_cells();

  std::vector<SpacePoint> screen;
  for (int y = 0; y < g.screen_cells; ++y) screen.emplace_back(kScreenColumn, y);
  s.add(lab::make_particle(s.allocate_id(), lab::kDetector, 1000.0, std::move(screen)));

  auto electron = lab::make_particle(s.allocate_id(), lab::kElectron, 1.0, {SpacePoint(kSlitColumn, slits[0])},
                                     {1, 0, 0});
  Path upper = electron.paths.front();
  upper.states.front().spacepoints = {SpacePoint(kSlitColumn, slits[1])};
  electron.paths.front().amplitude = g.branch_amplitudes[0];
  upper.amplitude = g.branch_amplitudes[1];
  electron.paths.push_back(std::move(upper));
  electron = normalize_amplitudes(std::move(electron));
  s.add(std::move(electron));

  if (marker)
    s.add(lab::make_particle(s.allocate_id(), lab::kMarker, 1000.0,
                             {SpacePoint(kSlitColumn, slits[0]), SpacePoint(kSlitColumn, slits[1])}));
  return s;
}

void diffract(QuantumObject& obj, const Space& space, const DoubleSlitGeometry& g) {
  const auto slits = g.slit_cells();
  const int n = space.extent(1);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  const double k = 2.0 * std::numbers::pi / g.wavelength;
  bool changed = false;
  for (std::size_t i = 0; i < obj.particles.size(); ++i) {
    if (obj.particles[i].type != lab::kElectron) continue;
    std::vector<Path> next;
    next.reserve(obj.paths.size() * static_cast<std::size_t>(n));
    for (auto& path : obj.paths) {
      const auto& sp = path.states[i].spacepoints;
      const bool at_slit = sp.size() == 1 && sp.front()[0] == kDiffractionColumn &&
                           (sp.front()[1] == slits[0] || sp.front()[1] == slits[1]);
      if (!at_slit) {
        next.push_back(std::move(path));
        continue;
      }
      changed = true;
      const int branch = sp.front()[1] == slits[0] ? 0 : 1;
      for (int y = 0; y < n; ++y) {
        Path q = path;
        q.states[i].spacepoints = {SpacePoint(kDiffractionColumn, y)};
        q.amplitude *= std::polar(norm, k * g.path_length(branch, y));
        next.push_back(std::move(q));
      }
    }
    obj.paths = std::move(next);
  }
  if (!changed) return;
  obj = normalize_amplitudes(merge_identical_paths(std::move(obj)));
}

std::shared_ptr<const World> double_slit_world(const DoubleSlitGeometry& g) {
  g.validate();
  auto w = std::make_shared<World>();
  w->rules.push_back({lab::kElectron, lab::kMarker, lab::mark_outcome});
  w->rules.push_back({lab::kElectron, lab::kDetector, lab::absorb_outcome});
  w->update = [g](QuantumObject& obj, const Space& space, std::span<const FieldGrid>) {
    lab::propagate(obj, space);
    diffract(obj, space, g);
  };
  w->termination = {"no-electrons", [](const SystemState& s) { return !lab::any_particle_of_type(s, lab::kElectron); }};
  return w;
}

namespace {

std::optional<int> screen_hit(std::span<const InteractionRecord> records) {
  for (const auto& r : records) {
    const bool hit = (r.type_a == lab::kElectron && r.type_b == lab::kDetector) ||
                     (r.type_a == lab::kDetector && r.type_b == lab::kElectron);
    if (hit) return r.position[1];
  }
  return std::nullopt;
}

struct SlitRunner {
  SystemState initial;
  std::shared_ptr<const World> world;
  std::vector<Law> laws;

  std::optional<int> operator()(std::uint64_t seed, const TrialOptions& opt) const {
    if (opt.runtime == Runtime::Refined) {
      auto res = refined::run_refined(initial, world, refined::RefinedConfig{seed, opt.scheduler, kMaxSteps});
      return screen_hit(res.records);
    }
    SystemState s = initial;
    run(s, EngineConfig{1.0, kMaxSteps, world->termination, seed, false}, laws);
    return screen_hit(s.interactions);
  }
};

SlitRunner make_runner(const DoubleSlitConfig& cfg) {
  auto world = double_slit_world(cfg.geometry);
  return SlitRunner{double_slit_initial_state(cfg.geometry, cfg.marker), world, centralized_laws(world)};
}

}  // namespace

std::optional<int> run_double_slit_trial(const DoubleSlitConfig& cfg, std::uint64_t seed) {
  return make_runner(cfg)(seed, cfg.run);
}

ScreenHistogram run_double_slit(const DoubleSlitConfig& cfg) {
  if (cfg.run.trials == 0) throw ConfigError("trials", "must be at least 1");
  const auto runner = make_runner(cfg);
  ScreenHistogram init;
  init.counts.assign(static_cast<std::size_t>(cfg.geometry.screen_cells), 0);
  return detail::parallel_trials(cfg.run.trials, cfg.run.threads, init, [&](std::uint64_t i, ScreenHistogram& acc) {
    const auto y = runner(derive_seed(cfg.run.seed, i), cfg.run);
    if (!y) throw InvariantError("double-slit trial ended without a screen hit");
    ++acc.counts[static_cast<std::size_t>(*y)];
    ++acc.trials;
  });
}

}  // namespace qcausal
