#include "qcausal/wave.hpp"

#include <algorithm>
#include <cmath>

#include "qcausal/error.hpp"

namespace qcausal::wave {

std::string to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "fixed-zero"; }

Boundary boundary_from_string(const std::string& text) {
  if (text == "periodic") return Boundary::Periodic;
  if (text == "fixed-zero" || text == "fixed") return Boundary::FixedZero;
  throw ConfigError("boundary", "expected periodic or fixed-zero, got '" + text + "'");
}

void WaveGrid::validate() const {
  if (psi_now.size() < 3) throw ConfigError("wave.cells", "need at least 3 cells");
  if (psi_prev.size() != psi_now.size()) throw ConfigError("wave.psi_prev", "length differs from psi");
  if (!(delta_x > 0.0)) throw ConfigError("wave.dx", "must be positive");
  if (!(delta_t > 0.0)) throw ConfigError("wave.dt", "must be positive");
  if (!(v >= 0.0)) throw ConfigError("wave.v", "must be non-negative");
  if (courant() > 1.0 + 1e-12) throw ConfigError("wave.courant", "v dt / dx must not exceed 1");
}

WaveGrid make_grid(std::vector<double> psi, double v, double delta_x, double delta_t, Boundary boundary) {
  WaveGrid g;
  g.psi_prev = psi;
  g.psi_now = std::move(psi);
  g.v = v;
  g.delta_x = delta_x;
  g.delta_t = delta_t;
  g.boundary = boundary;
  g.validate();
  return g;
}

double periodic_profile(const std::function<double(double)>& f, double x, double length) {
  // nearest images are enough for profiles much narrower than the ring
  return f(x) + f(x - length) + f(x + length);
}

WaveGrid make_travelling(const std::function<double(double)>& profile, std::size_t cells, double v, double delta_x,
                         double delta_t, Boundary boundary) {
  const double length = static_cast<double>(cells) * delta_x;
  const auto f = [&](double x) {
    return boundary == Boundary::Periodic ? periodic_profile(profile, x, length) : profile(x);
  };
  std::vector<double> now(cells);
  std::vector<double> prev(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double x = static_cast<double>(i) * delta_x;
    now[i] = f(x);
    prev[i] = f(x + v * delta_t);
  }
  auto g = make_grid(std::move(now), v, delta_x, delta_t, boundary);
  g.psi_prev = std::move(prev);
  return g;
}

std::function<double(double)> gaussian(double centre, double width) {
  return [centre, width](double x) {
    const double u = (x - centre) / width;
    return std::exp(-0.5 * u * u);
  };
}

WaveGrid wave_step(const WaveGrid& g, const AccessObserver& observer) {
  const std::size_t n = g.size();
  WaveGrid next = g;
  const double dx2 = g.delta_x * g.delta_x;
  const double dt2 = g.delta_t * g.delta_t;
  const double v2 = g.v * g.v;
  const bool periodic = g.boundary == Boundary::Periodic;

  for (std::size_t i = 0; i < n; ++i) {
    if (!periodic && (i == 0 || i == n - 1)) {
      next.psi_now[i] = 0.0;
      continue;
    }
    const std::size_t l = i == 0 ? n - 1 : i - 1;
    const std::size_t r = i == n - 1 ? 0 : i + 1;
    if (observer) {
      observer(i, l);
      observer(i, i);
      observer(i, r);
    }
    const double d2x = (g.psi_now[r] - 2.0 * g.psi_now[i] + g.psi_now[l]) / dx2;
    const double d2t = v2 * d2x;
    next.psi_now[i] = d2t * dt2 + 2.0 * g.psi_now[i] - g.psi_prev[i];
  }
  next.psi_prev = g.psi_now;
  return next;
}

std::vector<double> first_difference(const WaveGrid& g) {
  const std::size_t n = g.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool edge = i == 0 || i == n - 1;
    if (edge && g.boundary == Boundary::FixedZero) continue;
    const std::size_t l = i == 0 ? n - 1 : i - 1;
    const std::size_t r = i == n - 1 ? 0 : i + 1;
    d[i] = (g.psi_now[r] - g.psi_now[l]) / (2.0 * g.delta_x);
  }
  return d;
}

WaveTrajectory run_wave(WaveGrid init, std::size_t steps, std::size_t stride) {
  init.validate();
  if (stride == 0) throw ConfigError("wave.stride", "must be at least 1");
  WaveTrajectory traj;
  const auto snap = [&](std::size_t k, const WaveGrid& g) {
    traj.steps.push_back(k);
    traj.times.push_back(static_cast<double>(k) * g.delta_t);
    traj.snapshots.push_back(g.psi_now);
  };
  snap(0, init);
  for (std::size_t k = 1; k <= steps; ++k) {
    init = wave_step(init);
    if (k % stride == 0 || k == steps) snap(k, init);
  }
  traj.final = std::move(init);
  return traj;
}

ErrorNorms compare_analytic(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("compare_analytic: shape mismatch");
  ErrorNorms e;
  if (a.empty()) return e;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    sum += d * d;
    e.max = std::max(e.max, d);
  }
  e.l2 = std::sqrt(sum / static_cast<double>(a.size()));
  return e;
}

ErrorNorms compare_analytic(const WaveTrajectory& traj, const std::function<double(double, double)>& analytic,
                            double delta_x) {
  ErrorNorms worst;
  std::vector<double> ref;
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const auto& snap = traj.snapshots[s];
    ref.resize(snap.size());
    for (std::size_t i = 0; i < snap.size(); ++i) ref[i] = analytic(static_cast<double>(i) * delta_x, traj.times[s]);
    const auto e = compare_analytic(snap, ref);
    worst.l2 = std::max(worst.l2, e.l2);
    worst.max = std::max(worst.max, e.max);
  }
  return worst;
}

double energy(const WaveGrid& g) {
  const std::size_t n = g.size();
  const bool periodic = g.boundary == Boundary::Periodic;
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = (g.psi_now[i] - g.psi_prev[i]) / g.delta_t;
    e += dt * dt;
    if (i + 1 < n || periodic) {
      const double dx = (g.psi_now[(i + 1) % n] - g.psi_now[i]) / g.delta_x;
      e += g.v * g.v * dx * dx;
    }
  }
  return e;
}

SystemState wave_state(const WaveGrid& grid, std::uint64_t seed) {
  grid.validate();
  SystemState s(Space(1, {static_cast<int>(grid.size()), 1, 1}, grid.delta_x), grid.delta_t, seed);
  FieldGrid now{kPsiField, {}};
  FieldGrid prev{kPsiPrevField, {}};
  now.values.assign(grid.psi_now.begin(), grid.psi_now.end());
  prev.values.assign(grid.psi_prev.begin(), grid.psi_prev.end());
  s.fields = {std::move(now), std::move(prev)};
  return s;
}

WaveGrid grid_from_state(const SystemState& state, double v, Boundary boundary) {
  const auto* now = state.field(kPsiField);
  const auto* prev = state.field(kPsiPrevField);
  if (!now || !prev) throw InvariantError("state holds no wave fields");
  WaveGrid g;
  for (const auto& c : now->values) g.psi_now.push_back(c.real());
  for (const auto& c : prev->values) g.psi_prev.push_back(c.real());
  g.v = v;
  g.delta_x = state.space.delta_x();
  g.delta_t = state.delta_t;
  g.boundary = boundary;
  return g;
}

std::vector<Law> wave_laws(double v, Boundary boundary) {
  Law law;
  law.id = "wave-ca-update";
  law.transition = [v, boundary](SystemState& s) {
    const auto next = wave_step(grid_from_state(s, v, boundary));
    for (auto& f : s.fields) {
      const auto& src = f.id == kPsiField ? next.psi_now : next.psi_prev;
      if (f.id != kPsiField && f.id != kPsiPrevField) continue;
      for (std::size_t i = 0; i < src.size(); ++i) f.values[i] = src[i];
    }
  };
  law.footprint.reads = {CellAt{{-1}}, CellAt{{0}}, CellAt{{1}}};
  law.footprint.writes = {CellAt{{0}}};
  return {std::move(law)};
}

}  // namespace qcausal::wave
