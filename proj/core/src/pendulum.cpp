#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcausal/experiments.hpp"

namespace qcausal {

std::string to_string(PendulumMode m) { return m == PendulumMode::InPhase ? "in-phase" : "anti-phase"; }

PendulumMode pendulum_mode_from_string(const std::string& text) {
  if (text == "in-phase") return PendulumMode::InPhase;
  if (text == "anti-phase") return PendulumMode::AntiPhase;
  throw ConfigError("mode", "expected in-phase or anti-phase, got '" + text + "'");
}

double PendulumConfig::omega_prime() const { return std::sqrt(omega * omega + 2.0 * k / m); }

void PendulumConfig::validate() const {
  if (!(m > 0.0)) throw ConfigError("pendulum.m", "must be positive");
  if (!(omega > 0.0)) throw ConfigError("pendulum.omega", "must be positive");
  if (!(k >= 0.0)) throw ConfigError("pendulum.k", "must be non-negative");
  if (!(std::abs(amplitude) > 0.0)) throw ConfigError("pendulum.amplitude", "must be non-zero");
  if (!(periods > 0.0)) throw ConfigError("pendulum.periods", "must be positive");
  if (steps_per_period == 0) throw ConfigError("pendulum.steps_per_period", "must be at least 1");
  if (stride == 0) throw ConfigError("pendulum.stride", "must be at least 1");
}

std::array<double, 2> pendulum_closed_form(const PendulumConfig& cfg, double t) {
  // L1 (initx_a = initx_b) and L2 (initx_a = -initx_b) share omega'
  const double wp = cfg.omega_prime();
  const double xa = cfg.amplitude * std::cos(wp * t);
  return {xa, cfg.mode == PendulumMode::InPhase ? xa : -xa};
}

PendulumResult run_pendulum(const PendulumConfig& cfg) {
  cfg.validate();
  PendulumResult res;
  res.config = cfg;
  res.omega_prime = cfg.omega_prime();
  res.mode_frequency = cfg.mode == PendulumMode::InPhase ? cfg.omega : res.omega_prime;

  // step from the fastest frequency, span in periods of the selected mode
  res.dt = 2.0 * std::numbers::pi / res.omega_prime / static_cast<double>(cfg.steps_per_period);
  if (!(res.omega_prime * res.dt < 2.0)) throw ConfigError("pendulum.dt", "leapfrog unstable: omega' dt >= 2");
  const double span = cfg.periods * 2.0 * std::numbers::pi / res.mode_frequency;
  res.steps = static_cast<std::uint64_t>(std::ceil(span / res.dt));

  const double c = cfg.amplitude;
  const double w2 = cfg.omega * cfg.omega;
  const double km = cfg.k / cfg.m;
  double xa = c;
  double xb = cfg.mode == PendulumMode::InPhase ? c : -c;
  double va = 0.0;
  double vb = 0.0;
  const auto acc = [&](double self, double other) { return -w2 * self - km * (self - other); };
  double aa = acc(xa, xb);
  double ab = acc(xb, xa);

  const auto sample = [&](std::uint64_t n) {
    const double t = static_cast<double>(n) * res.dt;
    const auto closed = pendulum_closed_form(cfg, t);
    const double mode_a = c * std::cos(res.mode_frequency * t);
    const double mode_b = cfg.mode == PendulumMode::InPhase ? mode_a : -mode_a;
    res.max_dev_local_mode =
        std::max({res.max_dev_local_mode, std::abs(xa - mode_a) / std::abs(c), std::abs(xb - mode_b) / std::abs(c)});
    res.max_dev_closed_mode =
        std::max({res.max_dev_closed_mode, std::abs(closed[0] - mode_a) / std::abs(c), std::abs(closed[1] - mode_b) / std::abs(c)});
    if (n % cfg.stride == 0 || n == res.steps)
      res.samples.push_back(PendulumSample{t, closed[0], closed[1], xa, xb, mode_a, mode_b});
  };

  sample(0);
  for (std::uint64_t n = 1; n <= res.steps; ++n) {
    // velocity Verlet: each pendulum reads only itself and the spring end it is attached to
    va += 0.5 * res.dt * aa;
    vb += 0.5 * res.dt * ab;
    xa += res.dt * va;
    xb += res.dt * vb;
    aa = acc(xa, xb);
    ab = acc(xb, xa);
    va += 0.5 * res.dt * aa;
    vb += 0.5 * res.dt * ab;
    sample(n);
  }
  return res;
}

}  // namespace qcausal
