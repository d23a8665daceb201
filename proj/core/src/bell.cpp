#include <cmath>

#include "qcausal/experiments.hpp"

namespace qcausal {

std::string to_string(BellForm f) { return f == BellForm::Identical ? "identical" : "anticorrelated"; }

BellForm bell_form_from_string(const std::string& text) {
  if (text == "identical") return BellForm::Identical;
  if (text == "anticorrelated") return BellForm::Anticorrelated;
  throw ConfigError("form", "expected identical or anticorrelated, got '" + text + "'");
}

double evaluate_bell(double p_ab, double p_ac, double p_bc, BellForm form) {
  const double bound = form == BellForm::Identical ? 1.0 - p_bc : 1.0 + p_bc;
  return bound - std::abs(p_ab - p_ac);
}

BellScan run_bell_scan(std::array<double, 3> angles, BellForm form, SpinPolicy policy, const TrialOptions& run) {
  BellScan scan;
  scan.angles = angles;
  scan.form = form;
  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  std::array<JointStats*, 3> out{&scan.ab, &scan.ac, &scan.bc};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    BellConfig cfg;
    cfg.angle_a = angles[static_cast<std::size_t>(pairs[i].first)];
    cfg.angle_b = angles[static_cast<std::size_t>(pairs[i].second)];
    cfg.policy = policy;
    cfg.run = run;
    cfg.run.seed = derive_seed(run.seed, i);
    *out[i] = run_bell_experiment(cfg);
  }
  scan.margin = evaluate_bell(scan.ab.correlation(), scan.ac.correlation(), scan.bc.correlation(), form);
  return scan;
}

LhvResult lhv_oracle(std::array<double, 3> angles, BellForm form) {
  LhvResult res;
  res.form = form;
  res.angles = angles;
  res.strategies.reserve(64);
  res.classical_max = -INFINITY;
  res.unconstrained_max = -INFINITY;
  for (unsigned bits = 0; bits < 64; ++bits) {
    LhvStrategy s;
    for (std::size_t k = 0; k < 3; ++k) {
      s.wing1[k] = (bits >> k) & 1u ? -1 : 1;
      s.wing2[k] = (bits >> (k + 3)) & 1u ? -1 : 1;
    }
    // deterministic correlation E(x, y) = A(x) B(y)
    const auto e = [&](std::size_t x, std::size_t y) { return static_cast<double>(s.wing1[x] * s.wing2[y]); };
    const double sign = form == BellForm::Identical ? -1.0 : 1.0;
    s.functional = std::abs(e(0, 1) - e(0, 2)) - (1.0 + sign * e(1, 2));
    s.admissible = true;
    for (std::size_t k = 0; k < 3; ++k)
      s.admissible = s.admissible && (form == BellForm::Identical ? s.wing1[k] == s.wing2[k] : s.wing1[k] == -s.wing2[k]);
    if (s.admissible) {
      ++res.admissible_count;
      res.classical_max = std::max(res.classical_max, s.functional);
    }
    res.unconstrained_max = std::max(res.unconstrained_max, s.functional);
    res.strategies.push_back(s);
  }
  return res;
}

}  // namespace qcausal
