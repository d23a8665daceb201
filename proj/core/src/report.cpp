#include "qcausal/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace qcausal::report {

namespace {

using Json = nlohmann::ordered_json;

Json header(const char* kind) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

Json run_json(const TrialOptions& run) {
  Json j;
  j["trials"] = run.trials;
  j["seed"] = run.seed;
  j["trial_seeds"] = "derive_seed(seed, trial_index)";
  j["runtime"] = to_string(run.runtime);
  if (run.runtime == Runtime::Refined) j["scheduler"] = refined::to_string(run.scheduler);
  return j;
}

Json stats_json(const JointStats& s) {
  Json j;
  j["trials"] = s.trials;
  j["counts"] = {{"up_up", s.n(true, true)},
                 {"up_down", s.n(true, false)},
                 {"down_up", s.n(false, true)},
                 {"down_down", s.n(false, false)}};
  j["differing"] = s.differing();
  j["p_same"] = s.p_same();
  j["correlation"] = s.correlation();
  j["correlation_stderr"] = s.correlation_stderr();
  j["marginal_a_up"] = s.marginal_a_up();
  j["marginal_b_up"] = s.marginal_b_up();
  return j;
}

std::ostringstream csv_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Document bell(const BellConfig& cfg, const JointStats& stats) {
  auto j = header("bell");
  j["angle_a"] = cfg.angle_a;
  j["angle_b"] = cfg.angle_b;
  j["policy"] = cfg.policy == SpinPolicy::Uniform ? "uniform" : "fixed";
  if (cfg.policy == SpinPolicy::Fixed) j["fixed_spindir"] = cfg.fixed_spindir;
  j["run"] = run_json(cfg.run);
  j["stats"] = stats_json(stats);

  auto os = csv_stream();
  os << "angle_a,angle_b,outcome_a,outcome_b,count,frequency\n";
  for (bool a : {true, false})
    for (bool b : {true, false})
      os << cfg.angle_a << ',' << cfg.angle_b << ',' << (a ? "up" : "down") << ',' << (b ? "up" : "down") << ','
         << stats.n(a, b) << ',' << stats.frequency(a, b) << '\n';
  return {j.dump(2) + "\n", os.str()};
}

Document bell_scan(const BellScan& scan, const TrialOptions& run) {
  auto j = header("bell-scan");
  j["angles"] = scan.angles;
  j["form"] = to_string(scan.form);
  j["run"] = run_json(run);
  j["pair_seeds"] = "derive_seed(seed, pair_index)";
  const std::array<std::pair<const char*, const JointStats*>, 3> pairs{
      {{"ab", &scan.ab}, {"ac", &scan.ac}, {"bc", &scan.bc}}};
  const std::array<std::array<double, 2>, 3> angles{{{scan.angles[0], scan.angles[1]},
                                                     {scan.angles[0], scan.angles[2]},
                                                     {scan.angles[1], scan.angles[2]}}};
  Json pj;
  auto os = csv_stream();
  os << "pair,angle_a,angle_b,trials,p_same,correlation,stderr\n";
  for (std::size_t i = 0; i < 3; ++i) {
    auto s = stats_json(*pairs[i].second);
    s["angle_a"] = angles[i][0];
    s["angle_b"] = angles[i][1];
    pj[pairs[i].first] = std::move(s);
    const auto& st = *pairs[i].second;
    os << pairs[i].first << ',' << angles[i][0] << ',' << angles[i][1] << ',' << st.trials << ',' << st.p_same()
       << ',' << st.correlation() << ',' << st.correlation_stderr() << '\n';
  }
  j["pairs"] = std::move(pj);
  j["margin"] = scan.margin;
  j["violated"] = scan.margin < 0.0;
  return {j.dump(2) + "\n", os.str()};
}

Document lhv(const LhvResult& r, double model_margin) {
  auto j = header("lhv");
  j["angles"] = r.angles;
  j["form"] = to_string(r.form);
  j["strategies"] = r.strategies.size();
  j["admissible"] = r.admissible_count;
  j["classical_max"] = r.classical_max;
  j["classical_margin"] = r.classical_margin();
  j["unconstrained_max"] = r.unconstrained_max;
  j["model_margin"] = model_margin;

  auto os = csv_stream();
  os << "strategy,a1,b1,c1,a2,b2,c2,admissible,functional\n";
  for (std::size_t i = 0; i < r.strategies.size(); ++i) {
    const auto& s = r.strategies[i];
    os << i;
    for (int v : s.wing1) os << ',' << v;
    for (int v : s.wing2) os << ',' << v;
    os << ',' << (s.admissible ? 1 : 0) << ',' << s.functional << '\n';
  }
  return {j.dump(2) + "\n", os.str()};
}

Document double_slit(const DoubleSlitConfig& cfg, const ScreenHistogram& h) {
  auto j = header("double-slit");
  j["marker"] = cfg.marker;
  const auto& g = cfg.geometry;
  j["geometry"] = {{"screen_cells", g.screen_cells},
                   {"slit_separation", g.slit_separation},
                   {"slit_distance", g.slit_distance},
                   {"screen_distance", g.screen_distance},
                   {"wavelength", g.wavelength},
                   {"cell_size", g.cell_size}};
  j["run"] = run_json(cfg.run);
  j["counts"] = h.counts;
  j["visibility"] = h.visibility(cfg.smoothing);
  j["smoothing"] = cfg.smoothing;

  auto os = csv_stream();
  os << "cell,count,frequency\n";
  const auto f = h.frequencies();
  for (std::size_t y = 0; y < h.counts.size(); ++y) os << y << ',' << h.counts[y] << ',' << f[y] << '\n';
  return {j.dump(2) + "\n", os.str()};
}

Document wave(const WaveSummary& s, const wave::WaveTrajectory& traj) {
  auto j = header("wave");
  j["cells"] = s.cells;
  j["steps"] = s.steps;
  j["courant"] = s.courant;
  j["init"] = s.init;
  j["boundary"] = wave::to_string(s.boundary);
  j["energy_initial"] = s.energy_initial;
  j["energy_final"] = s.energy_final;
  j["energy_drift"] = s.energy_initial != 0.0 ? std::abs(s.energy_final - s.energy_initial) / s.energy_initial : 0.0;
  j["error_vs_translation"] = {{"l2", s.error.l2}, {"max", s.error.max}};
  j["snapshots"] = traj.snapshots.size();

  auto os = csv_stream();
  os << "t,cell,value\n";
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
    for (std::size_t i = 0; i < traj.snapshots[k].size(); ++i)
      os << traj.times[k] << ',' << i << ',' << traj.snapshots[k][i] << '\n';
  return {j.dump(2) + "\n", os.str()};
}

Document pendulum(const PendulumResult& r) {
  auto j = header("pendulum");
  const auto& c = r.config;
  j["mode"] = to_string(c.mode);
  j["m"] = c.m;
  j["omega"] = c.omega;
  j["k"] = c.k;
  j["amplitude"] = c.amplitude;
  j["periods"] = c.periods;
  j["steps_per_period"] = c.steps_per_period;
  j["dt"] = r.dt;
  j["steps"] = r.steps;
  j["omega_prime"] = r.omega_prime;
  j["mode_frequency"] = r.mode_frequency;
  j["max_rel_dev_local_vs_mode"] = r.max_dev_local_mode;
  j["max_rel_dev_closed_vs_mode"] = r.max_dev_closed_mode;

  auto os = csv_stream();
  os << "t,xa_closed,xb_closed,xa_local,xb_local,xa_mode,xb_mode\n";
  for (const auto& s : r.samples)
    os << s.t << ',' << s.xa_closed << ',' << s.xb_closed << ',' << s.xa_local << ',' << s.xb_local << ','
       << s.xa_mode << ',' << s.xb_mode << '\n';
  return {j.dump(2) + "\n", os.str()};
}

Document analyze(const locality::ModelReport& r) {
  auto os = csv_stream();
  os << "law,class,offender,reason\n";
  for (const auto& l : r.laws) {
    if (l.offenders.empty()) os << csv_escape(l.law) << ',' << locality::to_string(l.cls) << ",,\n";
    for (std::size_t i = 0; i < l.offenders.size(); ++i)
      os << csv_escape(l.law) << ',' << locality::to_string(l.cls) << ',' << csv_escape(l.offenders[i]) << ','
         << csv_escape(l.reasons[i]) << '\n';
  }
  return {locality::report_json(r) + "\n", os.str()};
}

}  // namespace qcausal::report
