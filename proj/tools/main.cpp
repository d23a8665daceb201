#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcausal/config.hpp"
#include "qcausal/engine.hpp"
#include "qcausal/experiments.hpp"
#include "qcausal/locality.hpp"
#include "qcausal/report.hpp"
#include "qcausal/wave.hpp"
#include "qcausal/world.hpp"

namespace fs = std::filesystem;
using namespace qcausal;

namespace {

enum Exit { kOk = 0, kConfig = 1, kInvariant = 2 };

struct Output {
  std::string dir;
  std::string name;  // file stem; defaults to the subcommand

  fs::path path(const std::string& stem, const std::string& ext) const {
    return fs::path(dir) / ((name.empty() ? stem : name) + ext);
  }
};

void write_file(const fs::path& p, const std::string& text) {
  if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("--out", "cannot write '" + p.string() + "'");
  out << text;
}

void emit(const Output& out, const std::string& stem, const report::Document& doc) {
  const auto json = out.path(stem, ".json");
  const auto csv = out.path(stem, ".csv");
  write_file(json, doc.json);
  write_file(csv, doc.csv);
  std::cout << "wrote " << json.string() << " and " << csv.string() << "\n";
}

std::array<double, 3> parse_angles(const std::string& text) {
  std::array<double, 3> a{};
  std::stringstream ss(text);
  std::string item;
  std::size_t n = 0;
  while (std::getline(ss, item, ',')) {
    if (n == 3) throw ConfigError("--angles", "expected exactly three angles a,b,c");
    try {
      std::size_t used = 0;
      a[n] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--angles", "'" + item + "' is not a number");
    }
    ++n;
  }
  if (n != 3) throw ConfigError("--angles", "expected exactly three angles a,b,c");
  return a;
}

SpinPolicy policy_from_string(const std::string& s) {
  if (s == "uniform") return SpinPolicy::Uniform;
  if (s == "fixed") return SpinPolicy::Fixed;
  throw ConfigError("--policy", "expected uniform or fixed");
}

struct RunFlags {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  std::string runtime = "centralized";
  std::string scheduler = "round-robin";
  unsigned threads = 0;

  void add(CLI::App* app) {
    app->add_option("--trials", trials, "Number of Monte Carlo trials")->capture_default_str();
    app->add_option("--seed", seed, "Master seed; trial i uses derive_seed(seed, i)")->capture_default_str();
    app->add_option("--runtime", runtime, "centralized | refined")->capture_default_str();
    app->add_option("--scheduler", scheduler, "Refined scheduler: round-robin | randomized")->capture_default_str();
    app->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  }

  TrialOptions options() const {
    if (trials == 0) throw ConfigError("--trials", "must be at least 1");
    return TrialOptions{trials, seed, runtime_from_string(runtime), refined::scheduler_mode_from_string(scheduler),
                        threads};
  }
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

// bell ------------------------------------------------------------------------

struct BellFlags {
  double angle_a = 0.0;
  double angle_b = 0.0;
  std::string angles;
  std::string form = "identical";
  std::string policy = "uniform";
  double spindir = 0.0;
  RunFlags run;
};

int cmd_bell(const BellFlags& f, const Output& out) {
  const auto run = f.run.options();
  const auto policy = policy_from_string(f.policy);
  if (!f.angles.empty()) {
    const auto angles = parse_angles(f.angles);
    const auto form = bell_form_from_string(f.form);
    const auto scan = run_bell_scan(angles, form, policy, run);
    std::cout << "bell scan at (" << angles[0] << ", " << angles[1] << ", " << angles[2] << "), " << to_string(form)
              << " form, " << run.trials << " trials per pair\n"
              << "  E(a,b) = " << fmt(scan.ab.correlation()) << "  E(a,c) = " << fmt(scan.ac.correlation())
              << "  E(b,c) = " << fmt(scan.bc.correlation()) << "\n"
              << "  margin = " << fmt(scan.margin) << (scan.margin < 0 ? "  (violated)" : "  (satisfied)") << "\n";
    emit(out, "bell-scan", report::bell_scan(scan, run));
    return kOk;
  }
  BellConfig cfg{f.angle_a, f.angle_b, policy, f.spindir, run};
  const auto stats = run_bell_experiment(cfg);
  std::cout << "bell a = " << cfg.angle_a << ", b = " << cfg.angle_b << ", " << stats.trials << " trials ("
            << to_string(run.runtime) << ")\n"
            << "  up/up " << stats.n(true, true) << "  up/down " << stats.n(true, false) << "  down/up "
            << stats.n(false, true) << "  down/down " << stats.n(false, false) << "\n"
            << "  E = " << fmt(stats.correlation()) << " +- " << fmt(stats.correlation_stderr())
            << "  differing = " << stats.differing() << "\n";
  emit(out, "bell", report::bell(cfg, stats));
  return kOk;
}

// lhv -------------------------------------------------------------------------

int cmd_lhv(const std::string& angles_text, const std::string& form_text, const RunFlags& flags, const Output& out) {
  const auto angles = parse_angles(angles_text);
  const auto form = bell_form_from_string(form_text);
  const auto lhv = lhv_oracle(angles, form);
  const auto scan = run_bell_scan(angles, form, SpinPolicy::Uniform, flags.options());
  std::cout << "lhv oracle at (" << angles[0] << ", " << angles[1] << ", " << angles[2] << "), " << to_string(form)
            << " form\n"
            << "  strategies " << lhv.strategies.size() << ", admissible " << lhv.admissible_count << "\n"
            << "  classical max functional = " << fmt(lhv.classical_max)
            << "  (classical margin " << fmt(lhv.classical_margin()) << ")\n"
            << "  model margin (" << flags.trials << " trials per pair) = " << fmt(scan.margin) << "\n";
  emit(out, "lhv", report::lhv(lhv, scan.margin));
  return kOk;
}

// doubleslit ------------------------------------------------------------------

int cmd_doubleslit(const std::string& marker, std::size_t smoothing, const RunFlags& flags, const Output& out) {
  DoubleSlitConfig cfg;
  if (marker == "on")
    cfg.marker = true;
  else if (marker != "off")
    throw ConfigError("--marker", "expected on or off");
  if (smoothing == 0) throw ConfigError("--smoothing", "must be at least 1");
  cfg.smoothing = smoothing;
  cfg.run = flags.options();
  const auto h = run_double_slit(cfg);
  std::cout << "double slit, marker " << marker << ", " << h.trials << " trials\n  screen:";
  for (auto c : h.counts) std::cout << ' ' << c;
  std::cout << "\n  visibility = " << fmt(h.visibility(cfg.smoothing)) << "\n";
  emit(out, "doubleslit", report::double_slit(cfg, h));
  return kOk;
}

// wave ------------------------------------------------------------------------

struct WaveFlags {
  std::size_t cells = 200;
  std::size_t steps = 200;
  double courant = 1.0;
  std::string init = "gaussian";
  std::string boundary = "periodic";
  double width = 10.0;
  std::size_t stride = 10;
};

int cmd_wave(const WaveFlags& f, const Output& out) {
  if (f.cells < 3) throw ConfigError("--cells", "needs at least 3 cells");
  if (f.stride == 0) throw ConfigError("--stride", "must be at least 1");
  if (!(f.width > 0)) throw ConfigError("--width", "must be positive");
  const double v = 1.0;
  const double dx = 1.0;
  const double dt = f.courant * dx / v;
  const auto boundary = wave::boundary_from_string(f.boundary);
  const double length = static_cast<double>(f.cells) * dx;

  std::function<double(double)> profile;
  if (f.init == "gaussian")
    profile = wave::gaussian(length / 2.0, f.width);
  else if (f.init == "sine")
    profile = [length](double x) { return std::sin(2.0 * std::numbers::pi * x / length); };
  else
    throw ConfigError("--init", "expected gaussian or sine");

  const auto grid = wave::make_travelling(profile, f.cells, v, dx, dt, boundary);
  grid.validate();
  const auto traj = wave::run_wave(grid, f.steps, f.stride);
  const auto oracle = [&](double x, double t) {
    const double shifted = std::fmod(std::fmod(x - v * t, length) + length, length);
    return f.init == "sine" ? profile(shifted) : wave::periodic_profile(profile, shifted, length);
  };

  report::WaveSummary s;
  s.cells = f.cells;
  s.steps = f.steps;
  s.courant = grid.courant();
  s.init = f.init;
  s.boundary = boundary;
  s.energy_initial = wave::energy(grid);
  s.energy_final = wave::energy(traj.final);
  s.error = wave::compare_analytic(traj, oracle, dx);

  std::cout << "wave CA, " << f.cells << " cells, " << f.steps << " steps, Courant " << s.courant << ", "
            << wave::to_string(boundary) << "\n"
            << "  max error vs translation = " << std::scientific << std::setprecision(3) << s.error.max
            << "  rms = " << s.error.l2 << std::defaultfloat << "\n"
            << "  energy " << fmt(s.energy_initial, 6) << " -> " << fmt(s.energy_final, 6) << "\n";
  emit(out, "wave", report::wave(s, traj));
  return kOk;
}

// pendulum --------------------------------------------------------------------

int cmd_pendulum(PendulumConfig cfg, const std::string& mode, const Output& out) {
  cfg.mode = pendulum_mode_from_string(mode);
  const auto r = run_pendulum(cfg);
  std::cout << "coupled pendulums, " << to_string(cfg.mode) << ", omega' = " << fmt(r.omega_prime, 6) << ", dt = "
            << fmt(r.dt, 6) << ", " << r.steps << " steps\n"
            << "  local integration vs normal mode: max relative deviation " << std::scientific
            << std::setprecision(3) << r.max_dev_local_mode << "\n"
            << "  closed-form law vs normal mode:   max relative deviation " << r.max_dev_closed_mode
            << std::defaultfloat << "\n";
  emit(out, "pendulum", report::pendulum(r));
  return kOk;
}

// analyze ---------------------------------------------------------------------

int cmd_analyze(const std::string& path, const Output& out) {
  std::ifstream in(path);
  if (!in) throw ConfigError("model", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto spec = locality::parse_model_spec(ss.str());
  const auto r = locality::classify_model(spec);
  std::cout << locality::report_text(r);
  emit(out, "analyze", report::analyze(r));
  return kOk;
}

// simulate --------------------------------------------------------------------

int cmd_simulate(const std::string& path, const std::string& runtime_text, const std::string& scheduler_text,
                 const Output& out) {
  const auto cfg = load_experiment_config(path);
  const auto runtime = runtime_from_string(runtime_text);
  const auto scheduler = refined::scheduler_mode_from_string(scheduler_text);
  auto state = build_system_state(cfg);
  const auto world = build_world(cfg);
  auto ecfg = engine_config(cfg, *world);

  std::uint64_t steps = 0;
  bool terminated = false;
  std::vector<InteractionRecord> records;
  std::ostringstream jsonl;
  if (runtime == Runtime::Centralized) {
    const auto trace = run(state, ecfg, centralized_laws(world));
    write_trace_jsonl(trace, jsonl);
    write_file(out.path("simulate", ".trace.jsonl"), jsonl.str());
    steps = trace.steps;
    terminated = trace.terminated;
    records = state.interactions;
  } else {
    const auto res = refined::run_refined(state, world, refined::RefinedConfig{cfg.seed, scheduler, cfg.max_steps});
    refined::write_ledger_jsonl(res.ledger, jsonl);
    write_file(out.path("simulate", ".ledger.jsonl"), jsonl.str());
    steps = res.ticks;
    terminated = res.terminated;
    records = res.records;
    if (std::any_of(res.ledger.begin(), res.ledger.end(), [](const auto& ev) { return !ev.balanced(); }))
      throw InvariantError("conservation ledger has an unbalanced entry");
  }

  nlohmann::ordered_json j;
  j["schema_version"] = report::kSchemaVersion;
  j["kind"] = "simulate";
  j["config"] = path;
  j["runtime"] = to_string(runtime);
  if (runtime == Runtime::Refined) j["scheduler"] = refined::to_string(scheduler);
  j["seed"] = cfg.seed;
  j["steps"] = steps;
  j["t"] = static_cast<double>(steps) * cfg.delta_t;
  j["terminated"] = terminated;
  j["interactions"] = records.size();

  std::ostringstream csv;
  csv << "step,object_a,object_b,type_a,type_b,x,y,z,result\n";
  for (const auto& r : records)
    csv << r.step << ',' << r.object_a.value << ',' << r.object_b.value << ',' << r.type_a << ',' << r.type_b << ','
        << r.position[0] << ',' << r.position[1] << ',' << r.position[2] << ',' << r.result.value << '\n';
  std::cout << "simulated " << path << " (" << to_string(runtime) << "): " << steps << " steps, "
            << records.size() << " interactions, "
            << (terminated ? "terminated by " + ecfg.termination.name : std::string("max-steps reached")) << "\n";
  for (const auto& r : records)
    std::cout << "  step " << r.step << ": " << r.type_a << " + " << r.type_b << " at (" << r.position[0] << ", "
              << r.position[1] << ")\n";
  emit(out, "simulate", report::Document{j.dump(2) + "\n", csv.str()});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object-local quantum causal model: experiments and locality analysis"};
  app.require_subcommand(1);

  Output out;
  const char* env = std::getenv("QCAUSAL_OUT_DIR");
  out.dir = env && *env ? env : "out";
  app.add_option("-o,--out", out.dir, "Output directory (default $QCAUSAL_OUT_DIR or ./out)");
  app.add_option("--name", out.name, "Output file stem (default: subcommand name)");

  BellFlags bell;
  auto* bell_cmd = app.add_subcommand("bell", "Entangled-pair Stern-Gerlach correlations");
  bell_cmd->add_option("--angle-a", bell.angle_a, "Wing 1 apparatus angle (degrees)")->capture_default_str();
  bell_cmd->add_option("--angle-b", bell.angle_b, "Wing 2 apparatus angle (degrees)")->capture_default_str();
  bell_cmd->add_option("--angles", bell.angles, "Three-setting scan a,b,c");
  bell_cmd->add_option("--form", bell.form, "Bell functional: identical | anticorrelated")->capture_default_str();
  bell_cmd->add_option("--policy", bell.policy, "Source spin policy: uniform | fixed")->capture_default_str();
  bell_cmd->add_option("--spindir", bell.spindir, "Spin direction for --policy fixed")->capture_default_str();
  bell.run.add(bell_cmd);

  std::string lhv_angles = "0,30,60";
  std::string lhv_form = "identical";
  RunFlags lhv_run;
  auto* lhv_cmd = app.add_subcommand("lhv", "Enumerate deterministic local strategies and compare with the model");
  lhv_cmd->add_option("--angles", lhv_angles, "Settings a,b,c")->capture_default_str();
  lhv_cmd->add_option("--form", lhv_form, "identical | anticorrelated")->capture_default_str();
  lhv_run.add(lhv_cmd);

  std::string marker = "off";
  std::size_t smoothing = 1;
  RunFlags slit_run;
  auto* slit_cmd = app.add_subcommand("doubleslit", "Double-slit screen histogram");
  slit_cmd->add_option("--marker", marker, "Which-path marker: on | off")->capture_default_str();
  slit_cmd->add_option("--smoothing", smoothing, "Moving-average window for the visibility")->capture_default_str();
  slit_run.add(slit_cmd);

  WaveFlags wave;
  auto* wave_cmd = app.add_subcommand("wave", "1-D wave equation cellular automaton");
  wave_cmd->add_option("--cells", wave.cells)->capture_default_str();
  wave_cmd->add_option("--steps", wave.steps)->capture_default_str();
  wave_cmd->add_option("--courant", wave.courant, "v dt / dx")->capture_default_str();
  wave_cmd->add_option("--init", wave.init, "gaussian | sine")->capture_default_str();
  wave_cmd->add_option("--boundary", wave.boundary, "periodic | fixed-zero")->capture_default_str();
  wave_cmd->add_option("--width", wave.width, "Gaussian width in cells")->capture_default_str();
  wave_cmd->add_option("--stride", wave.stride, "Snapshot every n steps")->capture_default_str();

  PendulumConfig pend;
  std::string pend_mode = "anti-phase";
  auto* pend_cmd = app.add_subcommand("pendulum", "Coupled pendulums: closed-form laws vs local integration");
  pend_cmd->add_option("--mode", pend_mode, "in-phase | anti-phase")->capture_default_str();
  pend_cmd->add_option("--k", pend.k, "Spring constant")->capture_default_str();
  pend_cmd->add_option("--m", pend.m, "Mass")->capture_default_str();
  pend_cmd->add_option("--omega", pend.omega, "Pendulum frequency")->capture_default_str();
  pend_cmd->add_option("--amplitude", pend.amplitude, "Initial displacement C")->capture_default_str();
  pend_cmd->add_option("--periods", pend.periods, "Simulated span in periods of the selected mode")->capture_default_str();
  pend_cmd->add_option("--steps", pend.steps_per_period, "Integration steps per period of omega'")
      ->capture_default_str();
  pend_cmd->add_option("--stride", pend.stride, "Sample every n steps")->capture_default_str();

  std::string model_path;
  auto* analyze_cmd = app.add_subcommand("analyze", "Classify the locality of a model spec");
  analyze_cmd->add_option("model", model_path, "Model spec file")->required();

  std::string config_path;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a YAML experiment config");
  sim_cmd->add_option("--config", config_path, "Experiment config file")->required();
  std::string sim_runtime = "centralized";
  std::string sim_scheduler = "round-robin";
  sim_cmd->add_option("--runtime", sim_runtime, "centralized | refined (refined writes the conservation ledger)")
      ->capture_default_str();
  sim_cmd->add_option("--scheduler", sim_scheduler, "Refined scheduler: round-robin | randomized")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*bell_cmd) return cmd_bell(bell, out);
    if (*lhv_cmd) return cmd_lhv(lhv_angles, lhv_form, lhv_run, out);
    if (*slit_cmd) return cmd_doubleslit(marker, smoothing, slit_run, out);
    if (*wave_cmd) return cmd_wave(wave, out);
    if (*pend_cmd) return cmd_pendulum(pend, pend_mode, out);
    if (*analyze_cmd) return cmd_analyze(model_path, out);
    if (*sim_cmd) return cmd_simulate(config_path, sim_runtime, sim_scheduler, out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const locality::ParseError& e) {
    std::cerr << model_path << ":\n" << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInvariant;
  }
  return kConfig;
}
