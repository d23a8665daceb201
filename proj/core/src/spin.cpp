#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"
#include "qcausal/experiments.hpp"
#include "qcausal/lab.hpp"

namespace qcausal {

using namespace spin_lab;

std::string to_string(Runtime r) { return r == Runtime::Centralized ? "centralized" : "refined"; }

Runtime runtime_from_string(const std::string& text) {
  if (text == "centralized") return Runtime::Centralized;
  if (text == "refined") return Runtime::Refined;
  throw ConfigError("runtime", "expected centralized or refined, got '" + text + "'");
}

double JointStats::frequency(bool a_up, bool b_up) const {
  return trials ? static_cast<double>(n(a_up, b_up)) / static_cast<double>(trials) : 0.0;
}

double JointStats::p_same() const { return frequency(true, true) + frequency(false, false); }

double JointStats::correlation() const { return 2.0 * p_same() - 1.0; }

double JointStats::correlation_stderr() const {
  if (trials == 0) return 0.0;
  const double e = correlation();
  return std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(trials));
}

double JointStats::marginal_a_up() const { return frequency(true, true) + frequency(true, false); }
double JointStats::marginal_b_up() const { return frequency(true, true) + frequency(false, true); }

double JointStats::tv_distance(const JointStats& other) const {
  double tv = 0.0;
  for (const bool a : {true, false})
    for (const bool b : {true, false}) tv += std::abs(frequency(a, b) - other.frequency(a, b));
  return 0.5 * tv;
}

JointStats& JointStats::operator+=(const JointStats& o) {
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) counts[i][j] += o.counts[i][j];
  trials += o.trials;
  return *this;
}

namespace {

Space spin_space() { return Space(2, {kLength, 3, 1}, 1.0); }

void add_detectors(SystemState& s, bool wing2) {
  s.add(lab::make_particle(s.allocate_id(), lab::kDetector, 1000.0, {SpacePoint(0, 0), SpacePoint(0, 2)}));
  if (wing2)
    s.add(lab::make_particle(s.allocate_id(), lab::kDetector, 1000.0,
                             {SpacePoint(kLength - 1, 0), SpacePoint(kLength - 1, 2)}));
}

void add_apparatus(SystemState& s, std::vector<lab::SgApparatus> sg) {
  s.fields = lab::stern_gerlach_fields(s.space, sg);
}

void free_flight(QuantumObject& obj, const Space& space, std::span<const FieldGrid> fields) {
  lab::propagate(obj, space);
  lab::stern_gerlach(obj, space, fields);
}

bool electrons_gone(const SystemState& s) {
  return !lab::any_particle_of_type(s, lab::kElectron) && !lab::any_particle_of_type(s, lab::kPump);
}

// Entangled pair emitted at the interaction point: electron 1 heads for wing 1,
// electron 2 for wing 2; rows (theta, theta + 180) with equal weight.
OutcomeTable pair_table(const InteractionObject& ia, double theta) {
  OutcomeTable t;
  t.particles = {ParticleInfo{lab::kElectron, 1.0}, ParticleInfo{lab::kElectron, 1.0}};
  for (const double dir : {theta, theta + 180.0}) {
    PathState e1;
    e1.spacepoints = {ia.position};
    e1.momentum = {-1, 0, 0};
    e1.spindir = dir;
    PathState e2 = e1;
    e2.momentum = {1, 0, 0};
    e1.canonicalize();
    e2.canonicalize();
    t.rows.push_back(OutcomeRow{{e1, e2}, Amplitude{1.0, 0.0}});
  }
  t.normalize();
  return t;
}

}  // namespace

SystemState bell_initial_state(double angle_a, double angle_b) {
  SystemState s(spin_space(), 1.0, 0);
  add_apparatus(s, {{SpacePoint(kSgWing1, 1), angle_a}, {SpacePoint(kSgWing2, 1), angle_b}});
  add_detectors(s, true);
  // the pump carries the pair's energy budget: 2 * (m + p^2 / 2m) = 3
  s.add(lab::make_particle(s.allocate_id(), lab::kPump, 2.0, {SpacePoint(kCentre, 1)}));
  s.add(lab::make_particle(s.allocate_id(), lab::kSource, 1.0, {SpacePoint(kCentre, 1)}));
  return s;
}

std::shared_ptr<const World> bell_world(SpinPolicy policy, double fixed_spindir) {
  auto w = std::make_shared<World>();
  w->rules.push_back({lab::kPump, lab::kSource, [policy, fixed_spindir](const InteractionObject& ia, const Space&,
                                                                         RngState& rng) {
                        const double theta =
                            policy == SpinPolicy::Fixed ? fixed_spindir : random_draw(RealInterval{0.0, 360.0}, rng);
                        return pair_table(ia, theta);
                      }});
  w->rules.push_back({lab::kElectron, lab::kDetector, lab::absorb_outcome});
  w->update = free_flight;
  w->termination = {"no-electrons", electrons_gone};
  return w;
}

SystemState unentangled_initial_state(double spindir_1, double spindir_2, double angle_a, double angle_b) {
  SystemState s(spin_space(), 1.0, 0);
  add_apparatus(s, {{SpacePoint(kSgWing1, 1), angle_a}, {SpacePoint(kSgWing2, 1), angle_b}});
  add_detectors(s, true);
  s.add(lab::make_particle(s.allocate_id(), lab::kElectron, 1.0, {SpacePoint(kCentre, 1)}, {-1, 0, 0}, spindir_1));
  s.add(lab::make_particle(s.allocate_id(), lab::kElectron, 1.0, {SpacePoint(kCentre, 1)}, {1, 0, 0}, spindir_2));
  return s;
}

SystemState single_particle_initial_state(double spindir, double angle) {
  SystemState s(spin_space(), 1.0, 0);
  add_apparatus(s, {{SpacePoint(kSgWing1, 1), angle}});
  add_detectors(s, false);
  s.add(lab::make_particle(s.allocate_id(), lab::kElectron, 1.0, {SpacePoint(kCentre, 1)}, {-1, 0, 0}, spindir));
  return s;
}

std::shared_ptr<const World> spin_world() {
  auto w = std::make_shared<World>();
  w->rules.push_back({lab::kElectron, lab::kDetector, lab::absorb_outcome});
  w->update = free_flight;
  w->termination = {"no-electrons", electrons_gone};
  return w;
}

SpinTrialOutcome spin_outcome(std::span<const InteractionRecord> records) {
  SpinTrialOutcome out;
  for (const auto& r : records) {
    const bool ab = r.type_a == lab::kElectron && r.type_b == lab::kDetector;
    const bool ba = r.type_a == lab::kDetector && r.type_b == lab::kElectron;
    if (!ab && !ba) continue;
    const bool up = r.position[1] == 2;
    (r.position[0] < kCentre ? out.wing1 : out.wing2) = up;
  }
  return out;
}

namespace {

struct CentralizedRunner {
  SystemState initial;
  std::vector<Law> laws;
  Termination termination;

  SpinTrialOutcome operator()(std::uint64_t seed) const {
    SystemState s = initial;
    EngineConfig cfg{1.0, kMaxSteps, termination, seed, false};
    run(s, cfg, laws);
    return spin_outcome(s.interactions);
  }
};

SpinTrialOutcome run_refined_trial(const SystemState& initial, const std::shared_ptr<const World>& world,
                                   std::uint64_t seed, refined::SchedulerMode scheduler) {
  refined::RefinedConfig cfg{seed, scheduler, kMaxSteps};
  auto res = refined::run_refined(initial, world, cfg);
  return spin_outcome(res.records);
}

// Runs `trials` spin trials and folds each outcome into an accumulator.
template <class Acc, class Fold>
Acc spin_trials(const SystemState& initial, const std::shared_ptr<const World>& world, const TrialOptions& opt,
                const Acc& init, Fold fold) {
  if (opt.trials == 0) throw ConfigError("trials", "must be at least 1");
  const CentralizedRunner central{initial, centralized_laws(world), world->termination};
  return detail::parallel_trials(opt.trials, opt.threads, init, [&](std::uint64_t i, Acc& acc) {
    const auto seed = derive_seed(opt.seed, i);
    const auto out = opt.runtime == Runtime::Centralized ? central(seed)
                                                         : run_refined_trial(initial, world, seed, opt.scheduler);
    fold(out, acc);
  });
}

void fold_joint(const SpinTrialOutcome& out, JointStats& acc) {
  if (!out.wing1 || !out.wing2) throw InvariantError("spin trial ended without a detector click on both wings");
  ++acc.counts[*out.wing1 ? 0 : 1][*out.wing2 ? 0 : 1];
  ++acc.trials;
}

}  // namespace

SpinTrialOutcome run_spin_trial(const SystemState& initial, const std::shared_ptr<const World>& world,
                                std::uint64_t seed, Runtime runtime, refined::SchedulerMode scheduler) {
  if (runtime == Runtime::Refined) return run_refined_trial(initial, world, seed, scheduler);
  return CentralizedRunner{initial, centralized_laws(world), world->termination}(seed);
}

JointStats run_bell_experiment(const BellConfig& cfg) {
  return spin_trials(bell_initial_state(cfg.angle_a, cfg.angle_b), bell_world(cfg.policy, cfg.fixed_spindir), cfg.run,
                     JointStats{}, fold_joint);
}

JointStats run_unentangled_pair(const UnentangledConfig& cfg) {
  return spin_trials(unentangled_initial_state(cfg.spindir_1, cfg.spindir_2, cfg.angle_a, cfg.angle_b), spin_world(),
                     cfg.run, JointStats{}, fold_joint);
}

SingleSpinStats run_single_stern_gerlach(const SingleSpinConfig& cfg) {
  return spin_trials(single_particle_initial_state(cfg.spindir, cfg.angle), spin_world(), cfg.run, SingleSpinStats{},
                     [](const SpinTrialOutcome& out, SingleSpinStats& acc) {
                       if (!out.wing1) throw InvariantError("spin trial ended without a detector click");
                       ++acc.trials;
                       if (*out.wing1) ++acc.case1;
                     });
}

}  // namespace qcausal
