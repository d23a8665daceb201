#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcausal/refined.hpp"
#include "qcausal/system_state.hpp"
#include "qcausal/world.hpp"

namespace qcausal {

enum class Runtime { Centralized, Refined };

std::string to_string(Runtime r);
Runtime runtime_from_string(const std::string& text);

/// Execution options shared by all Monte Carlo drivers. Trial i always runs
/// with seed derive_seed(seed, i), so results do not depend on `threads`.
struct TrialOptions {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  Runtime runtime = Runtime::Centralized;
  refined::SchedulerMode scheduler = refined::SchedulerMode::RoundRobin;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Stern-Gerlach experiments ---------------------------------------------------

enum class SpinPolicy { Uniform, Fixed };

struct BellConfig {
  double angle_a = 0.0;
  double angle_b = 0.0;
  SpinPolicy policy = SpinPolicy::Uniform;
  double fixed_spindir = 0.0;
  TrialOptions run;
};

/// Joint outcome counts of the two wings; index 0 = case1 (up), 1 = case2.
struct JointStats {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};
  std::uint64_t trials = 0;

  std::uint64_t n(bool a_up, bool b_up) const { return counts[a_up ? 0 : 1][b_up ? 0 : 1]; }
  double frequency(bool a_up, bool b_up) const;
  std::uint64_t differing() const { return counts[0][1] + counts[1][0]; }
  double p_same() const;
  double correlation() const;
  double correlation_stderr() const;
  double marginal_a_up() const;
  double marginal_b_up() const;
  /// Total-variation distance between the two joint distributions.
  double tv_distance(const JointStats& other) const;

  JointStats& operator+=(const JointStats& o);
  bool operator==(const JointStats&) const = default;
};

struct SpinTrialOutcome {
  std::optional<bool> wing1;  // true = case1
  std::optional<bool> wing2;
};

/// Lab layout shared by the spin experiments: 2-D space 17 x 3, beam line
/// y = 1, source at x = 8, apparatus at x = 5 / 13, detectors at x = 0 / 16
/// covering the deflected rows y = 0 and y = 2.
namespace spin_lab {
inline constexpr int kLength = 17;
inline constexpr int kCentre = 8;
inline constexpr int kSgWing1 = 5;
inline constexpr int kSgWing2 = 13;
inline constexpr std::uint64_t kMaxSteps = 64;
}  // namespace spin_lab

/// Entangled pair: pump and source meet at the centre and emit a two-electron
/// collection with rows (theta, theta + 180).
SystemState bell_initial_state(double angle_a, double angle_b);
std::shared_ptr<const World> bell_world(SpinPolicy policy, double fixed_spindir);

/// Two independent electrons with fixed spin directions.
SystemState unentangled_initial_state(double spindir_1, double spindir_2, double angle_a, double angle_b);
/// One electron heading for wing 1.
SystemState single_particle_initial_state(double spindir, double angle);
/// Physics of the unentangled and single-particle setups (no source rule).
std::shared_ptr<const World> spin_world();

/// Reads wing outcomes from the detector clicks of a finished run.
SpinTrialOutcome spin_outcome(std::span<const InteractionRecord> records);

/// One complete trial through the chosen runtime.
SpinTrialOutcome run_spin_trial(const SystemState& initial, const std::shared_ptr<const World>& world,
                                std::uint64_t seed, Runtime runtime, refined::SchedulerMode scheduler);

JointStats run_bell_experiment(const BellConfig& cfg);

struct UnentangledConfig {
  double spindir_1 = 0.0;
  double spindir_2 = 0.0;
  double angle_a = 0.0;
  double angle_b = 0.0;
  TrialOptions run;
};
JointStats run_unentangled_pair(const UnentangledConfig& cfg);

struct SingleSpinConfig {
  double spindir = 0.0;
  double angle = 0.0;
  TrialOptions run;
};
struct SingleSpinStats {
  std::uint64_t trials = 0;
  std::uint64_t case1 = 0;
  double frequency() const { return trials ? static_cast<double>(case1) / static_cast<double>(trials) : 0.0; }
  SingleSpinStats& operator+=(const SingleSpinStats& o) {
    trials += o.trials;
    case1 += o.case1;
    return *this;
  }
};
SingleSpinStats run_single_stern_gerlach(const SingleSpinConfig& cfg);

// Bell functional -------------------------------------------------------------

enum class BellForm { Identical, Anticorrelated };

std::string to_string(BellForm f);
BellForm bell_form_from_string(const std::string& text);

/// Negative margin means the inequality is violated.
double evaluate_bell(double p_ab, double p_ac, double p_bc, BellForm form);

/// Deterministic local strategy: +-1 outcome per setting on each wing.
struct LhvStrategy {
  std::array<int, 3> wing1{};
  std::array<int, 3> wing2{};
  bool admissible = false;  // perfect (anti)correlation as the form presumes
  double functional = 0.0;  // |E(a,b) - E(a,c)| - bound term
};

struct LhvResult {
  BellForm form = BellForm::Identical;
  std::array<double, 3> angles{};
  std::vector<LhvStrategy> strategies;  // all 64
  std::size_t admissible_count = 0;
  double classical_max = 0.0;      // max functional over admissible strategies
  double unconstrained_max = 0.0;  // max over all 64
  double classical_margin() const { return -classical_max; }
};

/// Exhaustive enumeration of the 2^6 deterministic strategies. Deterministic
/// outcomes do not depend on the angles; they are recorded for reporting.
LhvResult lhv_oracle(std::array<double, 3> angles, BellForm form);

struct BellScan {
  std::array<double, 3> angles{};
  BellForm form = BellForm::Identical;
  JointStats ab;
  JointStats ac;
  JointStats bc;
  double margin = 0.0;
};

/// Runs the three angle pairs with independent seed streams and evaluates
/// the Bell functional on the estimated correlations.
BellScan run_bell_scan(std::array<double, 3> angles, BellForm form, SpinPolicy policy, const TrialOptions& run);

// Double slit -----------------------------------------------------------------

struct DoubleSlitGeometry {
  int screen_cells = 17;       // N, screen extent in y
  int slit_separation = 4;     // lattice distance between the two slit cells
  double slit_distance = 125;  // d, physical slit separation in the phase model
  double screen_distance = 1000;  // D
  double wavelength = 1.0;
  double cell_size = 1.0;       // physical width of one screen cell
  std::array<double, 2> branch_amplitudes{0.7071067811865476, 0.7071067811865476};

  int centre() const { return screen_cells / 2; }
  std::array<int, 2> slit_cells() const { return {centre() - slit_separation / 2, centre() + slit_separation / 2}; }
  /// Optical path length from slit `branch` (0 = lower) to screen cell y.
  double path_length(int branch, int y) const;
  void validate() const;
};

namespace slit_lab {
inline constexpr int kSlitColumn = 1;
inline constexpr int kDiffractionColumn = 2;
inline constexpr int kScreenColumn = 3;
inline constexpr std::uint64_t kMaxSteps = 16;
}  // namespace slit_lab

struct DoubleSlitConfig {
  bool marker = false;
  DoubleSlitGeometry geometry;
  std::size_t smoothing = 1;  // moving-average window for the visibility
  TrialOptions run;
};

struct ScreenHistogram {
  std::vector<std::uint64_t> counts;
  std::uint64_t trials = 0;

  std::vector<double> frequencies() const;
  double visibility(std::size_t smoothing = 1) const;
  double tv_distance(const ScreenHistogram& other) const;
  ScreenHistogram& operator+=(const ScreenHistogram& o);
};

SystemState double_slit_initial_state(const DoubleSlitGeometry& g, bool marker);
std::shared_ptr<const World> double_slit_world(const DoubleSlitGeometry& g);

/// Expands every electron path sitting on the diffraction column over the
/// whole column, with phase exp(i 2 pi L / lambda) / sqrt(N) per cell, then
/// merges identical paths coherently and renormalizes.
void diffract(QuantumObject& obj, const Space& space, const DoubleSlitGeometry& g);

/// Screen cell hit in one trial, or nullopt if nothing reached the screen.
std::optional<int> run_double_slit_trial(const DoubleSlitConfig& cfg, std::uint64_t seed);

ScreenHistogram run_double_slit(const DoubleSlitConfig& cfg);

// Coupled pendulums -----------------------------------------------------------

enum class PendulumMode { InPhase, AntiPhase };

std::string to_string(PendulumMode m);
PendulumMode pendulum_mode_from_string(const std::string& text);

struct PendulumConfig {
  PendulumMode mode = PendulumMode::AntiPhase;
  double m = 1.0;
  double omega = 1.0;  // omega_a = omega_b
  double k = 0.1;
  double amplitude = 1.0;  // C
  double periods = 10.0;   // simulated span in periods of the selected mode
  std::uint64_t steps_per_period = 1000;
  std::size_t stride = 10;  // trajectory sampling

  double omega_prime() const;
  void validate() const;
};

struct PendulumSample {
  double t = 0.0;
  double xa_closed = 0.0;  // L1 / L2 closed form
  double xb_closed = 0.0;
  double xa_local = 0.0;  // explicit spring coupling, leapfrog
  double xb_local = 0.0;
  double xa_mode = 0.0;  // normal-mode solution of the selected mode
  double xb_mode = 0.0;
};

struct PendulumResult {
  PendulumConfig config;
  double dt = 0.0;
  std::uint64_t steps = 0;
  double omega_prime = 0.0;
  double mode_frequency = 0.0;       // omega_a (in-phase) or omega' (anti-phase)
  double max_dev_local_mode = 0.0;   // local integration vs normal mode, relative to C
  double max_dev_closed_mode = 0.0;  // closed-form law vs normal mode, relative to C
  std::vector<PendulumSample> samples;
};

/// Closed-form laws exactly as stated for the two special cases.
std::array<double, 2> pendulum_closed_form(const PendulumConfig& cfg, double t);

/// Integrates m x'' = -m w^2 x - k (x - x_other) with velocity Verlet. Throws
/// ConfigError when omega' dt >= 2.
PendulumResult run_pendulum(const PendulumConfig& cfg);

}  // namespace qcausal
