#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qcausal/error.hpp"
#include "qcausal/footprint.hpp"
#include "qcausal/rng.hpp"
#include "qcausal/system_state.hpp"

namespace qcausal {

/// Guarded transition: IF condition(s) THEN s = transition(s).
struct Law {
  std::string id;
  std::function<bool(const SystemState&)> condition;  // empty = always
  std::function<void(SystemState&)> transition;
  AccessFootprint footprint;
};

/// The nonContinueState predicate of a run.
struct Termination {
  std::string name = "max-steps";
  std::function<bool(const SystemState&)> done;  // empty = never (max-steps only)
};

struct EngineConfig {
  double delta_t = 1.0;
  std::uint64_t max_steps = 1;
  Termination termination;
  std::uint64_t seed = 0;
  bool record_trace = true;

  /// Throws ConfigError on delta_t <= 0 or max_steps == 0.
  void validate() const;
};

struct StepRecord {
  std::uint64_t step = 0;  // 1-based index of the completed step
  double t = 0.0;          // time after the step
  std::vector<std::string> fired;
  std::vector<DrawRecord> draws;
  std::vector<ObjectId> dropped;

  bool operator==(const StepRecord&) const = default;
};

struct RunTrace {
  std::vector<std::string> law_order;
  std::uint64_t steps = 0;
  bool terminated = false;  // predicate fired (vs. max-steps backstop)
  std::vector<StepRecord> records;

  bool operator==(const RunTrace&) const = default;
};

/// A law transition broke a SystemState invariant.
class LawViolation : public InvariantError {
 public:
  LawViolation(std::string law, const std::string& what)
      : InvariantError("law '" + law + "' violated an invariant: " + what), law_(std::move(law)) {}
  const std::string& law() const noexcept { return law_; }

 private:
  std::string law_;
};

/// Applies every law once, in list order, each seeing the writes of the ones
/// before it, then advances the clock by exactly one step. Returns the ids of
/// the laws whose condition held.
std::vector<std::string> step(SystemState& state, double delta_t, std::span<const Law> laws);

/// Runs until the termination predicate holds or max_steps is reached. A
/// fresh state (step 0) is reseeded from cfg.seed.
RunTrace run(SystemState& state, const EngineConfig& cfg, std::span<const Law> laws);

/// One JSON object per step: {"step","t","fired","draws","dropped"}.
void write_trace_jsonl(const RunTrace& trace, std::ostream& os);

}  // namespace qcausal
