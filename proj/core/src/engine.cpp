#include "qcausal/engine.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

namespace qcausal {

void EngineConfig::validate() const {
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) throw ConfigError("engine.dt", "must be positive");
  if (max_steps == 0) throw ConfigError("engine.max_steps", "must be at least 1");
}

std::vector<std::string> step(SystemState& state, double delta_t, std::span<const Law> laws) {
  if (!(delta_t > 0.0)) throw ConfigError("engine.dt", "must be positive");
  if (state.step_count == 0) {
    state.delta_t = delta_t;
  } else if (delta_t != state.delta_t) {
    throw InvariantError("delta_t changed in the middle of a run");
  }

  std::vector<std::string> fired;
  const auto clock = state.step_count;
  for (const auto& law : laws) {
    if (law.condition && !law.condition(state)) continue;
    fired.push_back(law.id);
    if (!law.transition) continue;
    try {
      law.transition(state);
      if (state.step_count != clock) throw InvariantError("transition modified the clock");
      state.check_invariants();
    } catch (const LawViolation&) {
      throw;
    } catch (const InvariantError& e) {
      throw LawViolation(law.id, e.what());
    } catch (const DegenerateObjectError& e) {
      throw LawViolation(law.id, e.what());
    }
  }
  ++state.step_count;
  return fired;
}

RunTrace run(SystemState& state, const EngineConfig& cfg, std::span<const Law> laws) {
  cfg.validate();
  if (laws.empty()) throw ConfigError("laws", "law list must not be empty");

  if (state.step_count == 0) {
    state.rng = RngState(cfg.seed);
    state.delta_t = cfg.delta_t;
  }
  state.rng.set_logging(cfg.record_trace);

  RunTrace trace;
  for (const auto& l : laws) trace.law_order.push_back(l.id);

  while (trace.steps < cfg.max_steps) {
    if (cfg.termination.done && cfg.termination.done(state)) {
      trace.terminated = true;
      break;
    }
    const auto dropped_before = state.dropped.size();
    auto fired = step(state, cfg.delta_t, laws);
    ++trace.steps;
    if (cfg.record_trace) {
      StepRecord rec;
      rec.step = state.step_count;
      rec.t = state.t();
      rec.fired = std::move(fired);
      rec.draws = state.rng.take_log();
      rec.dropped.assign(state.dropped.begin() + static_cast<std::ptrdiff_t>(dropped_before), state.dropped.end());
      trace.records.push_back(std::move(rec));
    }
  }
  if (!trace.terminated && cfg.termination.done && cfg.termination.done(state)) trace.terminated = true;
  state.rng.set_logging(false);
  return trace;
}

void write_trace_jsonl(const RunTrace& trace, std::ostream& os) {
  for (const auto& rec : trace.records) {
    nlohmann::json j;
    j["step"] = rec.step;
    j["t"] = rec.t;
    j["fired"] = rec.fired;
    auto draws = nlohmann::json::array();
    for (const auto& d : rec.draws)
      draws.push_back({{"seq", d.sequence}, {"value", d.value}, {"discrete", d.discrete}});
    j["draws"] = std::move(draws);
    auto dropped = nlohmann::json::array();
    for (const auto& id : rec.dropped) dropped.push_back(id.value);
    j["dropped"] = std::move(dropped);
    os << j.dump() << '\n';
  }
}

}  // namespace qcausal
