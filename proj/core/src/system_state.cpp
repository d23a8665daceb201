#include "qcausal/system_state.hpp"

#include <algorithm>
#include <cmath>

#include "qcausal/error.hpp"

namespace qcausal {

SystemState::SystemState(Space sp, double dt, std::uint64_t seed) : space(sp), delta_t(dt), rng(seed) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("engine.dt", "must be a positive finite real");
}

QuantumObject* SystemState::find(ObjectId id) noexcept {
  auto it = std::lower_bound(objects.begin(), objects.end(), id,
                             [](const QuantumObject& o, ObjectId v) { return o.id < v; });
  return (it != objects.end() && it->id == id) ? &*it : nullptr;
}

const QuantumObject* SystemState::find(ObjectId id) const noexcept {
  return const_cast<SystemState*>(this)->find(id);
}

QuantumObject& SystemState::get(ObjectId id) {
  if (auto* o = find(id)) return *o;
  throw std::out_of_range("unknown object id " + std::to_string(id.value));
}

const QuantumObject& SystemState::get(ObjectId id) const { return const_cast<SystemState*>(this)->get(id); }

QuantumObject& SystemState::add(QuantumObject obj) {
  auto it = std::lower_bound(objects.begin(), objects.end(), obj.id,
                             [](const QuantumObject& o, ObjectId v) { return o.id < v; });
  if (it != objects.end() && it->id == obj.id)
    throw InvariantError("duplicate object id " + std::to_string(obj.id.value));
  next_id = std::max(next_id, obj.id.value + 1);
  return *objects.insert(it, std::move(obj));
}

const FieldGrid* SystemState::field(const std::string& id) const noexcept {
  for (const auto& f : fields)
    if (f.id == id) return &f;
  return nullptr;
}

void SystemState::check_invariants() const {
  for (const auto& f : fields) {
    if (f.values.size() != space.cell_count()) throw InvariantError("field '" + f.id + "' does not match space size");
    for (const auto& v : f.values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw InvariantError("field '" + f.id + "' has non-finite values");
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    qcausal::check_invariants(objects[i], space);
    if (i > 0 && !(objects[i - 1].id < objects[i].id)) throw InvariantError("objects not ordered by unique id");
  }
}

}  // namespace qcausal
