#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qcausal/quantum_object.hpp"
#include "qcausal/rng.hpp"
#include "qcausal/space.hpp"

namespace qcausal {

/// Summary of one performed QFT-interaction, kept on the state so drivers and
/// traces can read outcomes without re-deriving them.
struct InteractionRecord {
  std::uint64_t step = 0;
  ObjectId object_a;
  ObjectId object_b;
  std::size_t particle_a = 0;
  std::size_t particle_b = 0;
  std::size_t path_a = 0;
  std::size_t path_b = 0;
  SpacePoint position;
  ObjectId result;
  std::string type_a;
  std::string type_b;

  bool operator==(const InteractionRecord&) const = default;
};

/// The single mutable world of a run.
struct SystemState {
  SystemState(Space space, double delta_t, std::uint64_t seed);

  Space space;
  std::vector<FieldGrid> fields;
  std::vector<QuantumObject> objects;  // ordered by id
  double delta_t;
  std::uint64_t step_count = 0;
  RngState rng;
  std::uint64_t next_id = 1;
  std::vector<ObjectId> dropped;
  std::vector<InteractionRecord> interactions;

  /// Simulation time, always step_count * delta_t.
  double t() const noexcept { return static_cast<double>(step_count) * delta_t; }

  ObjectId allocate_id() noexcept { return ObjectId{next_id++}; }
  QuantumObject* find(ObjectId id) noexcept;
  const QuantumObject* find(ObjectId id) const noexcept;
  QuantumObject& get(ObjectId id);
  const QuantumObject& get(ObjectId id) const;
  /// Inserts keeping id order. Throws on duplicate id.
  QuantumObject& add(QuantumObject obj);
  const FieldGrid* field(const std::string& id) const noexcept;

  /// Checks every object and field against the space; throws InvariantError.
  void check_invariants() const;

  bool operator==(const SystemState&) const = default;
};

}  // namespace qcausal
