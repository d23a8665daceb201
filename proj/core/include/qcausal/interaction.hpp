#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qcausal/quantum_object.hpp"
#include "qcausal/rng.hpp"
#include "qcausal/system_state.hpp"

namespace qcausal {

/// A location where one path of `a` and one path of `b` both have support.
struct InteractionCandidate {
  SpacePoint position;
  std::size_t path_a = 0;
  std::size_t path_b = 0;
  std::size_t particle_a = 0;
  std::size_t particle_b = 0;
  double joint_weight = 0.0;  // |amp_a * amp_b|^2

  bool operator==(const InteractionCandidate&) const = default;
};

/// Which particle pairs may take part in a QFT-interaction. Empty = all.
using ParticlePairFilter = std::function<bool(const ParticleInfo&, const ParticleInfo&)>;

/// One candidate per (path of a, path of b, particle pair, shared cell) with
/// positive joint weight, in deterministic order.
std::vector<InteractionCandidate> determine_potential_interactions(const QuantumObject& a, const QuantumObject& b,
                                                                   const ParticlePairFilter& filter = {});

/// Picks one candidate with probability joint_weight / sum(joint_weight).
const InteractionCandidate& select_interaction(std::span<const InteractionCandidate> candidates, RngState& rng);

struct OutcomeRow {
  std::vector<PathState> states;  // one per out particle
  Amplitude amplitude{1.0, 0.0};

  bool operator==(const OutcomeRow&) const = default;
};

/// Out particle collection of an interaction: particle list plus one row per
/// alternative outcome.
struct OutcomeTable {
  std::vector<ParticleInfo> particles;
  std::vector<OutcomeRow> rows;

  double total_weight() const noexcept;
  void normalize();
  bool operator==(const OutcomeTable&) const = default;
};

/// Merged state of the two interacting paths.
struct InteractionObject {
  QuantumObject object;  // kind InteractionObject, two particles, one path at `position`
  ObjectId source_a;
  ObjectId source_b;
  InteractionCandidate candidate;
  SpacePoint position;
  OutcomeTable outcome;
};

/// Energy (rest mass plus kinetic), momentum and angular momentum of one
/// particle's path state.
ConservedQuantities path_contribution(const ParticleInfo& particle, const PathState& state);

/// Builds the interaction object at candidate.position. Throws InvariantError
/// if the position is not covered by both selected path states.
InteractionObject create_interaction_object(const QuantumObject& a, const QuantumObject& b,
                                            const InteractionCandidate& candidate, ObjectId id);

/// Removes the whole object from the state and records its id as dropped.
void drop_particle(SystemState& state, ObjectId id);

/// Drops one particle of an object. For collections the column is removed and
/// the remaining particles are reduced to `interacting_path`.
void drop_particle(SystemState& state, ObjectId id, std::size_t particle_index, std::size_t interacting_path);

/// Discards every path except the interacting one.
QuantumObject eliminate_unaffected_paths(QuantumObject obj, std::size_t interacting_path);

/// Converts the interaction object's outcome table into one out collection.
/// Conserved quantities are copied from the interaction object.
QuantumObject process_interaction_object(const InteractionObject& ia, ObjectId id);

/// Produces the outcome table for a created interaction object.
using OutcomeRule = std::function<OutcomeTable(const InteractionObject&, const Space&, RngState&)>;

/// The full pipeline: create, drop a, drop b (eliminating unaffected paths of
/// their partners), process. Returns the id of the new out collection.
ObjectId perform_interaction(SystemState& state, ObjectId a, ObjectId b, const InteractionCandidate& candidate,
                             const OutcomeRule& rule);

// Config-declared outcome tables ---------------------------------------------

/// Out particle template. Cells are offsets from the interaction position.
/// `inherit` copies momentum, angular momentum and spindir from the selected
/// path state of in-particle 0 (a) or 1 (b) before explicit overrides apply.
struct OutParticleSpec {
  ParticleInfo info;
  std::vector<std::array<int, 3>> offsets{{0, 0, 0}};
  std::optional<std::size_t> inherit;
  std::optional<Vec3> momentum;
  std::optional<double> spindir;  // added to the spin reference at resolve time
};

struct OutcomeRowSpec {
  std::vector<OutParticleSpec> particles;
  Amplitude amplitude{1.0, 0.0};
};

struct OutcomeSpec {
  std::vector<OutcomeRowSpec> rows;
};

/// Resolves a template against a concrete interaction. Rows whose cells fall
/// outside the space are clamped to the boundary. The table is normalized.
OutcomeTable resolve_outcome(const OutcomeSpec& spec, const InteractionObject& ia, const Space& space,
                             double spin_reference = 0.0);

}  // namespace qcausal
