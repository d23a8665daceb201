#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qcausal/engine.hpp"
#include "qcausal/interaction.hpp"

namespace qcausal {

/// QFT-interaction between two particle types and the rule that produces its
/// outcome table. Matching is symmetric in the type order.
struct InteractionRule {
  std::string type_a;
  std::string type_b;
  OutcomeRule outcome;
};

/// qobject-update-function: evolves the paths of one object. It sees only the
/// object itself, the space and the fields.
using PathUpdate = std::function<void(QuantumObject&, const Space&, std::span<const FieldGrid>)>;

/// The shared physics of an experiment: which particles interact, how paths
/// evolve, and when the run is over. Both the centralized engine and the
/// per-object engines of the refined runtime execute the same World.
struct World {
  std::vector<InteractionRule> rules;
  PathUpdate update;
  Termination termination;

  /// Rule matching the (a, b) particle types, or nullptr. `swapped` is set
  /// when the rule is declared as (b, a).
  const InteractionRule* rule_for(const ParticleInfo& a, const ParticleInfo& b, bool* swapped = nullptr) const;
  bool interacts(const ParticleInfo& a, const ParticleInfo& b) const { return rule_for(a, b) != nullptr; }
  ParticlePairFilter filter() const;
};

/// Candidates between two objects restricted to particle pairs with a rule.
std::vector<InteractionCandidate> world_candidates(const World& world, const QuantumObject& a,
                                                   const QuantumObject& b);

/// Outcome rule to hand to perform_interaction for a selected candidate,
/// adapting a swapped rule so in-particle 0 always refers to object a.
OutcomeRule world_outcome(const World& world, const QuantumObject& a, const QuantumObject& b,
                          const InteractionCandidate& c);

/// Law list for the centralized engine (applyLawsOfPhysics):
///   "qft-interactions": for every object k (id order) and every other object
///     j, select and perform one interaction if candidates exist;
///   "qobject-update": every object that took no part in an interaction this
///     step has its paths evolved by World::update.
std::vector<Law> centralized_laws(std::shared_ptr<const World> world);

}  // namespace qcausal
