#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qcausal/interaction.hpp"
#include "qcausal/world.hpp"

// Object-local runtime: every quantum object runs its own engine; objects
// meet only through advertisements on the shared space and the claim-guarded
// interaction pipeline.
namespace qcausal::refined {

enum class SchedulerMode { RoundRobin, Randomized };

std::string to_string(SchedulerMode mode);
SchedulerMode scheduler_mode_from_string(const std::string& text);

/// What an object publishes on the space: per path and particle, the cells it
/// occupies and the path amplitude. Momenta, spins and conserved quantities
/// are not part of it.
struct ObjectAdvert {
  ObjectId object;
  std::uint64_t version = 0;
  std::vector<ParticleInfo> particles;
  std::vector<Path> paths;  // states carry spacepoints only

  bool operator==(const ObjectAdvert&) const = default;
};

/// Builds the advertisement of an object.
ObjectAdvert advertise(const QuantumObject& obj, std::uint64_t version);

/// Shared space: per-cell occupancy index over advertisements plus the claim
/// registry. A claim is granted to at most one event per object at a time.
///
/// Between begin_tick and end_tick, publications are staged so every engine
/// of a tick observes the space as it was at the start of the tick.
class SpaceMediator {
 public:
  void publish(ObjectAdvert advert);
  void withdraw(ObjectId id);
  void begin_tick() { staging_ = true; }
  void end_tick();
  const ObjectAdvert* advert(ObjectId id) const;
  /// Adverts of other objects sharing at least one cell with `footprint`,
  /// in id order.
  std::vector<const ObjectAdvert*> overlapping(const std::vector<SpacePoint>& footprint, ObjectId self) const;

  bool claimed(ObjectId id) const { return claims_.contains(id.value); }
  /// Claims both objects atomically; false if either is already claimed.
  bool try_claim(ObjectId a, ObjectId b);
  void release(ObjectId a, ObjectId b);

  std::size_t cell_count() const { return cells_.size(); }

 private:
  void apply(ObjectAdvert advert);
  void erase(ObjectId id);

  std::map<std::uint64_t, ObjectAdvert> adverts_;
  std::map<SpacePoint, std::set<std::uint64_t>> cells_;
  std::set<std::uint64_t> claims_;
  bool staging_ = false;
  std::vector<ObjectAdvert> staged_;
};

/// Autonomous engine of one quantum object.
struct ObjectEngine {
  ObjectId id;
  RngState rng;
  std::uint64_t proper_steps = 0;  // local clock
  std::uint64_t version = 0;       // bumped on every mutation of `object`
  QuantumObject object;
  bool retired = false;
};

/// Interaction an engine wants to perform with an external object.
struct Proposal {
  ObjectId proposer;
  ObjectId partner;
  std::uint64_t proposer_version = 0;
  std::uint64_t partner_version = 0;
  InteractionCandidate candidate;  // side a = proposer, side b = partner
};

/// Conservation ledger entry of one performed interaction.
struct InteractionEvent {
  std::uint64_t tick = 0;
  ObjectId a;
  ObjectId b;
  SpacePoint position;
  InteractionCandidate candidate;
  ObjectId result;
  ConservedQuantities before;  // sum over the two interacting in-paths
  ConservedQuantities after;   // stored on the out collection

  bool balanced() const { return before == after; }
  bool operator==(const InteractionEvent&) const = default;
};

enum class StepStatus { Deferred, Retired, Proposed, Evolved };

struct StepResult {
  StepStatus status = StepStatus::Evolved;
  std::vector<Proposal> proposals;
};

struct RefinedConfig {
  std::uint64_t seed = 0;
  SchedulerMode mode = SchedulerMode::RoundRobin;
  std::uint64_t max_ticks = 1000;
};

struct RefinedResult {
  std::uint64_t ticks = 0;
  bool terminated = false;
  std::vector<InteractionRecord> records;
  std::vector<InteractionEvent> ledger;
  std::uint64_t rejected = 0;
  std::vector<QuantumObject> final_objects;
};

class RefinedRuntime {
 public:
  /// Spawns one engine per object of `initial`. Fields and space are shared
  /// read-only; the initial state's rng is not used.
  RefinedRuntime(const SystemState& initial, std::shared_ptr<const World> world, RefinedConfig cfg);

  /// Engine with an rng substream derived from (seed, object id). Throws
  /// InvariantError if the object already has an engine.
  ObjectEngine& spawn_object_engine(QuantumObject obj);
  ObjectEngine& spawn_object_engine(QuantumObject obj, RngState rng);

  /// One local cycle: apply pending collapse flags, look for candidates
  /// against the advertised external objects and propose one interaction per
  /// partner; with no candidates, evolve the paths and re-advertise.
  StepResult step_object(ObjectEngine& engine);

  /// Claims both participants, runs the interaction pipeline, spawns the
  /// result engine, flags the in-objects and writes the ledger. Returns the
  /// result id, or nullopt if the proposal is stale or a claim conflicts.
  std::optional<ObjectId> claim_and_interact(const Proposal& proposal);

  /// Runs ticks until the world's termination predicate holds or max_ticks.
  RefinedResult run();

  /// Current objects of all live engines, as a SystemState (read-only view
  /// for predicates and reporting).
  SystemState snapshot() const;

  ObjectEngine* engine(ObjectId id);
  std::size_t live_engines() const;
  const SpaceMediator& mediator() const { return mediator_; }
  SpaceMediator& mediator() { return mediator_; }
  const std::vector<InteractionEvent>& ledger() const { return ledger_; }
  std::uint64_t tick() const { return tick_; }

 private:
  void publish(ObjectEngine& e);
  void flag_consumed(ObjectEngine& e, std::size_t particle, std::size_t path);
  std::vector<ObjectId> schedule_order();
  std::vector<Proposal> arbitrate(std::vector<Proposal> proposals);

  Space space_;
  std::vector<FieldGrid> fields_;
  double delta_t_;
  std::shared_ptr<const World> world_;
  RefinedConfig cfg_;
  SpaceMediator mediator_;
  std::map<std::uint64_t, ObjectEngine> engines_;
  RngState scheduler_rng_;
  std::uint64_t next_id_ = 1;
  std::uint64_t tick_ = 0;
  std::uint64_t rejected_ = 0;
  std::vector<InteractionEvent> ledger_;
  std::vector<InteractionRecord> records_;
};

/// Convenience: construct a runtime and run it.
RefinedResult run_refined(const SystemState& initial, std::shared_ptr<const World> world, RefinedConfig cfg);

/// One JSON object per ledger entry.
void write_ledger_jsonl(const std::vector<InteractionEvent>& ledger, std::ostream& os);

}  // namespace qcausal::refined
