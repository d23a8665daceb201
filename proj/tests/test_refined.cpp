#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "qcausal/error.hpp"
#include "qcausal/experiments.hpp"
#include "qcausal/lab.hpp"
#include "qcausal/refined.hpp"

using namespace qcausal;
using namespace qcausal::refined;

namespace {

// Electron and detector on a line; the electron reaches the detector cell.
SystemState line_state(int electron_x, int detector_x) {
  SystemState s(Space(1, {12, 1, 1}, 1.0), 1.0, 0);
  s.add(lab::make_particle(ObjectId{1}, lab::kElectron, 1.0, {SpacePoint(electron_x)}, {1, 0, 0}, 30.0));
  s.add(lab::make_particle(ObjectId{2}, lab::kDetector, 1000.0, {SpacePoint(detector_x)}));
  s.next_id = 3;
  return s;
}

std::shared_ptr<const World> line_world() {
  auto w = std::make_shared<World>();
  w->rules.push_back({lab::kElectron, lab::kDetector, lab::absorb_outcome});
  w->update = [](QuantumObject& o, const Space& space, std::span<const FieldGrid>) { lab::propagate(o, space); };
  w->termination = {"no-electrons",
                    [](const SystemState& s) { return !lab::any_particle_of_type(s, lab::kElectron); }};
  return w;
}

std::string ledger_bytes(const std::vector<InteractionEvent>& ledger) {
  std::ostringstream os;
  write_ledger_jsonl(ledger, os);
  return os.str();
}

}  // namespace

TEST(Spawn, OneEnginePerObjectWithDistinctStreams) {
  const auto s = line_state(0, 9);
  RefinedRuntime rt(s, line_world(), RefinedConfig{5});
  EXPECT_EQ(rt.live_engines(), 2u);
  auto* a = rt.engine(ObjectId{1});
  auto* b = rt.engine(ObjectId{2});
  ASSERT_NE(a, nullptr);
  ASSERT_NE(b, nullptr);
  EXPECT_NE(a->rng.next_unit(), b->rng.next_unit());

  RefinedRuntime again(s, line_world(), RefinedConfig{5});
  auto* a2 = again.engine(ObjectId{1});
  a2->rng.next_unit();
  EXPECT_EQ(a2->rng.next_unit(), a->rng.next_unit());
}

TEST(Spawn, DuplicateEngineRejected) {
  const auto s = line_state(0, 9);
  RefinedRuntime rt(s, line_world(), RefinedConfig{});
  EXPECT_THROW(rt.spawn_object_engine(s.objects[0]), InvariantError);
}

TEST(StepObject, FreeParticlePropagates) {
  RefinedRuntime rt(line_state(0, 9), line_world(), RefinedConfig{});
  auto* e = rt.engine(ObjectId{1});
  const auto r = rt.step_object(*e);
  EXPECT_EQ(r.status, StepStatus::Evolved);
  EXPECT_TRUE(r.proposals.empty());
  EXPECT_EQ(e->object.paths[0].states[0].spacepoints, std::vector<SpacePoint>{SpacePoint(1)});
  EXPECT_EQ(e->proper_steps, 1u);
}

TEST(StepObject, OverlapDetectedFromBothSides) {
  RefinedRuntime rt(line_state(4, 4), line_world(), RefinedConfig{});
  const auto ra = rt.step_object(*rt.engine(ObjectId{1}));
  const auto rb = rt.step_object(*rt.engine(ObjectId{2}));
  ASSERT_EQ(ra.status, StepStatus::Proposed);
  ASSERT_EQ(rb.status, StepStatus::Proposed);
  ASSERT_EQ(ra.proposals.size(), 1u);
  ASSERT_EQ(rb.proposals.size(), 1u);
  EXPECT_EQ(ra.proposals[0].partner, ObjectId{2});
  EXPECT_EQ(rb.proposals[0].partner, ObjectId{1});
  EXPECT_EQ(ra.proposals[0].candidate.position, rb.proposals[0].candidate.position);
}

TEST(StepObject, ClaimedObjectIsDeferred) {
  RefinedRuntime rt(line_state(0, 9), line_world(), RefinedConfig{});
  ASSERT_TRUE(rt.mediator().try_claim(ObjectId{1}, ObjectId{2}));
  auto* e = rt.engine(ObjectId{1});
  const auto before = e->object;
  EXPECT_EQ(rt.step_object(*e).status, StepStatus::Deferred);
  EXPECT_EQ(e->object, before);
  rt.mediator().release(ObjectId{1}, ObjectId{2});
  EXPECT_EQ(rt.step_object(*e).status, StepStatus::Evolved);
}

TEST(Claim, MutualExclusion) {
  SpaceMediator m;
  EXPECT_TRUE(m.try_claim(ObjectId{1}, ObjectId{2}));
  EXPECT_FALSE(m.try_claim(ObjectId{2}, ObjectId{3}));
  EXPECT_FALSE(m.try_claim(ObjectId{3}, ObjectId{1}));
  EXPECT_TRUE(m.try_claim(ObjectId{3}, ObjectId{4}));
  m.release(ObjectId{1}, ObjectId{2});
  EXPECT_TRUE(m.try_claim(ObjectId{2}, ObjectId{5}));
}

TEST(Claim, SingleCandidateRetiresTwoSpawnsOne) {
  RefinedRuntime rt(line_state(4, 4), line_world(), RefinedConfig{});
  const auto r = rt.step_object(*rt.engine(ObjectId{1}));
  ASSERT_EQ(r.proposals.size(), 1u);
  const auto result = rt.claim_and_interact(r.proposals[0]);
  ASSERT_TRUE(result.has_value());
  EXPECT_EQ(rt.live_engines(), 1u);
  EXPECT_EQ(rt.engine(*result)->object.particles[0].type, lab::kClick);
  ASSERT_EQ(rt.ledger().size(), 1u);
  EXPECT_TRUE(rt.ledger()[0].balanced());
  EXPECT_FALSE(rt.mediator().claimed(ObjectId{1}));

  // the competing proposal from the detector side is now stale
  EXPECT_FALSE(rt.claim_and_interact(Proposal{ObjectId{2}, ObjectId{1}, 0, 0, r.proposals[0].candidate}).has_value());
}

TEST(Ledger, BeforeSumsMatchIndependentComputation) {
  // electron p = 1, m = 1: E = 1.5; detector at rest, m = 1000
  RefinedRuntime rt(line_state(4, 4), line_world(), RefinedConfig{});
  const auto r = rt.step_object(*rt.engine(ObjectId{1}));
  rt.claim_and_interact(r.proposals.at(0));
  const auto& ev = rt.ledger().at(0);
  EXPECT_EQ(ev.before.energy, 1.5 + 1000.0);
  EXPECT_EQ(ev.before.momentum, (Vec3{1, 0, 0}));
  EXPECT_EQ(ev.after, ev.before);
}

TEST(Advert, CarriesPositionsAndAmplitudesOnly) {
  auto o = lab::make_particle(ObjectId{3}, lab::kElectron, 1.0, {SpacePoint(2)}, {1, 0, 0}, 45.0);
  o.paths[0].states[0].angular_momentum = {0, 0, 1};
  const auto ad = advertise(o, 7);
  EXPECT_EQ(ad.version, 7u);
  ASSERT_EQ(ad.paths.size(), 1u);
  const auto& st = ad.paths[0].states[0];
  EXPECT_EQ(st.spacepoints, o.paths[0].states[0].spacepoints);
  EXPECT_EQ(st.momentum, (Vec3{0, 0, 0}));
  EXPECT_EQ(st.angular_momentum, (Vec3{0, 0, 0}));
  EXPECT_EQ(st.spindir, 0.0);
  EXPECT_EQ(ad.paths[0].amplitude, o.paths[0].amplitude);
}

TEST(Mediator, StagedPublicationsAppearAfterTick) {
  SpaceMediator m;
  auto o = lab::make_particle(ObjectId{3}, lab::kElectron, 1.0, {SpacePoint(2)});
  m.begin_tick();
  m.publish(advertise(o, 1));
  EXPECT_EQ(m.advert(ObjectId{3}), nullptr);
  m.end_tick();
  ASSERT_NE(m.advert(ObjectId{3}), nullptr);
  EXPECT_EQ(m.overlapping({SpacePoint(2)}, ObjectId{9}).size(), 1u);
  EXPECT_TRUE(m.overlapping({SpacePoint(2)}, ObjectId{3}).empty());
  m.withdraw(ObjectId{3});
  EXPECT_TRUE(m.overlapping({SpacePoint(2)}, ObjectId{9}).empty());
}

TEST(Run, ElectronAbsorbedLikeCentralized) {
  const auto s = line_state(0, 7);
  const auto res = run_refined(s, line_world(), RefinedConfig{3});
  EXPECT_TRUE(res.terminated);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].position, SpacePoint(7));

  auto c = s;
  const auto world = line_world();
  const auto laws = centralized_laws(world);
  run(c, EngineConfig{1.0, 50, world->termination, 3, false}, laws);
  ASSERT_EQ(c.interactions.size(), 1u);
  EXPECT_EQ(c.interactions[0].position, res.records[0].position);
  EXPECT_EQ(c.interactions[0].step, res.records[0].step);
}

TEST(Run, BellLedgerBalancedAndDeterministic) {
  const auto initial = bell_initial_state(0.0, 30.0);
  const auto world = bell_world(SpinPolicy::Uniform, 0.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = run_refined(initial, world, RefinedConfig{seed, SchedulerMode::RoundRobin, spin_lab::kMaxSteps});
    const auto b = run_refined(initial, world, RefinedConfig{seed, SchedulerMode::RoundRobin, spin_lab::kMaxSteps});
    EXPECT_TRUE(a.terminated);
    EXPECT_EQ(a.ledger.size(), 3u);  // source emission plus two detector clicks
    for (const auto& ev : a.ledger) EXPECT_TRUE(ev.balanced());
    EXPECT_EQ(ledger_bytes(a.ledger), ledger_bytes(b.ledger));
    EXPECT_EQ(a.records, b.records);
  }
}

TEST(Run, EqualAnglesNeverDifferUnderRefinedRuntime) {
  BellConfig cfg;
  cfg.angle_a = 40.0;
  cfg.angle_b = 40.0;
  cfg.run.trials = 2000;
  cfg.run.seed = 17;
  cfg.run.threads = 1;
  cfg.run.runtime = Runtime::Refined;
  EXPECT_EQ(run_bell_experiment(cfg).differing(), 0u);
  cfg.run.scheduler = SchedulerMode::Randomized;
  EXPECT_EQ(run_bell_experiment(cfg).differing(), 0u);
}

TEST(Run, SchedulerModesAgreeStatistically) {
  BellConfig cfg;
  cfg.angle_b = 30.0;
  cfg.run.trials = 20000;
  cfg.run.seed = 18;
  cfg.run.runtime = Runtime::Refined;
  const auto rr = run_bell_experiment(cfg);
  cfg.run.scheduler = SchedulerMode::Randomized;
  cfg.run.seed = 19;
  const auto rnd = run_bell_experiment(cfg);
  // 3 sigma on the difference of two binomial estimates of P(same) = 0.75
  const double sigma = std::sqrt(2.0 * 0.75 * 0.25 / 20000.0);
  EXPECT_LT(std::abs(rr.p_same() - rnd.p_same()), 3.0 * sigma);
}

TEST(Scheduler, NamesRoundTrip) {
  EXPECT_EQ(scheduler_mode_from_string(to_string(SchedulerMode::RoundRobin)), SchedulerMode::RoundRobin);
  EXPECT_EQ(scheduler_mode_from_string(to_string(SchedulerMode::Randomized)), SchedulerMode::Randomized);
  EXPECT_THROW(scheduler_mode_from_string("chaotic"), ConfigError);
}
