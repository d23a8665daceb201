#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "qcausal/error.hpp"
#include "qcausal/interaction.hpp"
#include "qcausal/lab.hpp"

using namespace qcausal;

namespace {

QuantumObject particle(std::uint64_t id, std::vector<SpacePoint> cells, const std::string& type = "electron",
                       Vec3 momentum = {0, 0, 0}) {
  return lab::make_particle(ObjectId{id}, type, 1.0, std::move(cells), momentum);
}

// Electron with one path per cell list, equal amplitudes.
QuantumObject multipath(std::uint64_t id, std::vector<std::vector<SpacePoint>> cells) {
  QuantumObject o;
  o.id = ObjectId{id};
  o.particles = {ParticleInfo{"electron", 1.0}};
  for (auto& c : cells) {
    PathState st;
    st.spacepoints = std::move(c);
    st.canonicalize();
    o.paths.push_back(Path{Amplitude{1.0, 0.0}, {st}});
  }
  return normalize_amplitudes(std::move(o));
}

std::vector<SpacePoint> range(int lo, int hi) {
  std::vector<SpacePoint> out;
  for (int x = lo; x <= hi; ++x) out.emplace_back(x);
  return out;
}

// Two electrons sharing two rows: row r has electron 0 at x = 2 + r and
// electron 1 at x = 12 + r, spins opposite.
QuantumObject entangled_pair(std::uint64_t id) {
  QuantumObject o;
  o.id = ObjectId{id};
  o.kind = ObjectKind::ParticleCollection;
  o.particles = {ParticleInfo{"electron", 1.0}, ParticleInfo{"electron", 1.0}};
  for (int r = 0; r < 2; ++r) {
    PathState a;
    a.spacepoints = {SpacePoint(2 + r)};
    a.momentum = {-1, 0, 0};
    a.spindir = 180.0 * r;
    PathState b;
    b.spacepoints = {SpacePoint(12 + r)};
    b.momentum = {1, 0, 0};
    b.spindir = 180.0 * r + 90.0;
    o.paths.push_back(Path{Amplitude{1.0 / std::sqrt(2.0), 0.0}, {a, b}});
  }
  o.conserved = path_contribution(o.particles[0], o.paths[0].states[0]) +
                path_contribution(o.particles[1], o.paths[0].states[1]);
  return o;
}

ConservedQuantities total(const SystemState& s) {
  ConservedQuantities c;
  for (const auto& o : s.objects) c += o.conserved;
  return c;
}

}  // namespace

TEST(Candidates, DisjointObjectsHaveNone) {
  EXPECT_TRUE(determine_potential_interactions(particle(1, {SpacePoint(1)}), particle(2, {SpacePoint(4)})).empty());
}

TEST(Candidates, SingleSharedCell) {
  const auto c = determine_potential_interactions(particle(1, {SpacePoint(3)}), particle(2, range(2, 4)));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].position, SpacePoint(3));
  EXPECT_DOUBLE_EQ(c[0].joint_weight, 1.0);
}

TEST(Candidates, TwoPathsAgainstCoveringPathMatchBruteForce) {
  const auto a = multipath(1, {{SpacePoint(3)}, {SpacePoint(9)}});
  const auto b = particle(2, range(3, 9));
  const auto c = determine_potential_interactions(a, b);

  // brute force: every lattice cell checked against both footprints
  std::vector<InteractionCandidate> expected;
  for (std::size_t pa = 0; pa < a.paths.size(); ++pa)
    for (int x = 0; x < 20; ++x)
      if (a.paths[pa].states[0].covers(SpacePoint(x)) && b.paths[0].states[0].covers(SpacePoint(x)))
        expected.push_back({SpacePoint(x), pa, 0, 0, 0, std::norm(a.paths[pa].amplitude)});
  ASSERT_EQ(c.size(), expected.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c[i].position, expected[i].position);
    EXPECT_EQ(c[i].path_a, expected[i].path_a);
    EXPECT_NEAR(c[i].joint_weight, expected[i].joint_weight, 1e-15);
  }
  EXPECT_EQ(c.front().position, SpacePoint(3));
  EXPECT_EQ(c.back().position, SpacePoint(9));
}

TEST(Candidates, FilterRestrictsParticlePairs) {
  const auto a = particle(1, {SpacePoint(3)});
  const auto b = particle(2, {SpacePoint(3)}, "photon");
  const auto none = [](const ParticleInfo& x, const ParticleInfo& y) { return x.type == y.type; };
  EXPECT_TRUE(determine_potential_interactions(a, b, none).empty());
  EXPECT_EQ(determine_potential_interactions(a, b).size(), 1u);
}

TEST(Candidates, SelfInteractionRejected) {
  const auto a = particle(1, {SpacePoint(3)});
  EXPECT_THROW(determine_potential_interactions(a, a), std::invalid_argument);
}

TEST(SelectInteraction, EqualWeightsSplitEvenly) {
  const auto a = multipath(1, {{SpacePoint(3)}, {SpacePoint(9)}});
  const auto c = determine_potential_interactions(a, particle(2, range(3, 9)));
  RngState rng(11);
  std::size_t first = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) first += &select_interaction(c, rng) == &c[0];
  EXPECT_NEAR(first / static_cast<double>(n), 0.5, 0.01);
}

TEST(SelectInteraction, WeightsFollowSquaredAmplitudes) {
  auto a = multipath(1, {{SpacePoint(3)}, {SpacePoint(9)}});
  a.paths[0].amplitude = 0.6;
  a.paths[1].amplitude = 0.8;
  const auto c = determine_potential_interactions(a, particle(2, range(3, 9)));
  RngState rng(12);
  std::size_t first = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) first += &select_interaction(c, rng) == &c[0];
  EXPECT_NEAR(first / static_cast<double>(n), 0.36, 0.01);
}

TEST(SelectInteraction, EmptyCandidatesRejected) {
  RngState rng(1);
  EXPECT_THROW(select_interaction({}, rng), std::invalid_argument);
}

TEST(InteractionObject, MomentaAddAndPositionIsPinned) {
  const auto a = particle(1, {SpacePoint(5)}, "electron", {2, 0, 0});
  const auto b = particle(2, range(4, 6), "electron", {-2, 0, 0});
  const auto c = determine_potential_interactions(a, b);
  ASSERT_EQ(c.size(), 1u);
  const auto ia = create_interaction_object(a, b, c[0], ObjectId{9});
  EXPECT_EQ(ia.object.kind, ObjectKind::InteractionObject);
  EXPECT_EQ(ia.position, SpacePoint(5));
  EXPECT_EQ(ia.object.paths[0].states[0].momentum[0], 2.0);
  EXPECT_EQ(ia.object.paths[0].states[1].momentum[0], -2.0);
  EXPECT_EQ(ia.object.conserved.momentum[0], 0.0);
  // additivity of the conserved quantities
  EXPECT_EQ(ia.object.conserved, a.conserved + b.conserved);
  for (const auto& st : ia.object.paths[0].states) EXPECT_EQ(st.spacepoints, std::vector<SpacePoint>{SpacePoint(5)});
}

TEST(InteractionObject, PositionOutsideOverlapRejected) {
  const auto a = particle(1, {SpacePoint(5)});
  const auto b = particle(2, range(4, 6));
  InteractionCandidate bad{SpacePoint(4), 0, 0, 0, 0, 1.0};
  EXPECT_THROW(create_interaction_object(a, b, bad, ObjectId{9}), InvariantError);
}

TEST(DropParticle, SoleObjectRemovesEverything) {
  SystemState s(Space(1, {10, 1, 1}, 1.0), 1.0, 0);
  s.add(particle(1, {SpacePoint(1)}));
  drop_particle(s, ObjectId{1});
  EXPECT_TRUE(s.objects.empty());
  EXPECT_EQ(s.dropped, std::vector<ObjectId>{ObjectId{1}});
}

TEST(DropParticle, OneOfThreeLeavesTheOthers) {
  SystemState s(Space(1, {10, 1, 1}, 1.0), 1.0, 0);
  for (std::uint64_t i = 1; i <= 3; ++i) s.add(particle(i, {SpacePoint(static_cast<int>(i))}));
  drop_particle(s, ObjectId{2});
  ASSERT_EQ(s.objects.size(), 2u);
  EXPECT_EQ(s.objects[0].id.value, 1u);
  EXPECT_EQ(s.objects[1].id.value, 3u);
}

TEST(DropParticle, SecondDropOfSameIdRejected) {
  SystemState s(Space(1, {10, 1, 1}, 1.0), 1.0, 0);
  s.add(particle(1, {SpacePoint(1)}));
  drop_particle(s, ObjectId{1});
  EXPECT_THROW(drop_particle(s, ObjectId{1}), std::out_of_range);
}

TEST(DropParticle, CollectionColumnRemovedAndPartnerReduced) {
  SystemState s(Space(1, {20, 1, 1}, 1.0), 1.0, 0);
  s.add(entangled_pair(1));
  drop_particle(s, ObjectId{1}, 0, 1);
  const auto& o = s.get(ObjectId{1});
  EXPECT_EQ(o.kind, ObjectKind::Particle);
  ASSERT_EQ(o.path_count(), 1u);
  EXPECT_EQ(o.paths[0].states[0].spacepoints, std::vector<SpacePoint>{SpacePoint(13)});
  EXPECT_DOUBLE_EQ(o.paths[0].states[0].spindir, 270.0);
}

TEST(EliminateUnaffectedPaths, KeepsOnlyTheInteractingRow) {
  const auto o = eliminate_unaffected_paths(entangled_pair(1), 0);
  ASSERT_EQ(o.path_count(), 1u);
  EXPECT_EQ(o.paths[0].states, entangled_pair(1).paths[0].states);
  EXPECT_NEAR(std::abs(o.paths[0].amplitude), 1.0, 1e-15);
}

namespace {

InteractionObject simple_interaction() {
  const auto a = particle(1, {SpacePoint(5)}, "electron", {1, 0, 0});
  const auto b = particle(2, {SpacePoint(5)}, "detector");
  return create_interaction_object(a, b, determine_potential_interactions(a, b).at(0), ObjectId{3});
}

OutcomeTable rows_at(std::vector<int> xs) {
  OutcomeTable t;
  t.particles = {ParticleInfo{"click", 1.0}};
  for (int x : xs) {
    PathState st;
    st.spacepoints = {SpacePoint(x)};
    t.rows.push_back(OutcomeRow{{st}, Amplitude{1.0, 0.0}});
  }
  t.normalize();
  return t;
}

}  // namespace

TEST(ProcessInteraction, SingleRowBecomesOnePath) {
  auto ia = simple_interaction();
  ia.outcome = rows_at({5});
  const auto out = process_interaction_object(ia, ObjectId{4});
  EXPECT_EQ(out.path_count(), 1u);
  EXPECT_EQ(out.conserved, ia.object.conserved);
}

TEST(ProcessInteraction, RowsBecomePathsWithTheirAmplitudes) {
  for (std::size_t n : {2u, 5u}) {
    auto ia = simple_interaction();
    std::vector<int> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(static_cast<int>(i));
    ia.outcome = rows_at(xs);
    const auto out = process_interaction_object(ia, ObjectId{4});
    ASSERT_EQ(out.path_count(), n);
    EXPECT_NEAR(out.total_weight(), 1.0, 1e-12);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(std::norm(out.paths[i].amplitude), 1.0 / n, 1e-12);
  }
}

TEST(ProcessInteraction, EmptyTableRejected) {
  auto ia = simple_interaction();
  ia.outcome.particles = {ParticleInfo{"click", 1.0}};
  EXPECT_THROW(process_interaction_object(ia, ObjectId{4}), InvariantError);
}

TEST(PerformInteraction, EntangledSourceReducesPartner) {
  for (std::size_t row = 0; row < 2; ++row) {
    SystemState s(Space(1, {20, 1, 1}, 1.0), 1.0, 0);
    s.add(entangled_pair(1));
    s.add(lab::make_particle(ObjectId{2}, lab::kDetector, 1000.0, {SpacePoint(2 + static_cast<int>(row))}));
    s.next_id = 3;
    const auto before = total(s);

    const auto c = determine_potential_interactions(s.get(ObjectId{1}), s.get(ObjectId{2}));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].path_a, row);
    const auto result = perform_interaction(s, ObjectId{1}, ObjectId{2}, c[0], lab::absorb_outcome);

    const auto& partner = s.get(ObjectId{1});
    ASSERT_EQ(partner.path_count(), 1u);
    EXPECT_EQ(partner.paths[0].states[0].spacepoints, std::vector<SpacePoint>{SpacePoint(12 + static_cast<int>(row))});
    EXPECT_EQ(s.find(ObjectId{2}), nullptr);
    EXPECT_EQ(s.get(result).particles[0].type, lab::kClick);

    const auto after = total(s);
    EXPECT_DOUBLE_EQ(after.energy, before.energy);
    EXPECT_EQ(after.momentum, before.momentum);
    EXPECT_EQ(after.angular_momentum, before.angular_momentum);
    ASSERT_EQ(s.interactions.size(), 1u);
    EXPECT_EQ(s.interactions[0].path_a, row);
  }
}

TEST(PerformInteraction, OutcomeDependsOnlyOnSelectedPath) {
  // same selected path state, different unselected alternatives: identical result
  auto a1 = multipath(1, {{SpacePoint(5)}, {SpacePoint(8)}});
  auto a2 = multipath(1, {{SpacePoint(5)}, {SpacePoint(1)}, {SpacePoint(0)}});
  std::map<int, QuantumObject> results;
  int k = 0;
  for (const auto& a : {a1, a2}) {
    SystemState s(Space(1, {10, 1, 1}, 1.0), 1.0, 0);
    s.add(a);
    s.add(lab::make_particle(ObjectId{2}, lab::kDetector, 1000.0, {SpacePoint(5)}));
    s.next_id = 3;
    const auto c = determine_potential_interactions(s.get(ObjectId{1}), s.get(ObjectId{2}));
    ASSERT_EQ(c.size(), 1u);
    results[k++] = s.get(perform_interaction(s, ObjectId{1}, ObjectId{2}, c[0], lab::absorb_outcome));
  }
  EXPECT_EQ(results[0], results[1]);
}

TEST(ResolveOutcome, OffsetsClampedAndNormalized) {
  auto ia = simple_interaction();
  OutcomeSpec spec;
  OutParticleSpec p{ParticleInfo{"click", 1.0}, {{0, 0, 0}}, 0, std::nullopt, std::nullopt};
  OutParticleSpec far = p;
  far.offsets = {{40, 0, 0}};
  spec.rows = {{{p}, Amplitude{1.0, 0.0}}, {{far}, Amplitude{1.0, 0.0}}};
  const Space space(1, {10, 1, 1}, 1.0);
  const auto t = resolve_outcome(spec, ia, space);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_NEAR(t.total_weight(), 1.0, 1e-12);
  EXPECT_EQ(t.rows[1].states[0].spacepoints, std::vector<SpacePoint>{SpacePoint(9)});
  EXPECT_EQ(t.rows[0].states[0].momentum[0], 1.0);
}
