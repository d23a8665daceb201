#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "qcausal/error.hpp"
#include "qcausal/experiments.hpp"
#include "qcausal/lab.hpp"

using namespace qcausal;

namespace {

TrialOptions opts(std::uint64_t trials, std::uint64_t seed) {
  TrialOptions o;
  o.trials = trials;
  o.seed = seed;
  o.threads = 1;
  return o;
}

// Independent closed form: P(up) = cos^2(delta), computed from radians here.
double cos2(double deg) {
  const double c = std::cos(deg * std::numbers::pi / 180.0);
  return c * c;
}

}  // namespace

TEST(SpinProbability, TableValues) {
  EXPECT_EQ(lab::spin_probability(0.0), 1.0);
  EXPECT_NEAR(lab::spin_probability(30.0), 0.75, 1e-15);
  EXPECT_NEAR(lab::spin_probability(60.0), 0.25, 1e-15);
  EXPECT_EQ(lab::spin_probability(90.0), 0.0);
}

TEST(SpinProbability, MatchesCosSquaredEverywhere) {
  for (double d = -720.0; d <= 720.0; d += 7.5) EXPECT_NEAR(lab::spin_probability(d), cos2(d), 1e-12) << d;
}

TEST(SingleSternGerlach, ThirtyDegreesGivesThreeQuarters) {
  SingleSpinConfig cfg;
  cfg.spindir = 30.0;
  cfg.angle = 0.0;
  cfg.run = opts(40000, 5);
  const auto s = run_single_stern_gerlach(cfg);
  EXPECT_EQ(s.trials, 40000u);
  EXPECT_NEAR(s.frequency(), 0.75, 0.015);
}

TEST(SingleSternGerlach, AlignedAndOrthogonalAreCertain) {
  SingleSpinConfig cfg;
  cfg.run = opts(500, 6);
  cfg.spindir = 45.0;
  cfg.angle = 45.0;
  EXPECT_EQ(run_single_stern_gerlach(cfg).case1, 500u);
  cfg.angle = 135.0;
  EXPECT_EQ(run_single_stern_gerlach(cfg).case1, 0u);
}

TEST(Bell, EqualAnglesNeverDiffer) {
  for (double angle : {0.0, 30.0, 77.0}) {
    BellConfig cfg;
    cfg.angle_a = angle;
    cfg.angle_b = angle;
    cfg.run = opts(5000, 8);
    const auto s = run_bell_experiment(cfg);
    EXPECT_EQ(s.trials, 5000u);
    EXPECT_EQ(s.differing(), 0u);
  }
}

TEST(Bell, FixedSpinAlignedIsAlwaysUpUp) {
  BellConfig cfg;
  cfg.policy = SpinPolicy::Fixed;
  cfg.fixed_spindir = 0.0;
  cfg.run = opts(2000, 9);
  const auto s = run_bell_experiment(cfg);
  EXPECT_EQ(s.n(true, true), 2000u);
}

TEST(Bell, ThirtyDegreeCorrelation) {
  BellConfig cfg;
  cfg.angle_a = 0.0;
  cfg.angle_b = 30.0;
  cfg.run = opts(100000, 10);
  const auto s = run_bell_experiment(cfg);
  EXPECT_NEAR(s.p_same(), cos2(30.0), 0.01);
  EXPECT_NEAR(s.correlation(), std::cos(2.0 * 30.0 * std::numbers::pi / 180.0), 0.02);
  // uniform source: each wing alone is a fair coin
  EXPECT_NEAR(s.marginal_a_up(), 0.5, 0.01);
  EXPECT_NEAR(s.marginal_b_up(), 0.5, 0.01);
}

TEST(Bell, ResultIndependentOfThreadCount) {
  BellConfig cfg;
  cfg.angle_b = 45.0;
  cfg.run = opts(3000, 11);
  const auto one = run_bell_experiment(cfg);
  cfg.run.threads = 4;
  EXPECT_EQ(run_bell_experiment(cfg), one);
}

TEST(Unentangled, ProductOfSingleProbabilities) {
  UnentangledConfig cfg;
  cfg.spindir_1 = 30.0;
  cfg.spindir_2 = 60.0;
  cfg.run = opts(40000, 12);
  const auto s = run_unentangled_pair(cfg);
  EXPECT_NEAR(s.frequency(true, true), 0.75 * 0.25, 0.01);
}

TEST(Unentangled, CertainAndImpossibleCases) {
  UnentangledConfig cfg;
  cfg.run = opts(500, 13);
  EXPECT_EQ(run_unentangled_pair(cfg).n(true, true), 500u);
  cfg.spindir_1 = 90.0;
  cfg.spindir_2 = 20.0;
  EXPECT_EQ(run_unentangled_pair(cfg).n(true, true), 0u);
}

TEST(EvaluateBell, Examples) {
  EXPECT_DOUBLE_EQ(evaluate_bell(0.0, 0.0, 0.0, BellForm::Anticorrelated), 1.0);
  EXPECT_DOUBLE_EQ(evaluate_bell(0.5, -0.5, 0.5, BellForm::Identical), -0.5);
  EXPECT_DOUBLE_EQ(evaluate_bell(1.0, 1.0, 1.0, BellForm::Identical), 0.0);
}

TEST(Lhv, IdenticalFormNeverViolated) {
  const auto r = lhv_oracle({0.0, 30.0, 60.0}, BellForm::Identical);
  ASSERT_EQ(r.strategies.size(), 64u);
  EXPECT_EQ(r.admissible_count, 8u);
  EXPECT_EQ(r.classical_max, 0.0);
  for (const auto& s : r.strategies)
    if (s.admissible) {
      EXPECT_LE(s.functional, 0.0);
    }
}

TEST(Lhv, AnticorrelatedFormHasEqualityCases) {
  const auto r = lhv_oracle({0.0, 30.0, 60.0}, BellForm::Anticorrelated);
  EXPECT_EQ(r.admissible_count, 8u);
  EXPECT_EQ(r.classical_max, 0.0);
  std::size_t equal = 0;
  for (const auto& s : r.strategies) equal += s.admissible && s.functional == 0.0;
  EXPECT_GT(equal, 0u);
}

TEST(Lhv, EnumerationCoversEveryAssignmentOnce) {
  const auto r = lhv_oracle({0.0, 30.0, 60.0}, BellForm::Identical);
  std::set<std::pair<std::array<int, 3>, std::array<int, 3>>> seen;
  for (const auto& s : r.strategies) seen.insert({s.wing1, s.wing2});
  EXPECT_EQ(seen.size(), 64u);
  // without the perfect-correlation constraint the functional can exceed 0
  EXPECT_GT(r.unconstrained_max, 0.0);
}

TEST(BellScan, ModelViolatesIdenticalForm) {
  const auto scan = run_bell_scan({0.0, 30.0, 60.0}, BellForm::Identical, SpinPolicy::Uniform, opts(30000, 14));
  EXPECT_NEAR(scan.margin, -0.5, 0.08);
  EXPECT_NEAR(scan.ac.correlation(), -0.5, 0.03);
}

TEST(SpinLab, FormAndRuntimeNamesRoundTrip) {
  EXPECT_EQ(bell_form_from_string(to_string(BellForm::Identical)), BellForm::Identical);
  EXPECT_EQ(bell_form_from_string(to_string(BellForm::Anticorrelated)), BellForm::Anticorrelated);
  EXPECT_EQ(runtime_from_string(to_string(Runtime::Refined)), Runtime::Refined);
  EXPECT_THROW(bell_form_from_string("sideways"), ConfigError);
}
