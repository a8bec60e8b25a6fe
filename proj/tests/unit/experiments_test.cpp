#include "waistlab/config.hpp"

#include <gtest/gtest.h>

using namespace waistlab;

namespace {

OptimizerConfig small_optimizer() {
  OptimizerConfig o;
  o.restarts = 8;
  o.seed_points = 300;
  o.max_net_size = 300;
  return o;
}

BodySpec ball_spec(int n, double r = 1.0) { return BodySpec{spec::Ball{n, r}}; }

}  // namespace

TEST(Schedule, Examples) {
  BoundConstants c;
  c.a_frac = 0.1;
  ScheduleParams s = theorem_schedule(40, 10, c);
  EXPECT_NEAR(s.eps_K, std::exp(-4.0), 1e-15);
  EXPECT_NEAR(s.delta_K, std::sqrt(1 - std::exp(-8.0) / 4), 1e-15);
  EXPECT_NEAR(s.eps_L, std::exp(-20.0), 1e-22);
  EXPECT_NEAR(s.delta_L, std::sqrt(std::exp(-40.0) / 40), 1e-25);
  EXPECT_GT(s.guaranteed_radius, 0.0);
  EXPECT_NEAR(s.guaranteed_radius, 1 - s.delta_K - 2 * s.delta_L, 1e-15);
}

TEST(Schedule, Errors) {
  BoundConstants c;
  c.a_frac = 1.0 / 40;
  EXPECT_THROW(theorem_schedule(100, 10, c), InfeasibleConfiguration);
  EXPECT_THROW(theorem_schedule(10, 11), DomainError);
  EXPECT_THROW(theorem_schedule(10, 0), DomainError);
  // Frozen a = 1/33 needs k ≥ 33.
  EXPECT_THROW(theorem_schedule(40, 10), InfeasibleConfiguration);
  EXPECT_NO_THROW(theorem_schedule(66, 33));
}

TEST(CoreLemma, BallsAlwaysSucceed) {
  CoreLemmaConfig c;
  c.K = ball_spec(3);
  c.L = ball_spec(3);
  c.trials = 20;
  c.sigma_samples = 20000;
  c.optimizer = small_optimizer();
  ExperimentReport r = run_core_lemma(c, 1);
  ASSERT_EQ(r.trials.rows.size(), 20u);
  for (double s : r.trials.values("success")) EXPECT_EQ(s, 1.0);
  EXPECT_EQ(r.summary["failure_rate"]["value"].get<double>(), 0.0);
  EXPECT_TRUE(r.summary["bound_holds"].get<bool>());
}

TEST(CoreLemma, ZeroTrialsIsEmpty) {
  CoreLemmaConfig c;
  c.K = ball_spec(3);
  c.L = ball_spec(3);
  c.trials = 0;
  ExperimentReport r = run_core_lemma(c, 1);
  EXPECT_TRUE(r.trials.rows.empty());
  EXPECT_FALSE(r.trials.columns.empty());
}

TEST(TwoBodies, BallsGiveDiameterTwo) {
  TwoBodiesConfig c;
  c.n = 6;
  c.k = 3;
  c.trials = 10;
  c.construction = "explicit";
  c.K = ball_spec(6);
  c.L = ball_spec(6);
  c.optimizer = small_optimizer();
  ExperimentReport r = run_two_bodies(c, 5);
  for (double d : r.trials.values("diameter")) EXPECT_NEAR(d, 2.0, 1e-12);
  EXPECT_NEAR(r.summary["C_fit"].get<double>(), std::pow(2.0, 3.0 / 6), 1e-12);
}

TEST(TwoBodies, CylinderDeterministicAndBounded) {
  TwoBodiesConfig c;
  c.n = 6;
  c.k = 3;
  c.trials = 12;
  c.optimizer = small_optimizer();
  ExperimentReport a = run_two_bodies(c, 77);
  ExperimentReport b = run_two_bodies(c, 77);
  EXPECT_EQ(trials_csv(a.trials), trials_csv(b.trials));
  EXPECT_EQ(a.summary["truncated_trials"].get<std::size_t>(), 0u);
  for (double d : a.trials.values("diameter")) {
    EXPECT_TRUE(std::isfinite(d));
    EXPECT_GE(d, 1.0 - 1e-9);  // both bodies contain the core ball of radius 0.5
  }
  ExperimentReport other = run_two_bodies(c, 78);
  EXPECT_NE(trials_csv(a.trials), trials_csv(other.trials));
}

TEST(TwoBodies, SweepSummaryPerPair) {
  TwoBodiesConfig c;
  c.sweep = {{4, 2}, {6, 3}};
  c.trials = 3;
  c.optimizer = small_optimizer();
  ExperimentReport r = run_two_bodies(c, 3);
  EXPECT_EQ(r.trials.rows.size(), 6u);
  ASSERT_TRUE(r.summary.contains("sweep"));
  EXPECT_EQ(r.summary["sweep"].size(), 2u);
}

TEST(TwoBodies, UnboundedSectionIsHypothesisFailure) {
  TwoBodiesConfig c;
  c.n = 4;
  c.k = 2;
  c.trials = 2;
  c.construction = "explicit";
  spec::TruncatedCylinder cyl;
  cyl.dim = 4;
  cyl.core = std::make_shared<const BodySpec>(ball_spec(1, 0.5));
  c.K = BodySpec{cyl};
  c.L = ball_spec(4);
  c.optimizer = small_optimizer();
  // The declared section (first two coordinates) contains the truncated direction.
  EXPECT_THROW(run_two_bodies(c, 1), HypothesisFailure);
}

TEST(Sections, BallAndCube) {
  SectionsConfig c;
  c.K = ball_spec(5);
  c.k_exist = 2;
  c.k_query = {2, 3};
  c.trials = 5;
  c.optimizer = small_optimizer();
  ExperimentReport r = run_sections(c, 2);
  for (double d : r.trials.values("diameter")) EXPECT_NEAR(d, 2.0, 1e-12);

  c.K = BodySpec{spec::Cube{4, 1.0}};
  c.k_query = {2};
  c.trials = 20;
  ExperimentReport q = run_sections(c, 3);
  for (double d : q.trials.values("diameter")) {
    EXPECT_GE(d, 2.0 - 1e-9);
    EXPECT_LE(d, 4.0 + 1e-9);
  }
}

TEST(HigherSphere, EqualDimensionsAgree) {
  HigherSphereConfig c;
  c.set_type = "caps";
  c.caps = {{unit_vector(3, 0), 0.3}};
  c.n = 2;
  c.m = 2;
  c.theta = 0.2;
  c.samples = 100000;
  c.claim_samples = 2000;
  ExperimentReport r = run_higher_sphere(c, 4);
  ASSERT_EQ(r.trials.rows.size(), 1u);
  double lhs = r.trials.values("lhs")[0], rhs = r.trials.values("rhs")[0];
  double se = std::hypot(r.trials.values("lhs_se")[0], r.trials.values("rhs_se")[0]);
  EXPECT_NEAR(lhs, rhs, 4 * se);
  EXPECT_EQ(r.trials.values("claim_violations")[0], 0.0);
}

TEST(HigherSphere, SubsphereMatchesExact) {
  HigherSphereConfig c;
  c.set_type = "subsphere";
  c.subsphere_dim = 1;
  c.n = 3;
  c.m = 6;
  c.theta = 0.3;
  c.samples = 200000;
  c.claim_samples = 2000;
  ExperimentReport r = run_higher_sphere(c, 5);
  EXPECT_NEAR(r.trials.values("lhs")[0], r.trials.values("lhs_exact")[0], 4 * r.trials.values("lhs_se")[0]);
  EXPECT_NEAR(r.trials.values("rhs")[0], r.trials.values("rhs_exact")[0], 4 * r.trials.values("rhs_se")[0]);
  EXPECT_EQ(r.trials.values("holds")[0], 1.0);
}

TEST(Projection, EmbeddedBallAndBall) {
  ProjectionConfig c;
  spec::Product p;
  p.low = std::make_shared<const BodySpec>(ball_spec(2));
  p.dim = 4;
  c.K = BodySpec{p};
  c.k = 2;
  c.eps = {0.1, 0.3};
  c.samples = 200000;
  c.waist_samples = 200;
  ExperimentReport r = run_projection(c, 6);
  for (const auto& row : r.trials.rows) {
    EXPECT_NEAR(row[r.trials.column("lhs")], row[r.trials.column("equality_value")], 4 * row[r.trials.column("lhs_se")]);
    EXPECT_EQ(row[r.trials.column("holds")], 1.0);
  }
  c.K = ball_spec(4);
  ExperimentReport b = run_projection(c, 7);
  for (double v : b.trials.values("lhs")) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(b.summary["waist"]["containment_violations"].get<int>(), 0);
}

TEST(GlobalVr, BallIsItsOwnEnvelope) {
  GlobalVrConfig c;
  c.K = ball_spec(4);
  c.k = 2;
  c.trials = 3;
  c.volume_samples = 20000;
  c.optimizer = small_optimizer();
  ExperimentReport r = run_global_vr(c, 8);
  EXPECT_NEAR(r.summary["volume_ratio"]["value"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(r.summary["base_2A"].get<double>(), 2.0, 1e-12);
  EXPECT_TRUE(r.summary["rogers_shephard_holds"].get<bool>());
  EXPECT_EQ(r.trials.rows.size(), 3u);
}

TEST(Config, RoundTripAndUnknownKey) {
  const std::string text = R"({
  "n": 6,
  "k": 3,
  "trials": 4,
  "dimm": 2
})";
  try {
    parse_config(text, "two-bodies", "cfg.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "dimm");
    EXPECT_EQ(e.line(), 5u);
    EXPECT_NE(std::string(e.what()).find("cfg.json:5"), std::string::npos);
  }
  ExperimentConfig c = parse_config(R"({"n": 6, "k": 3, "trials": 4})", "two-bodies");
  json j = to_json(c);
  EXPECT_EQ(to_json(parse_config(j.dump(), "two-bodies")), j);
  EXPECT_THROW(parse_config("{\"n\": 6,\n \"k\": }", "two-bodies"), ConfigError);
  EXPECT_THROW(parse_config(R"({"schedule": {"n": 100, "k": 10, "a_frac": 0.025}})", "two-bodies"),
               InfeasibleConfiguration);
}
