#include "waistlab/body_spec_json.hpp"
#include "waistlab/estimators.hpp"
#include "waistlab/sphere_measure.hpp"

#include <gtest/gtest.h>

using namespace waistlab;

namespace {

BodyOracle cube(int n, double a) { return construct_body(BodySpec{spec::Cube{n, a}}); }
BodyOracle cross(int n, double r) { return construct_body(BodySpec{spec::CrossPolytope{n, r}}); }

BodyOracle segment3() {
  return construct_body(BodySpec{spec::VertexPolytope{{{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}}, true}});
}

Mat rot2(double a) {
  Mat R(2, 2);
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return R;
}

// Dense angular grid of max_φ min(r_K, r_UL) in the plane.
double grid_diameter(const BodyOracle& K, const BodyOracle& UL) {
  double best = 0;
  for (int i = 0; i < 200000; ++i) {
    double a = kPi * i / 200000;
    Vec u(2);
    u << std::cos(a), std::sin(a);
    best = std::max(best, std::min(K.radial(u), UL.radial(u)));
  }
  return 2 * best;
}

}  // namespace

TEST(McSigmaBody, Examples) {
  EXPECT_EQ(mc_sigma_body(ball(3), 0.1, 10000, 1).value, 1.0);
  BodyOracle origin = make_body(std::make_shared<models::PointModel>(3));
  EXPECT_EQ(mc_sigma_body(origin, 0.5, 10000, 1).value, 0.0);
  Estimate s = mc_sigma_body(segment3(), 0.5, 1000000, 2);
  double exact = 1 - std::cos(kPi / 6);
  EXPECT_NEAR(exact, sigma_exact(2, 0, std::asin(0.5)), 1e-14);
  EXPECT_NEAR(s.value, exact, 3 * s.standard_error);
  EXPECT_THROW(mc_sigma_body(ball(3), -0.1, 10, 1), DomainError);
}

TEST(McSigmaBody, EmbeddedBallEqualityCase) {
  // B₂ᵏ ⊂ Rⁿ: the ε-neighborhood meets the sphere in a band around the subspace.
  for (auto [n, k] : {std::pair{4, 2}, {6, 3}}) {
    spec::Product p;
    p.low = make_spec(spec::Ball{k, 1.0});
    p.dim = n;
    BodyOracle K = construct_body(BodySpec{p});
    Estimate s = mc_sigma_body(K, 0.3, 200000, 3);
    EXPECT_NEAR(s.value, sigma_exact(n - 1, k - 1, std::asin(0.3)), 4 * s.standard_error);
  }
}

TEST(Covering, Examples) {
  EXPECT_EQ(covering_number_upper(ball(3), ball(3)).count, 1u);
  EXPECT_EQ(covering_number_upper(ball(1), ball(1, 0.5)).count, 2u);
  CoveringResult r = covering_number_upper(ball(2), ball(2, 0.5));
  EXPECT_LE(r.count, 25u);
  ASSERT_TRUE(r.volumetric_bound.has_value());
  EXPECT_LE(static_cast<double>(r.count), *r.volumetric_bound);
  EXPECT_EQ(r.centers.size(), r.count);
  EXPECT_THROW(covering_number_upper(ball(2), segment3()), DimensionMismatch);
}

TEST(Covering, CentersCoverProbes) {
  BodyOracle K = cube(2, 0.4);
  CoveringOptions opt;
  opt.seed = 5;
  CoveringResult r = covering_number_upper(ball(2), K, opt);
  Rng rng = make_rng(6, 0);
  int uncovered = 0;
  for (int i = 0; i < 2000; ++i) {
    Vec x = uniform_in_ball(2, 1.0, rng);
    bool hit = false;
    for (const auto& c : r.centers) hit = hit || K.membership(x - c);
    uncovered += !hit;
  }
  // Probe-based: a handful of misses near the boundary is allowed, not a gap.
  EXPECT_LE(uncovered, 20);
}

TEST(EntropyBound, Examples) {
  EXPECT_DOUBLE_EQ(entropy_bound(ball(3), 1.0), 8.0);
  double s = 1 - std::cos(kPi / 6);
  EXPECT_NEAR(entropy_bound(3, s), 59.7, 0.05);
  double big = entropy_bound(3, 1e-9);
  EXPECT_TRUE(std::isfinite(big));
  EXPECT_NEAR(big, 8e9, 1);
  EXPECT_THROW(entropy_bound(3, 0.0), DomainError);
  EXPECT_THROW(entropy_bound(3, 1.5), DomainError);
}

TEST(EntropyBound, HoldsForCatalogBodies) {
  std::vector<BodyOracle> bodies{cube(2, 0.6), cross(3, 1.2), ball(3, 0.8), cube(4, 0.9)};
  std::uint64_t seed = 20;
  for (const auto& K : bodies) {
    Estimate s = mc_sigma_body(K, 0.0, 200000, ++seed);
    if (s.value - 3 * s.standard_error <= 0) continue;
    CoveringOptions opt;
    opt.seed = ++seed;
    auto N = covering_number_upper(ball(K.dim()), K, opt).count;
    EXPECT_LE(static_cast<double>(N), entropy_bound(K.dim(), s.value - 3 * s.standard_error)) << K.name();
  }
}

TEST(Diameter, Examples) {
  Mat I3 = Mat::Identity(3, 3);
  EXPECT_NEAR(diameter_of_intersection(ball(3), ball(3), haar_rotation(3, 1).matrix).diameter, 2.0, 1e-12);
  DiameterResult c = diameter_of_intersection(cube(3, 1.0), cube(3, 1.0), I3);
  EXPECT_NEAR(c.diameter, 2 * std::sqrt(3.0), 1e-6);
  EXPECT_FALSE(c.truncation_active);
  BodyOracle B1 = cross(2, 1.0);
  DiameterResult d = diameter_of_intersection(B1, B1, rot2(kPi / 4));
  EXPECT_NEAR(d.diameter, 2 / (std::cos(kPi / 8) + std::sin(kPi / 8)), 1e-6);
  EXPECT_NEAR(d.diameter, grid_diameter(B1, rotate_body(B1, rot2(kPi / 4))), 1e-6);
  EXPECT_NEAR(d.diameter, 1.53073, 1e-5);
  EXPECT_LE(d.diameter, d.upper + 1e-12);
}

TEST(Inclusion, Examples) {
  Mat I2 = Mat::Identity(2, 2);
  EXPECT_NEAR(inclusion_radius(ball(3), ball(3), haar_rotation(3, 2).matrix).radius, 2.0, 1e-12);
  EXPECT_NEAR(inclusion_radius(cube(3, 1.0), cube(3, 1.0), Mat::Identity(3, 3)).radius, 2.0, 1e-6);
  InclusionResult r = inclusion_radius(cross(2, 1.0), cross(2, 1.0), I2);
  EXPECT_NEAR(r.radius, std::sqrt(2.0), 1e-6);
  EXPECT_GE(r.radius, r.lower - 1e-12);
}

TEST(Section, Examples) {
  EXPECT_NEAR(section_diameter(cube(3, 1.0), Subspace::coordinate(3, 2)).diameter, 2 * std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(section_diameter(ball(5), random_subspace(5, 3, 4)).diameter, 2.0, 1e-12);
  BodyOracle E = construct_body(BodySpec{spec::Ellipsoid{{1.0, 2.0, 0.5}}});
  Subspace E2 = Subspace::from_rows(unit_vector(3, 1).transpose());
  EXPECT_NEAR(section_diameter(E, E2).diameter, 4.0, 1e-12);
}

TEST(Estimators, InvariantUnderCommonRotation) {
  const int n = 3;
  BodyOracle K = cube(n, 1.0);
  BodyOracle L = construct_body(BodySpec{spec::Ellipsoid{{1.5, 0.7, 1.0}}});
  Mat U = haar_rotation(n, 31).matrix;
  Mat V = haar_rotation(n, 32).matrix;
  double d0 = diameter_of_intersection(K, L, U).diameter;
  double d1 = diameter_of_intersection(rotate_body(K, V), rotate_body(L, V), V * U * V.transpose()).diameter;
  EXPECT_NEAR(d1, d0, 1e-6 * d0);
  double r0 = inclusion_radius(K, L, U).radius;
  double r1 = inclusion_radius(rotate_body(K, V), rotate_body(L, V), V * U * V.transpose()).radius;
  EXPECT_NEAR(r1, r0, 1e-6 * r0);
}

TEST(Estimators, MonotoneUnderEnlargement) {
  const int n = 3;
  Mat U = haar_rotation(n, 41).matrix;
  BodyOracle K = cross(n, 1.0);
  BodyOracle L = cube(n, 0.7);
  BodyOracle Kb = cross(n, 1.3);
  BodyOracle Lb = cube(n, 0.9);
  double d = diameter_of_intersection(K, L, U).diameter;
  EXPECT_GE(diameter_of_intersection(Kb, L, U).diameter, d - 1e-9);
  EXPECT_GE(diameter_of_intersection(K, Lb, U).diameter, d - 1e-9);
  double r = inclusion_radius(K, L, U).radius;
  EXPECT_GE(inclusion_radius(Kb, L, U).radius, r - 1e-9);
  EXPECT_GE(inclusion_radius(K, Lb, U).radius, r - 1e-9);
}
