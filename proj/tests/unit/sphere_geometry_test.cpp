#include "waistlab/body_spec_json.hpp"
#include "waistlab/sphere_geometry.hpp"

#include <gtest/gtest.h>

using namespace waistlab;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

BodyOracle slab_body() {
  spec::SlabIntersection s;
  s.slabs = {{{1.0, 0.0}, 1.0}, {{-1.0, 1.0}, 0.5}};
  return construct_body(BodySpec{s});
}

}  // namespace

TEST(Haar, OrthogonalAndDeterministic) {
  for (int n : {1, 2, 5, 16, 40}) {
    Rotation U = haar_rotation(n, 7);
    EXPECT_LE(orthogonality_residual(U.matrix), 1e-10);
    EXPECT_LE(U.residual, 1e-10);
    EXPECT_EQ(U.matrix, haar_rotation(n, 7).matrix);
  }
  EXPECT_NE(haar_rotation(4, 7).matrix, haar_rotation(4, 8).matrix);
}

TEST(Haar, MeanOfFirstDiagonalEntryIsZero) {
  Rng rng = make_rng(1, 0);
  const int N = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < N; ++i) {
    double v = haar_rotation(3, rng).matrix(0, 0);
    s += v;
    s2 += v * v;
  }
  double mean = s / N;
  double se = std::sqrt((s2 / N - mean * mean) / N);
  EXPECT_LE(std::fabs(mean), 3 * se);
  // E U₁₁² = 1/n.
  EXPECT_NEAR(s2 / N, 1.0 / 3, 3 * std::sqrt(1.0 / N));
}

TEST(Haar, LeftInvariance) {
  // ⟨VUe₁, w⟩ vs ⟨Ue₁, w⟩: both should have mean 0 and second moment 1/n.
  const int n = 4;
  const int N = 50000;
  Mat V = haar_rotation(n, 99).matrix;
  Vec w = vec({0.5, -0.5, 0.5, 0.5});
  Rng r1 = make_rng(2, 0), r2 = make_rng(3, 0);
  double m1 = 0, m2 = 0, q1 = 0, q2 = 0;
  for (int i = 0; i < N; ++i) {
    double a = haar_rotation(n, r1).matrix.col(0).dot(w);
    double b = (V * haar_rotation(n, r2).matrix).col(0).dot(w);
    m1 += a;
    m2 += b;
    q1 += a * a;
    q2 += b * b;
  }
  m1 /= N, m2 /= N, q1 /= N, q2 /= N;
  double se_mean = std::sqrt((q1 + q2) / N);
  EXPECT_LE(std::fabs(m1 - m2), 3 * se_mean);
  // Var of X² is ≤ E X⁴ ≤ 3/n² for a coordinate of a uniform point.
  EXPECT_LE(std::fabs(q1 - q2), 3 * std::sqrt(2 * 3.0 / (n * n) / N));
}

TEST(RandomSubspace, FrameAndTraceIdentity) {
  Subspace F = random_subspace(5, 5, 4);
  EXPECT_LE(F.gram_residual(), 1e-10);
  EXPECT_EQ(random_subspace(5, 2, 4).basis, random_subspace(5, 2, 4).basis);
  EXPECT_THROW(random_subspace(3, 4, 1), DomainError);
  Rng rng = make_rng(5, 0);
  const int N = 100000;
  double s = 0, s2 = 0;
  Vec e1 = unit_vector(3, 0);
  for (int i = 0; i < N; ++i) {
    double v = random_subspace(3, 1, rng).coords(e1).squaredNorm();
    s += v;
    s2 += v * v;
  }
  double mean = s / N;
  double se = std::sqrt((s2 / N - mean * mean) / N);
  EXPECT_NEAR(mean, 1.0 / 3, 3 * se);
}

TEST(Geodesic, Examples) {
  EXPECT_NEAR(geodesic_distance(unit_vector(3, 0), unit_vector(3, 1)), kPi / 2, 1e-15);
  Vec x = vec({0.6, 0.8});
  EXPECT_NEAR(geodesic_distance(x, -x), kPi, 1e-15);
  EXPECT_NEAR(geodesic_distance(unit_vector(3, 0), vec({std::cos(0.3), std::sin(0.3), 0.0})), 0.3, 1e-15);
  EXPECT_NEAR(geodesic_distance(x * (1 + 5e-9), x), 0.0, 1e-15);
  EXPECT_THROW(geodesic_distance(Vec::Zero(2), x), DomainError);
  EXPECT_THROW(geodesic_distance(2 * x, x), DomainError);
}

TEST(SphericalProjection, Examples) {
  Vec x = vec({0.6, 0.8, 0.0});
  EXPECT_TRUE(spherical_projection(x, 2).isApprox(vec({0.6, 0.8})));
  Vec y = spherical_projection(vec({0.6, 0.0, 0.8}), 2);
  EXPECT_NEAR(y(0), 1.0, 1e-15);
  EXPECT_NEAR(y(1), 0.0, 1e-15);
  EXPECT_THROW(spherical_projection(vec({0.0, 0.0, 1.0}), 2), DomainError);
}

TEST(SphericalProjection, ClaimOnSymmetricCapPair) {
  // A = two antipodal caps of angular radius ρ around ±c in S¹.
  const double rho = 0.2;
  Vec c = vec({std::cos(1.1), std::sin(1.1)});
  auto dist = [&](const Vec& p) { return std::max(0.0, std::min(geodesic_distance(p, c), geodesic_distance(p, -c)) - rho); };
  auto dist_up = [&](const Vec& p) {
    Vec cc = Vec::Zero(p.size());
    cc.head(2) = c;
    return std::max(0.0, std::min(geodesic_distance(p, cc), geodesic_distance(p, -cc)) - rho);
  };
  Rng rng = make_rng(6, 0);
  int bad = 0;
  for (int i = 0; i < 100000; ++i) {
    Vec x = uniform_on_sphere(4, rng);
    if (x.head(2).norm() < 1e-9) continue;
    if (dist(spherical_projection(x, 2)) > dist_up(x) + 1e-12) ++bad;
  }
  EXPECT_EQ(bad, 0);
}

TEST(Net, CircleQuarterPi) {
  SphereNet net = build_net(2, kPi / 4, 3);
  EXPECT_LE(net.points.cols(), 8);
  EXPECT_LE(net.achieved, kPi / 4);
  for (int i = 0; i < 3600; ++i) {
    double a = 2 * kPi * i / 3600;
    Vec p = vec({std::cos(a), std::sin(a)});
    double best = kPi;
    for (Eigen::Index j = 0; j < net.points.cols(); ++j) best = std::min(best, geodesic_distance(p, net.points.col(j)));
    EXPECT_LE(best, kPi / 4 + 1e-12);
  }
  EXPECT_THROW(build_net(2, kPi, 1), DomainError);
  EXPECT_THROW(build_net(2, 0.0, 1), DomainError);
}

TEST(Net, ProbesWithinResolution) {
  for (int n : {3, 4}) {
    const double delta = 0.5;
    SphereNet net = build_net(n, delta, 11);
    EXPECT_LE(static_cast<double>(net.points.cols()), std::pow(1 + 2 / std::sin(delta), n));
    Rng rng = make_rng(12, 0);
    for (int i = 0; i < 5000; ++i) {
      Vec p = uniform_on_sphere(n, rng);
      double best = kPi;
      for (Eigen::Index j = 0; j < net.points.cols(); ++j) best = std::min(best, geodesic_distance(p, net.points.col(j)));
      EXPECT_LE(best, delta);
    }
  }
}

TEST(Lift, Examples) {
  Subspace P = Subspace::coordinate(3, 2);
  Vec x = vec({0.6, 0.8});
  Lift l = lift_waist(ball(3), P, x);
  EXPECT_LE((l.g - P.embed(x)).norm(), 1e-8);
  EXPECT_LE((l.f - P.embed(x)).norm(), 1e-8);

  BodyOracle C = construct_body(BodySpec{spec::Cube{2, 1.0}});
  Lift c = lift_waist(C, Subspace::coordinate(2, 1), vec({1.0}));
  EXPECT_LE((c.g - vec({1.0, 0.0})).norm(), 1e-8);

  Lift s = lift_waist(slab_body(), Subspace::coordinate(2, 1), vec({1.0}));
  EXPECT_LE((s.g - vec({1.0, 0.5})).norm(), 1e-8);
  EXPECT_NEAR(s.f(0), 0.89443, 1e-5);
  EXPECT_NEAR(s.f(1), 0.44721, 1e-5);

  BodyOracle small = ball(3, 0.5);
  EXPECT_THROW(lift_waist(small, P, x), HypothesisFailure);
  EXPECT_THROW(lift_waist(ball(3), P, vec({0.5, 0.5})), DomainError);
}

TEST(Lift, OddContinuousAndContained) {
  spec::TruncatedCylinder cyl;
  cyl.dim = 4;
  cyl.core = make_spec(spec::Cube{2, 0.8});
  cyl.truncation_radius = 10.0;
  std::vector<BodyOracle> bodies{construct_body(BodySpec{spec::Cube{4, 1.0}}),
                                 construct_body(BodySpec{spec::Ellipsoid{{1.0, 1.5, 1.2, 2.0}}}),
                                 construct_body(BodySpec{cyl})};
  Rng rng = make_rng(13, 0);
  for (const auto& K : bodies) {
    Subspace P = random_subspace(4, 2, rng);
    check_projection_hypothesis(K, P, 2000, 14);
    for (int i = 0; i < 40; ++i) {
      Vec x = uniform_on_sphere(2, rng);
      Lift a = lift_waist(K, P, x);
      Lift b = lift_waist(K, P, Vec(-x));
      EXPECT_EQ(a.g, Vec(-b.g)) << K.name();
      EXPECT_LE((P.coords(a.g) - x).norm(), 1e-8);
      EXPECT_LE(K.distance(a.g), 1e-7);
      EXPECT_GE(a.g.norm(), 1.0 - 1e-9);
      EXPECT_NEAR(a.f.norm(), 1.0, 1e-12);
      EXPECT_TRUE(K.membership(a.f));
      double t = 1e-4;
      Vec xp = std::cos(t) * x + std::sin(t) * Vec(vec({-x(1), x(0)}));
      EXPECT_LE((lift_waist(K, P, xp).g - a.g).norm(), 0.1) << K.name();
    }
  }
}

TEST(SegmentCap, Examples) {
  Vec y = unit_vector(2, 0);
  Vec z = vec({std::cos(kPi / 6), std::sin(kPi / 6)});
  EXPECT_TRUE(segment_cap_check(y, z, 0.5));
  EXPECT_TRUE(segment_cap_check(y, y, 0.01));
  EXPECT_THROW(segment_cap_check(y, z, 0.0), DomainError);
  EXPECT_THROW(segment_cap_check(y, z, 1.0), DomainError);
}

TEST(SegmentCap, RandomTriples) {
  Rng rng = make_rng(15, 0);
  std::uniform_real_distribution<double> U(1e-3, 0.999);
  int bad = 0;
  for (int i = 0; i < 100000; ++i) {
    int n = 2 + static_cast<int>(i % 6);
    double eps = U(rng);
    Vec y = uniform_on_sphere(n, rng);
    // z at angle ≤ arcsin ε from y.
    Vec w = uniform_on_sphere(n, rng);
    w -= w.dot(y) * y;
    if (w.norm() < 1e-9) continue;
    w.normalize();
    double a = std::asin(eps) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    Vec z = std::cos(a) * y + std::sin(a) * w;
    if (!segment_cap_check(y, z, eps)) ++bad;
  }
  EXPECT_EQ(bad, 0);
}
