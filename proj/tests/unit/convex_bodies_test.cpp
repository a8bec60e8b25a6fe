#include "waistlab/body_spec_json.hpp"
#include "waistlab/sphere_geometry.hpp"

#include <gtest/gtest.h>

using namespace waistlab;

namespace {

BodyOracle cube(int n, double a) { return construct_body(BodySpec{spec::Cube{n, a}}); }
BodyOracle cross(int n, double r) { return construct_body(BodySpec{spec::CrossPolytope{n, r}}); }
BodyOracle ellipsoid(std::vector<double> a) { return construct_body(BodySpec{spec::Ellipsoid{std::move(a)}}); }

BodyOracle segment(int n, int axis = 0) {
  std::vector<std::vector<double>> v(2, std::vector<double>(n, 0.0));
  v[0][axis] = 1.0;
  v[1][axis] = -1.0;
  return construct_body(BodySpec{spec::VertexPolytope{v, true}});
}

Mat rot2(double a) {
  Mat R(2, 2);
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return R;
}

std::vector<BodyOracle> catalog() {
  std::vector<BodyOracle> out{ball(3), ball(4, 0.7), cube(3, 1.0), cube(5, 0.6), cross(3, 1.0), cross(4, 2.0),
                              ellipsoid({1.0, 2.0}), ellipsoid({0.5, 1.0, 1.5})};
  spec::SlabIntersection s;
  s.slabs = {{{1.0, 0.0, 0.0}, 1.0}, {{0.0, 1.0, 0.0}, 0.8}, {{0.0, 0.0, 1.0}, 1.2}, {{1.0, 1.0, 1.0}, 1.5}};
  out.push_back(construct_body(BodySpec{s}));
  spec::Product p;
  p.dim = 4;
  p.low = make_spec(spec::Ball{2, 1.0});
  p.rest = make_spec(spec::Cube{2, 0.5});
  out.push_back(construct_body(BodySpec{p}));
  return out;
}

}  // namespace

TEST(Catalog, ClosedFormExamples) {
  BodyOracle C = cube(4, 1.0);
  EXPECT_DOUBLE_EQ(C.support(unit_vector(4, 0)), 1.0);
  EXPECT_DOUBLE_EQ(C.gauge(Vec::Ones(4)), 1.0);
  Vec u(2);
  u << 1, 1;
  u /= std::sqrt(2.0);
  EXPECT_NEAR(cross(2, 1.0).support(u), 1.0 / std::sqrt(2.0), 1e-15);
  Vec x(2);
  x << 0, 2;
  BodyOracle E = ellipsoid({1.0, 2.0});
  EXPECT_DOUBLE_EQ(E.gauge(x), 1.0);
  EXPECT_TRUE(E.membership(x));
}

TEST(Catalog, InvalidSpecNamesField) {
  try {
    construct_body(BodySpec{spec::Ball{3, -1.0}});
    FAIL();
  } catch (const InvalidSpec& e) {
    EXPECT_EQ(e.field(), "radius");
  }
  EXPECT_THROW(construct_body(BodySpec{spec::Ellipsoid{{1.0, 0.0}}}), InvalidSpec);
  EXPECT_THROW(construct_body(BodySpec{spec::Cube{0, 1.0}}), InvalidSpec);
  EXPECT_THROW(construct_body(json::parse(R"({"kind":"ball","dim":2,"radius":1,"radus":2})")), InvalidSpec);
  EXPECT_THROW(construct_body(json::parse(R"({"kind":"sphere","dim":2})")), InvalidSpec);
  EXPECT_THROW(construct_body(json::parse(R"({"kind":"vertex_polytope","vertices":[[1,0],[0,1],[0.2,0.3]],"symmetric":true})")),
               InvalidSpec);
}

TEST(Catalog, JsonRoundTrip) {
  const char* specs[] = {
      R"({"kind":"ball","dim":3,"radius":1.5})",
      R"({"kind":"cube","dim":2,"half_width":0.5})",
      R"({"kind":"cross_polytope","dim":4,"radius":2.0})",
      R"({"kind":"ellipsoid","semiaxes":[1.0,2.0,0.5]})",
      R"({"kind":"slab_intersection","slabs":[{"normal":[1.0,0.0],"width":1.0},{"normal":[1.0,1.0],"width":0.5}]})",
      R"({"kind":"product","low":{"kind":"ball","dim":2,"radius":1.0},"rest":null,"dim":5})",
      R"({"kind":"vertex_polytope","vertices":[[1.0,0.0],[0.0,1.0],[-1.0,-1.0]],"symmetric":false})",
      R"({"kind":"truncated_cylinder","dim":5,"core":{"kind":"ball","dim":2,"radius":0.5},"truncation_radius":1000000.0})",
  };
  for (const char* s : specs) {
    json j = json::parse(s);
    json back = to_json(body_spec_from_json(j));
    EXPECT_EQ(back, j) << s;
    EXPECT_EQ(to_json(body_spec_from_json(back)), back);
  }
}

TEST(BodyInvariants, RadialGaugeSupportMembership) {
  Rng rng = make_rng(11, 0);
  for (const auto& K : catalog()) {
    const int n = K.dim();
    for (int i = 0; i < 200; ++i) {
      Vec u = uniform_on_sphere(n, rng);
      double r = K.radial(u);
      EXPECT_NEAR(K.gauge(r * u), 1.0, 1e-9) << K.traits().name;
      EXPECT_TRUE(K.membership(r * (1 - 1e-6) * u));
      EXPECT_FALSE(K.membership(r * (1 + 1e-6) * u));
      EXPECT_GE(r, K.inner_radius() - 1e-12);
      EXPECT_LE(r, K.outer_radius() + 1e-12);
      // Homogeneity and symmetry.
      EXPECT_NEAR(K.support(2.5 * u), 2.5 * K.support(u), 1e-12);
      if (K.symmetric()) {
        EXPECT_NEAR(K.support(-u), K.support(u), 1e-12);
        EXPECT_NEAR(K.gauge(-u), K.gauge(u), 1e-12);
      }
      // ⟨x,u⟩ ≤ h(u) for members; the support point attains it.
      Vec v = uniform_on_sphere(n, rng);
      EXPECT_LE((K.radial(v) * v).dot(u), K.support(u) + 1e-9);
      Vec sp = K.support_point(u);
      EXPECT_NEAR(sp.dot(u), K.support(u), 1e-9);
      EXPECT_TRUE(K.membership(sp));
      // distance = 0 ⇔ member.
      Vec x = 2.0 * gaussian_vector(n, rng);
      EXPECT_EQ(K.distance(x) <= 1e-9, K.membership(x));
    }
  }
}

TEST(Intersection, Examples) {
  BodyOracle K = intersect(cube(2, 1.0), ball(2));
  Vec x(2);
  x << 0.9, 0.9;
  EXPECT_NEAR(K.gauge(x), 0.9 * std::sqrt(2.0), 1e-12);
  EXPECT_FALSE(K.membership(x));
  EXPECT_FALSE(K.support_exact());

  BodyOracle C = cube(3, 0.7);
  BodyOracle CC = intersect(C, C);
  Rng rng = make_rng(2, 0);
  for (int i = 0; i < 50; ++i) {
    Vec y = gaussian_vector(3, rng);
    EXPECT_DOUBLE_EQ(CC.gauge(y), C.gauge(y));
  }

  BodyOracle B1 = cross(2, 1.0);
  BodyOracle I = intersect(B1, rotate_body(B1, rot2(kPi / 4)));
  Vec u(2);
  u << std::cos(kPi / 8), std::sin(kPi / 8);
  EXPECT_NEAR(I.radial(u), 1.0 / (std::cos(kPi / 8) + std::sin(kPi / 8)), 1e-12);
  EXPECT_NEAR(I.radial(u), 0.76537, 1e-5);
  EXPECT_THROW(intersect(ball(2), ball(3)), DimensionMismatch);
}

TEST(MinkowskiSum, Examples) {
  EXPECT_DOUBLE_EQ(minkowski_sum(cube(3, 1.0), ball(3)).support(unit_vector(3, 0)), 2.0);
  BodyOracle C = cube(3, 1.0);
  BodyOracle S = minkowski_sum(segment(2, 0), segment(2, 1));
  for (int i = 0; i < 64; ++i) {
    double phi = 2 * kPi * i / 64;
    Vec u(2);
    u << std::cos(phi), std::sin(phi);
    EXPECT_NEAR(S.support(u), std::fabs(std::cos(phi)) + std::fabs(std::sin(phi)), 1e-12);
  }
  // h_{K+L} = h_K + h_L on random directions.
  Rng rng = make_rng(3, 0);
  BodyOracle E = ellipsoid({1.0, 2.0, 0.5});
  BodyOracle KL = minkowski_sum(C, E);
  for (int i = 0; i < 100; ++i) {
    Vec u = uniform_on_sphere(3, rng);
    EXPECT_DOUBLE_EQ(KL.support(u), C.support(u) + E.support(u));
  }
  // Membership via projection matches the support test on a few points.
  Vec far = Vec::Constant(3, 3.0);
  EXPECT_FALSE(KL.membership(far));
  EXPECT_TRUE(KL.membership(KL.support_point(Vec::Ones(3)) * (1 - 1e-6)));
}

TEST(MinkowskiSum, PointIsIdentity) {
  BodyOracle C = cube(3, 1.0);
  BodyOracle origin = make_body(std::make_shared<models::PointModel>(3));
  BodyOracle S = minkowski_sum(C, origin);
  Rng rng = make_rng(4, 0);
  for (int i = 0; i < 50; ++i) {
    Vec u = uniform_on_sphere(3, rng);
    EXPECT_DOUBLE_EQ(S.support(u), C.support(u));
    EXPECT_NEAR(S.gauge(u), C.gauge(u), 1e-12);
  }
}

TEST(Neighborhood, Examples) {
  BodyOracle N = neighborhood(ball(3), 0.5);
  Rng rng = make_rng(5, 0);
  for (int i = 0; i < 50; ++i) EXPECT_DOUBLE_EQ(N.support(uniform_on_sphere(3, rng)), 1.5);
  BodyOracle C = cube(3, 1.0);
  BodyOracle C0 = neighborhood(C, 0.0);
  EXPECT_DOUBLE_EQ(C0.gauge(Vec::Ones(3)), 1.0);
  EXPECT_THROW(neighborhood(C, -0.1), DomainError);

  BodyOracle seg = segment(3, 0);
  BodyOracle SN = neighborhood(seg, 0.5);
  Vec z(3);
  z << std::cos(kPi / 6), std::sin(kPi / 6), 0.0;
  EXPECT_NEAR(seg.distance(z), 0.5, 1e-12);
  EXPECT_TRUE(SN.membership(z));
  EXPECT_NEAR(SN.support(unit_vector(3, 0)), 1.5, 1e-12);
}

TEST(Rotate, Examples) {
  Rng rng = make_rng(6, 0);
  BodyOracle C = cube(3, 1.0);
  BodyOracle CI = rotate_body(C, Mat::Identity(3, 3));
  for (int i = 0; i < 50; ++i) {
    Vec u = uniform_on_sphere(3, rng);
    EXPECT_NEAR(CI.support(u), C.support(u), 1e-15);
  }
  BodyOracle R = rotate_body(cross(2, 1.0), rot2(kPi / 4));
  EXPECT_NEAR(R.support(unit_vector(2, 0)), std::sqrt(2.0) / 2, 1e-15);
  Mat U = haar_rotation(4, 9).matrix;
  BodyOracle B = rotate_body(ball(4), U);
  for (int i = 0; i < 20; ++i) {
    Vec u = uniform_on_sphere(4, rng);
    EXPECT_NEAR(B.support(u), 1.0, 1e-14);
    EXPECT_NEAR(rotate_body(cube(4, 1.0), U).support(u), cube(4, 1.0).support(U.transpose() * u), 1e-12);
  }
  Mat bad = Mat::Identity(3, 3);
  bad(0, 1) = 1e-6;
  EXPECT_THROW(rotate_body(C, bad), DomainError);
}

TEST(Polar, Examples) {
  Vec x(2);
  x << 1, 1;
  EXPECT_DOUBLE_EQ(polar(cube(2, 1.0)).gauge(x), 2.0);
  BodyOracle P = polar(ball(3, 2.0));
  EXPECT_DOUBLE_EQ(P.radial(unit_vector(3, 1)), 0.5);
  BodyOracle E = ellipsoid({1.0, 2.0});
  BodyOracle EE = polar(polar(E));
  Rng rng = make_rng(7, 0);
  for (int i = 0; i < 100; ++i) {
    Vec y = 3.0 * gaussian_vector(2, rng);
    EXPECT_NEAR(EE.gauge(y), E.gauge(y), 1e-10);
  }
  BodyOracle origin = make_body(std::make_shared<models::PointModel>(2));
  EXPECT_THROW(polar(origin), DomainError);
}

TEST(Polar, SwapsSupportAndGauge) {
  Rng rng = make_rng(8, 0);
  for (const auto& K : catalog()) {
    if (!K.symmetric() || !(K.inner_radius() > 0)) continue;
    BodyOracle P = polar(K);
    BodyOracle PP = polar(P);
    for (int i = 0; i < 30; ++i) {
      Vec u = uniform_on_sphere(K.dim(), rng);
      EXPECT_NEAR(P.support(u), K.gauge(u), 1e-9) << K.traits().name;
      EXPECT_NEAR(P.gauge(u), K.support(u), 1e-9) << K.traits().name;
      EXPECT_NEAR(PP.gauge(u), K.gauge(u), 1e-9) << K.traits().name;
    }
  }
}

TEST(DifferenceBody, Examples) {
  BodyOracle D = difference_body(ball(3));
  EXPECT_DOUBLE_EQ(D.support(unit_vector(3, 2)), 2.0);
  BodyOracle C = cube(3, 0.5);
  BodyOracle CD = difference_body(C);
  Rng rng = make_rng(9, 0);
  for (int i = 0; i < 50; ++i) {
    Vec u = uniform_on_sphere(3, rng);
    EXPECT_NEAR(CD.support(u), 2 * C.support(u), 1e-14);
  }
  std::vector<std::vector<double>> tri{{0, 0}, {1, 0}, {0, 1}};
  BodyOracle T = construct_body(BodySpec{spec::VertexPolytope{tri, false}});
  BodyOracle TD = difference_body(T);
  EXPECT_TRUE(TD.symmetric());
  for (int i = 0; i < 50; ++i) {
    Vec u = uniform_on_sphere(2, rng);
    EXPECT_NEAR(TD.support(u), T.support(u) + T.support(-u), 1e-12);
  }
  // Hexagon area 3 vs triangle area 1/2.
  Estimate vT = mc_volume(T, 1000000, 21);
  Estimate vD = mc_volume(TD, 1000000, 22);
  EXPECT_NEAR(vT.value, 0.5, 3 * vT.standard_error);
  EXPECT_NEAR(vD.value, 3.0, 3 * vD.standard_error);
}

TEST(DifferenceBody, RogersShephardOnRandomPolytopes) {
  Rng rng = make_rng(10, 0);
  for (int n = 2; n <= 4; ++n) {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < n + 3; ++i) pts.push_back(to_std(gaussian_vector(n, rng)));
    Vec c = Vec::Zero(n);
    for (auto& p : pts) c += from_std(p) / pts.size();
    for (auto& p : pts) p = to_std(from_std(p) - c);
    BodyOracle K = construct_body(BodySpec{spec::VertexPolytope{pts, false}});
    BodyOracle D = difference_body(K);
    Estimate vK = mc_volume(K, 400000, 30 + n);
    Estimate vD = mc_volume(D, 400000, 40 + n);
    double ratio = vD.value / vK.value;
    double se = ratio * std::hypot(vD.standard_error / vD.value, vK.standard_error / vK.value);
    EXPECT_LE(ratio, binomial(2 * n, n) + 3 * se) << n;
    EXPECT_GE(ratio, std::pow(2.0, n) - 3 * se) << n;
  }
}

TEST(Volume, Examples) {
  Estimate b = mc_volume(ball(3), 1000000, 1);
  EXPECT_NEAR(b.value, 4 * kPi / 3, 3 * b.standard_error + 1e-12);
  Estimate c = mc_volume(cube(2, 1.0), 1000000, 2);
  EXPECT_NEAR(c.value, 4.0, 3 * c.standard_error + 1e-12);
  EXPECT_EQ(mc_volume(segment(2), 1000, 3).value, 0.0);
  spec::TruncatedCylinder cyl;
  cyl.dim = 3;
  cyl.core = make_spec(spec::Ball{1, 1.0});
  cyl.truncation_radius = kInf;
  EXPECT_THROW(mc_volume(construct_body(BodySpec{cyl}), 100, 1), DomainError);
}

TEST(VolumeRatio, Examples) {
  Estimate a = volume_ratio(ball(3), 100000, 1);
  EXPECT_NEAR(a.value, 1.0, 1e-12);
  Estimate c = volume_ratio(cube(2, 1.0), 1000000, 2);
  EXPECT_NEAR(c.value, std::sqrt(4 / kPi), 3 * c.standard_error);
  Estimate b2 = volume_ratio(ball(3, 2.0), 100000, 3);
  EXPECT_NEAR(b2.value, 2.0, 1e-12);
  try {
    volume_ratio(cube(3, 0.9), 1000, 4);
    FAIL();
  } catch (const HypothesisFailure& e) {
    EXPECT_EQ(e.witness().size(), 3);
    EXPECT_GT(cube(3, 0.9).gauge(e.witness()), 1.0);
  }
}

TEST(Truncation, CylinderFlagsAndRadii) {
  spec::TruncatedCylinder cyl;
  cyl.dim = 4;
  cyl.core = make_spec(spec::Ball{2, 0.5});
  cyl.truncation_radius = 100.0;
  BodyOracle K = construct_body(BodySpec{cyl});
  EXPECT_TRUE(K.truncated());
  EXPECT_NEAR(K.radial(unit_vector(4, 3)), 100.0, 1e-9);
  EXPECT_NEAR(K.radial(unit_vector(4, 0)), 0.5, 1e-12);
  EXPECT_TRUE(K.symmetric());
}
