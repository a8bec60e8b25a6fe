#pragma once

// Invariant suite shared by `waistlab verify` (quick scale) and the
// acceptance binary (full scale). Each check records both sides of every
// comparison in its detail lines, not only the verdict.

#include "waistlab/config.hpp"

#include <functional>

namespace waistlab::verify {

enum class Scale { quick, full };

struct CheckResult {
  std::string id;
  std::string title;
  bool passed = true;
  std::vector<std::string> details;
  double seconds = 0.0;

  void note(const std::string& s) { details.push_back(s); }
  void fail(const std::string& s) {
    passed = false;
    details.push_back("FAIL: " + s);
  }
  void expect(bool ok, const std::string& s) {
    if (ok) {
      note(s);
    } else {
      fail(s);
    }
  }
};

struct Check {
  std::string id;
  std::string title;
  std::function<CheckResult(Scale)> run;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline bool full(Scale s) { return s == Scale::full; }

inline CheckResult start(const std::string& id, const std::string& title) {
  CheckResult r;
  r.id = id;
  r.title = title;
  return r;
}

/// |mc − exact| ≤ z·SE with the SE taken under the exact value (the plug-in
/// SE vanishes when every sample lands on one side).
inline bool within_se(const Estimate& mc, double exact, std::size_t samples, double z) {
  double p = std::clamp(exact, 0.0, 1.0);
  double se = std::max(mc.standard_error, std::sqrt(p * (1.0 - p) / static_cast<double>(samples)));
  return std::fabs(mc.value - exact) <= z * se + 1e-12;
}

inline Estimate sphere_fraction_inside(const BodyOracle& K, std::size_t samples, std::uint64_t seed) {
  const int n = K.dim();
  return proportion(count_hits(samples, seed, [&](Rng& rng) { return K.membership(uniform_on_sphere(n, rng)); }),
                    samples);
}

inline BodySpec cube(int n, double a) { return {spec::Cube{n, a}}; }
inline BodySpec cross(int n, double r) { return {spec::CrossPolytope{n, r}}; }
inline BodySpec ball_spec(int n, double r) { return {spec::Ball{n, r}}; }
inline BodySpec ellipsoid(std::vector<double> axes) { return {spec::Ellipsoid{std::move(axes)}}; }

/// B₂ᵏ × t·B₂^{n−k}; t = 0 gives the embedded ball.
inline BodySpec cylinder_product(int n, int k, double t) {
  spec::Product p;
  p.dim = n;
  p.low = make_spec(spec::Ball{k, 1.0});
  if (t > 0.0) p.rest = make_spec(spec::Ball{n - k, t});
  return {p};
}

inline std::string pair_label(int n, const std::string& a, const std::string& b) {
  return "n=" + std::to_string(n) + " " + a + " / " + b;
}

struct CatalogPair {
  std::string label;
  BodyOracle K;
  BodyOracle L;
};

inline std::vector<CatalogPair> duality_pairs() {
  std::vector<CatalogPair> out;
  out.push_back({pair_label(2, "ball(1)", "ball(1)"), ball(2), ball(2)});
  out.push_back({pair_label(3, "ball(1)", "ball(1)"), ball(3), ball(3)});
  out.push_back({pair_label(3, "cube(1)", "cross(2)"), construct_body(cube(3, 1.0)), construct_body(cross(3, 2.0))});
  out.push_back({pair_label(3, "ellipsoid(2,1,0.8)", "ball(1.2)"), construct_body(ellipsoid({2.0, 1.0, 0.8})),
                 ball(3, 1.2)});
  out.push_back({pair_label(4, "cube(0.8)", "ellipsoid(1.5,1,1,0.7)"), construct_body(cube(4, 0.8)),
                 construct_body(ellipsoid({1.5, 1.0, 1.0, 0.7}))});
  return out;
}

struct DualityRow {
  double diameter = 0.0;   ///< diam(K° ∩ UL°)
  double inclusion = 0.0;  ///< min_u h_K(u) + h_UL(u)
  double minmax = 0.0;     ///< min_u max(h_K(u), h_UL(u))
};

inline DualityRow duality_row(const CatalogPair& p, std::uint64_t seed, const OptimizerConfig& cfg) {
  const int n = p.K.dim();
  Mat U = haar_rotation(n, seed).matrix;
  DualityRow r;
  r.diameter = diameter_of_intersection(polar(p.K), polar(p.L), U, cfg, derive_seed(seed, 1)).diameter;
  r.inclusion = inclusion_radius(p.K, p.L, U, cfg, derive_seed(seed, 2)).radius;
  BodyOracle UL = rotate_body(p.L, U);
  auto f = [&](const Vec& u) { return -std::max(p.K.model().support(u), UL.model().support(u)); };
  r.minmax = -maximize_on_sphere(f, n, cfg, derive_seed(seed, 3)).value;
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CheckResult check_exact_measure(Scale s) {
  auto r = detail::start("1", "sigma_exact vs sigma_mc on 60 grid points, anchors");
  waistlab::detail::Stopwatch clock;
  const std::size_t samples = detail::full(s) ? 1000000 : 100000;
  Rng grid = make_rng(0xC1, 0);
  std::size_t bad = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 60; ++i) {
    int m = std::uniform_int_distribution<int>(1, 30)(grid);
    int j = std::uniform_int_distribution<int>(0, m - 1)(grid);
    double theta = std::uniform_real_distribution<double>(0.02, kPi / 2)(grid);
    double exact = sigma_exact(m, j, theta);
    Estimate mc = sigma_mc({m, j, theta}, samples, derive_seed(0xC1, static_cast<std::uint64_t>(i)));
    double se = std::max(mc.standard_error, std::sqrt(exact * (1 - exact) / samples));
    if (se > 0) worst_z = std::max(worst_z, std::fabs(mc.value - exact) / se);
    if (!detail::within_se(mc, exact, samples, 4.0)) {
      ++bad;
      r.fail("m=" + std::to_string(m) + " j=" + std::to_string(j) + " theta=" + detail::fmt(theta) +
             " exact=" + detail::fmt(exact) + " mc=" + detail::fmt(mc.value) + " se=" + detail::fmt(mc.standard_error));
    }
  }
  r.note("60 points, " + std::to_string(samples) + " samples each, " + std::to_string(bad) +
         " outside 4 SE, worst |z| = " + detail::fmt(worst_z));
  double a1 = sigma_exact(2, 1, kPi / 6);
  double a2 = sigma_exact(1, 0, kPi / 4);
  r.expect(std::fabs(a1 - 0.5) <= 1e-12, "sigma_{2,1}(pi/6) = " + format_number(a1));
  r.expect(std::fabs(a2 - 0.5) <= 1e-12, "sigma_{1,0}(pi/4) = " + format_number(a2));
  r.seconds = clock.seconds();
  if (detail::full(s)) r.expect(r.seconds < 120.0, "runtime " + detail::fmt(r.seconds) + " s (limit 120 s)");
  return r;
}

inline CheckResult check_complement_identity(Scale) {
  auto r = detail::start("2", "complement identity sigma(m,j,t) + sigma(m,m-j-1,pi/2-t) = 1, m <= 60");
  waistlab::detail::Stopwatch clock;
  double worst = 0.0;
  std::size_t count = 0;
  for (int m = 1; m <= 60; ++m) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < 24; ++i) {
        double theta = (i + 0.5) * (kPi / 2) / 24.0;
        double e = std::fabs(sigma_exact(m, j, theta) + sigma_exact(m, m - j - 1, kPi / 2 - theta) - 1.0);
        worst = std::max(worst, e);
        ++count;
      }
    }
  }
  r.expect(worst <= 1e-12, std::to_string(count) + " points, max |sum - 1| = " + format_number(worst));
  r.seconds = clock.seconds();
  return r;
}

inline CheckResult check_cap_bounds(Scale s) {
  auto r = detail::start("3", "cap sandwich at frozen constants, 1<k<=20, k<=n<=100; sigma_lip_lower <= sigma_exact");
  waistlab::detail::Stopwatch clock;
  const BoundConstants consts;
  std::size_t points = 0;
  std::size_t fails = 0;
  std::size_t lip_points = 0;
  std::size_t order_points = 0;
  std::size_t skipped_k_eq_n = 0;
  double min_margin_lower = kInf;
  double min_margin_upper = kInf;
  auto bad = [&](const std::string& what, int n, int k, double eps, double lhs, double rhs) {
    ++fails;
    if (fails <= 20) {
      r.fail(what + " n=" + std::to_string(n) + " k=" + std::to_string(k) + " eps=" + detail::fmt(eps) + ": " +
             format_number(lhs) + " vs " + format_number(rhs));
    }
  };
  for (int k = 2; k <= 20; ++k) {
    for (int n = k; n <= 100; ++n) {
      for (int i = 0; i <= 12; ++i) {
        const double eps = 0.01 + 0.04 * i;
        if (n == k) {
          ++skipped_k_eq_n;
          continue;
        }
        ++points;
        const double th = cap_angle(n, k, eps);
        const double thc = cap_angle_complement(n, k, eps);
        CapBounds b = cap_bounds(n, k, eps, consts);
        const double direct = sigma_exact(n - 1, n - k - 1, th);
        const double compl_ = sigma_exact(n - 1, k - 1, thc);
        if (!(b.lower <= direct)) bad("cap lower", n, k, eps, b.lower, direct);
        if (!(direct <= b.upper)) bad("cap upper", n, k, eps, direct, b.upper);
        if (!(b.lower_compl <= compl_)) bad("complement lower", n, k, eps, b.lower_compl, compl_);
        if (!(compl_ <= b.upper_compl)) bad("complement upper", n, k, eps, compl_, b.upper_compl);
        if (b.lower > 0) min_margin_lower = std::min(min_margin_lower, direct / b.lower);
        if (direct > 0) min_margin_upper = std::min(min_margin_upper, b.upper / direct);

        LipBounds lb = lip_bounds(n, k, eps, consts);
        if (n - k - 1 >= 1) {
          ++lip_points;
          double lip = sigma_lip_lower(n - 1, n - k - 1, th);
          if (!(lb.bound_i <= lip)) bad("lip (i)", n, k, eps, lb.bound_i, lip);
          double ex = sigma_exact(n - 1, n - k - 1, th);
          ++order_points;
          if (!(lip <= ex)) bad("lip_lower <= exact", n, k, eps, lip, ex);
        }
        double lip2 = sigma_lip_lower(n - 1, k - 1, thc);
        if (!(lb.bound_ii <= lip2)) bad("lip (ii)", n, k, eps, lb.bound_ii, lip2);
        double ex2 = sigma_exact(n - 1, k - 1, thc);
        ++order_points;
        if (!(lip2 <= ex2)) bad("lip_lower <= exact", n, k, eps, lip2, ex2);
        // Same-argument comparison σ^Lip_{n,k} lower vs σ_{n,k}.
        ++order_points;
        double l3 = sigma_lip_lower(n, k, th);
        double e3 = sigma_exact(n, k, th);
        if (!(l3 <= e3)) bad("sigma_lip_lower(n,k) <= sigma_exact(n,k)", n, k, eps, l3, e3);
      }
    }
  }
  r.note("constants c=" + detail::fmt(consts.c_small) + " C=" + detail::fmt(consts.C_big));
  r.note(std::to_string(points) + " cap points (n > k), " + std::to_string(lip_points) + " lip (i) points, " +
         std::to_string(order_points) + " ordering points, " + std::to_string(fails) + " failures");
  r.note("smallest ratio exact/lower = " + detail::fmt(min_margin_lower) + ", upper/exact = " +
         detail::fmt(min_margin_upper));
  r.note("info: " + std::to_string(skipped_k_eq_n) +
         " points with k = n skipped: the direct pair needs sigma_{n-1,-1} and the complement pair sigma_{n-1,n-1}, "
         "neither is a valid subsphere measure");
  r.seconds = clock.seconds();
  if (detail::full(s)) r.expect(r.seconds < 60.0, "runtime " + detail::fmt(r.seconds) + " s (limit 60 s)");
  return r;
}

inline CheckResult check_gaussian_fact(Scale) {
  auto r = detail::start("4", "chi-square tail and small-ball bounds at frozen constants");
  waistlab::detail::Stopwatch clock;
  const BoundConstants consts;
  std::size_t points = 0;
  for (int k = 1; k <= 20; ++k) {
    for (double M : {2.0, 3.0, 4.0}) {
      for (int i = 1; i <= 10; ++i) {
        const double eps = 0.05 * i;
        ++points;
        auto g = gaussian_fact_check(k, M, eps, consts);
        if (!g.tail_ok) {
          r.fail("tail k=" + std::to_string(k) + " M=" + detail::fmt(M) + ": " + format_number(g.tail_probability) +
                 " > " + format_number(g.tail_bound));
        }
        if (!g.smallball_ok) {
          r.fail("small ball k=" + std::to_string(k) + " eps=" + detail::fmt(eps) + ": " +
                 format_number(g.smallball_lower) + " <= " + format_number(g.smallball_probability) +
                 " <= " + format_number(g.smallball_upper) + " violated");
        }
      }
    }
  }
  r.note(std::to_string(points) + " (k, M, eps) points checked");
  double a = chisq_cdf(2, 2.0);
  r.expect(std::fabs(a - (1.0 - std::exp(-1.0))) <= 1e-12, "P{chi2_2 <= 2} = " + format_number(a));
  r.seconds = clock.seconds();
  return r;
}

inline CheckResult check_higher_sphere(Scale s) {
  auto r = detail::start("5", "higher-sphere inequality on 50 random cap unions; pointwise projection claim");
  waistlab::detail::Stopwatch clock;
  HigherSphereConfig c;
  c.set_type = "random_caps";
  c.randomize_dims = true;
  c.n_min = 2;
  c.n_max = 6;
  c.m_extra_max = 4;
  c.configurations = 50;
  c.samples = detail::full(s) ? 100000 : 20000;
  c.claim_samples = detail::full(s) ? 100000 : 2000;
  ExperimentReport rep = run_higher_sphere(c, 0x5A);
  const auto& T = rep.trials;
  for (const auto& row : T.rows) {
    if (row[T.column("holds")] < 0.5) {
      r.fail("configuration " + detail::fmt(row[0]) + ": lhs " + detail::fmt(row[T.column("lhs")]) + " rhs " +
             detail::fmt(row[T.column("rhs")]));
    }
  }
  std::size_t viol = rep.summary["claim_violations"].get<std::size_t>();
  r.expect(rep.summary["inequality_holds"].get<std::size_t>() == 50,
           "inequality holds in " + rep.summary["inequality_holds"].dump() + "/50 configurations (4 SE slack)");
  r.expect(viol == 0, "claim violations: " + std::to_string(viol) + " over " +
                          std::to_string(c.claim_samples * c.configurations) + " samples");
  // Subsphere: both sides against the beta formula.
  HigherSphereConfig sub;
  sub.set_type = "subsphere";
  sub.subsphere_dim = 1;
  sub.n = 3;
  sub.m = 6;
  sub.theta = 0.4;
  sub.samples = c.samples;
  sub.claim_samples = 1000;
  ExperimentReport sr = run_higher_sphere(sub, 0x5B);
  const auto& row = sr.trials.rows.front();
  const auto& ST = sr.trials;
  bool l_ok = detail::within_se({row[ST.column("lhs")], row[ST.column("lhs_se")]}, row[ST.column("lhs_exact")],
                                sub.samples, 4.0);
  bool r_ok = detail::within_se({row[ST.column("rhs")], row[ST.column("rhs_se")]}, row[ST.column("rhs_exact")],
                                sub.samples, 4.0);
  r.expect(l_ok && r_ok, "subsphere S^1 in S^3 vs S^6: lhs " + detail::fmt(row[ST.column("lhs")]) + " (exact " +
                             detail::fmt(row[ST.column("lhs_exact")]) + "), rhs " + detail::fmt(row[ST.column("rhs")]) +
                             " (exact " + detail::fmt(row[ST.column("rhs_exact")]) + ")");
  r.seconds = clock.seconds();
  return r;
}

inline CheckResult check_projection(Scale s) {
  auto r = detail::start("6", "projection inequality: equality case, cylinders, two-cap anchor, waist");
  waistlab::detail::Stopwatch clock;
  const std::size_t samples = detail::full(s) ? 400000 : 50000;
  std::uint64_t seed = 0x6A;
  std::size_t eq_bad = 0;
  std::size_t eq_count = 0;
  const std::vector<std::pair<int, int>> eq_dims{{3, 1}, {3, 2}, {4, 2}, {6, 3}, {8, 5}, {10, 4}, {10, 9}};
  for (auto [n, k] : eq_dims) {
    BodyOracle K = construct_body(detail::cylinder_product(n, k, 0.0));
    for (double eps : {0.1, 0.3, 0.5}) {
      ++eq_count;
      Estimate lhs = mc_sigma_body(K, eps, samples, derive_seed(seed, eq_count));
      double ex = sigma_exact(n - 1, k - 1, std::asin(eps));
      if (!detail::within_se(lhs, ex, samples, 4.0)) {
        ++eq_bad;
        r.fail("equality n=" + std::to_string(n) + " k=" + std::to_string(k) + " eps=" + detail::fmt(eps) + ": mc " +
               detail::fmt(lhs.value) + " exact " + detail::fmt(ex));
      }
    }
  }
  r.note("equality case: " + std::to_string(eq_count - eq_bad) + "/" + std::to_string(eq_count) + " within 4 SE");

  std::size_t ineq_bad = 0;
  std::size_t ineq_count = 0;
  for (auto [n, k] : std::vector<std::pair<int, int>>{{4, 2}, {6, 3}, {8, 4}, {10, 5}}) {
    for (double eps : {0.1, 0.3}) {
      double prev_gap = -kInf;
      for (double t : {0.05, 0.1}) {
        ++ineq_count;
        BodyOracle K = construct_body(detail::cylinder_product(n, k, t));
        Estimate lhs = mc_sigma_body(K, eps, samples, derive_seed(seed, 100 + ineq_count));
        double rhs = sigma_lip_lower(n - 1, k - 1, std::asin(eps));
        double eq = sigma_exact(n - 1, k - 1, std::asin(eps));
        bool ok = lhs.value + 4.0 * lhs.standard_error >= rhs;
        if (!ok) {
          ++ineq_bad;
          r.fail("cylinder n=" + std::to_string(n) + " k=" + std::to_string(k) + " t=" + detail::fmt(t) +
                 " eps=" + detail::fmt(eps) + ": lhs " + detail::fmt(lhs.value) + " rhs " + detail::fmt(rhs));
        }
        double gap = lhs.value - eq;
        if (t > 0.05) {
          r.note("info: n=" + std::to_string(n) + " k=" + std::to_string(k) + " eps=" + detail::fmt(eps) +
                 " gap over equality value t=0.05 -> 0.1: " + detail::fmt(prev_gap) + " -> " + detail::fmt(gap));
        }
        prev_gap = gap;
      }
    }
  }
  r.note("cylinders: " + std::to_string(ineq_count - ineq_bad) + "/" + std::to_string(ineq_count) +
         " satisfy lhs + 4 SE >= sigma_lip_lower");

  spec::Product seg;
  seg.dim = 3;
  seg.low = make_spec(spec::Cube{1, 1.0});
  BodyOracle S = construct_body(BodySpec{seg});
  Estimate two_cap = mc_sigma_body(S, 0.5, samples, derive_seed(seed, 999));
  const double cap_value = 1.0 - std::cos(kPi / 6);
  r.expect(std::fabs(sigma_exact(2, 0, std::asin(0.5)) - cap_value) <= 1e-12 &&
               detail::within_se(two_cap, cap_value, samples, 4.0),
           "two-cap anchor n=3 k=1 eps=0.5: mc " + detail::fmt(two_cap.value) + " +- " +
               detail::fmt(two_cap.standard_error) + ", closed form " + detail::fmt(cap_value));

  ProjectionConfig pc;
  pc.K = detail::cylinder_product(6, 3, 0.1);
  pc.k = 3;
  pc.eps = {0.2};
  pc.samples = 20000;
  pc.waist_samples = detail::full(s) ? 500 : 50;
  ExperimentReport pr = run_projection(pc, 0x6B);
  const json& w = pr.summary["waist"];
  r.expect(w["containment_violations"].get<std::size_t>() == 0 && w["oddness_max_error"].get<double>() <= 1e-12 &&
               w["fiber_max_error"].get<double>() <= 1e-9 && w["min_lift_norm"].get<double>() >= 1.0 - 1e-9,
           "lifted waist on cylinder n=6 k=3: " + w.dump());
  r.seconds = clock.seconds();
  return r;
}

inline CheckResult check_segment_cap(Scale s) {
  auto r = detail::start("7", "segment-cap property on random valid triples");
  waistlab::detail::Stopwatch clock;
  const std::size_t triples = detail::full(s) ? 100000 : 10000;
  Rng rng = make_rng(0x7A, 0);
  std::size_t viol = 0;
  for (std::size_t i = 0; i < triples; ++i) {
    int n = std::uniform_int_distribution<int>(2, 10)(rng);
    double eps = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    Vec y = uniform_on_sphere(n, rng);
    Vec t = gaussian_vector(n, rng);
    t -= t.dot(y) * y;
    t.normalize();
    double phi = std::uniform_real_distribution<double>(0.0, std::asin(eps))(rng);
    Vec z = std::cos(phi) * y + std::sin(phi) * t;
    if (!segment_cap_check(y, z, eps)) ++viol;
  }
  r.expect(viol == 0, std::to_string(viol) + " violations over " + std::to_string(triples) + " triples");
  r.seconds = clock.seconds();
  return r;
}

inline CheckResult check_entropy(Scale s) {
  auto r = detail::start("8", "greedy N(D, K) <= 2^n / (sigma - 3 SE) on symmetric catalog bodies, n <= 8");
  waistlab::detail::Stopwatch clock;
  struct Item {
    std::string label;
    BodySpec spec;
  };
  std::vector<Item> catalog{
      {"ball(1) n=2", detail::ball_spec(2, 1.0)},
      {"cube(0.8) n=2", detail::cube(2, 0.8)},
      {"cross(1.2) n=2", detail::cross(2, 1.2)},
      {"ellipsoid(1.5,0.7) n=2", detail::ellipsoid({1.5, 0.7})},
      {"cube(0.7) n=4", detail::cube(4, 0.7)},
      {"cross(1.6) n=4", detail::cross(4, 1.6)},
      {"ellipsoid(1.5,1.2,0.8,0.6) n=4", detail::ellipsoid({1.5, 1.2, 0.8, 0.6})},
      {"cube(0.8) n=6", detail::cube(6, 0.8)},
      {"cross(2.2) n=6", detail::cross(6, 2.2)},
      {"ball(1) n=8", detail::ball_spec(8, 1.0)},
      {"cube(0.8) n=8", detail::cube(8, 0.8)},
      {"cross(2.6) n=8", detail::cross(8, 2.6)},
  };
  CoveringOptions opt;
  opt.interior_probes = detail::full(s) ? 20000 : 4000;
  opt.boundary_probes = detail::full(s) ? 5000 : 1000;
  const std::size_t samples = detail::full(s) ? 200000 : 50000;
  std::uint64_t i = 0;
  for (const auto& item : catalog) {
    ++i;
    BodyOracle K = construct_body(item.spec);
    Estimate sigma = detail::sphere_fraction_inside(K, samples, derive_seed(0x8A, i));
    opt.seed = derive_seed(0x8B, i);
    std::size_t N = covering_number_upper(ball(K.dim()), K, opt).count;
    double denom = sigma.value - 3.0 * sigma.standard_error;
    double bound = denom > 0 ? std::exp2(K.dim()) / denom : kInf;
    r.expect(static_cast<double>(N) <= bound, item.label + ": N = " + std::to_string(N) + ", sigma = " +
                                                  detail::fmt(sigma.value) + " +- " +
                                                  detail::fmt(sigma.standard_error) + ", bound " + detail::fmt(bound));
  }
  r.seconds = clock.seconds();
  return r;
}

inline std::vector<CoreLemmaConfig> core_catalog(std::size_t trials) {
  std::vector<CoreLemmaConfig> out(3);
  out[0].K = detail::cube(4, 1.0);
  out[0].L = detail::ball_spec(4, 0.5);
  out[1].K = detail::ball_spec(6, 1.0);
  out[1].L = detail::cube(6, 0.6);
  out[2].K = detail::cross(8, 1.6);
  out[2].L = detail::ball_spec(8, 0.5);
  for (auto& c : out) {
    c.delta_K = 0.3;
    c.delta_L = 0.3;
    c.trials = trials;
    c.optimizer.restarts = 10;
  }
  out[2].delta_K = 0.2;
  return out;
}

inline CheckResult check_core_lemma(Scale s) {
  auto r = detail::start("9", "core lemma failure rate <= N sigma + 3 SE, three configurations");
  waistlab::detail::Stopwatch total;
  auto configs = core_catalog(detail::full(s) ? 500 : 50);
  if (!detail::full(s)) {
    for (auto& c : configs) {
      c.sigma_samples = 50000;
      c.covering.interior_probes = 4000;
      c.covering.boundary_probes = 1000;
    }
  }
  const char* labels[] = {"n=4 cube(1) / ball(0.5)", "n=6 ball(1) / cube(0.6)", "n=8 cross(1.6) / ball(0.5), delta_K 0.2"};
  for (std::size_t i = 0; i < configs.size(); ++i) {
    waistlab::detail::Stopwatch clock;
    ExperimentReport rep = run_core_lemma(configs[i], 0x9A + i);
    const json& sm = rep.summary;
    double t = clock.seconds();
    std::string line = std::string(labels[i]) + ": N = " + sm["net_size"].dump() + ", sigma = " +
                       sm["sigma_hat"]["value"].dump() + ", failure = " + sm["failure_rate"]["value"].dump() +
                       ", bound N*sigma = " + sm["bound_N_sigma"].dump() + " + " + sm["slack_3se"].dump() +
                       (sm["bound_vacuous"].get<bool>() ? " (vacuous)" : "") + ", " + detail::fmt(t) + " s";
    r.expect(sm["bound_holds"].get<bool>(), line);
    if (detail::full(s)) r.expect(t < 300.0, std::string(labels[i]) + " runtime " + detail::fmt(t) + " s (limit 300 s)");
  }
  r.seconds = total.seconds();
  return r;
}

/// Literal duality statement: diam(K° ∩ UL°) · inclusion_radius(K, L, U) = 2.
inline CheckResult check_duality_literal(Scale s) {
  auto r = detail::start("10a", "diam(K° ∩ UL°) * inclusion_radius(K, L, U) = 2 within 1e-4 relative");
  waistlab::detail::Stopwatch clock;
  OptimizerConfig cfg;
  const int rotations = detail::full(s) ? 3 : 1;
  std::uint64_t trial = 0;
  for (const auto& p : detail::duality_pairs()) {
    for (int t = 0; t < rotations; ++t) {
      auto row = detail::duality_row(p, derive_seed(0x10A, ++trial), cfg);
      double prod = row.diameter * row.inclusion;
      r.expect(std::fabs(prod - 2.0) <= 2e-4, p.label + ": diam " + detail::fmt(row.diameter) + " * incl " +
                                                  detail::fmt(row.inclusion) + " = " + detail::fmt(prod));
    }
  }
  r.note("info: the exact relation is diam(K° ∩ UL°)/2 = 1/min_u max(h_K, h_UL); since the inclusion radius is "
         "min_u (h_K + h_UL), the product lies in [2, 4] and equals 4 when K = L = D (see check 10a')");
  r.seconds = clock.seconds();
  return r;
}

/// The relation that does hold, plus the [2, 4] sandwich for the literal product.
inline CheckResult check_duality_corrected(Scale s) {
  auto r = detail::start("10a'", "diam(K° ∩ UL°)/2 * min_u max(h_K, h_UL) = 1; literal product in [2, 4]");
  waistlab::detail::Stopwatch clock;
  OptimizerConfig cfg;
  const int rotations = detail::full(s) ? 3 : 1;
  std::uint64_t trial = 0;
  for (const auto& p : detail::duality_pairs()) {
    for (int t = 0; t < rotations; ++t) {
      auto row = detail::duality_row(p, derive_seed(0x10A, ++trial), cfg);
      double ident = 0.5 * row.diameter * row.minmax;
      double prod = row.diameter * row.inclusion;
      bool ok = std::fabs(ident - 1.0) <= 1e-4 && prod >= 2.0 * (1 - 1e-4) && prod <= 4.0 * (1 + 1e-4);
      r.expect(ok, p.label + ": identity " + detail::fmt(ident) + ", product " + detail::fmt(prod));
    }
  }
  r.seconds = clock.seconds();
  return r;
}

inline CheckResult check_cylinder_stability(Scale s) {
  auto r = detail::start("10b", "cylinder construction, k/n = 1/2: p95 diameter finite, C_fit stable within 25%");
  waistlab::detail::Stopwatch clock;
  TwoBodiesConfig c;
  c.sweep = {{8, 4}, {10, 5}, {12, 6}};
  c.trials = detail::full(s) ? 200 : 30;
  ExperimentReport rep = run_two_bodies(c, 0x10B);
  std::vector<double> fits;
  for (const auto& e : rep.summary["sweep"]) {
    const json& p95 = e["diameter"]["q95"];
    bool finite = p95.is_number() && std::isfinite(p95.get<double>()) && e["truncated_trials"].get<std::size_t>() == 0;
    double fit = e["C_fit_p95"].is_number() ? e["C_fit_p95"].get<double>() : kInf;
    fits.push_back(fit);
    r.expect(finite, "n=" + e["n"].dump() + " k=" + e["k"].dump() + ": p95 diameter " + p95.dump() + ", max " +
                         e["diameter"]["max"].dump() + ", C_fit_p95 " + detail::fmt(fit) + ", truncated " +
                         e["truncated_trials"].dump());
  }
  double mean = 0.0;
  for (double f : fits) mean += f / fits.size();
  double spread = 0.0;
  for (double f : fits) spread = std::max(spread, std::fabs(f / mean - 1.0));
  r.expect(spread <= 0.25, "largest relative deviation of C_fit_p95 from its mean: " + detail::fmt(spread));
  r.seconds = clock.seconds();
  return r;
}

inline CheckResult check_ball_anchor(Scale s) {
  auto r = detail::start("10c", "K = L = D: every diameter is exactly 2");
  waistlab::detail::Stopwatch clock;
  TwoBodiesConfig c;
  c.construction = "explicit";
  c.n = 8;
  c.k = 4;
  c.K = detail::ball_spec(8, 1.0);
  c.L = detail::ball_spec(8, 1.0);
  c.trials = detail::full(s) ? 200 : 20;
  ExperimentReport rep = run_two_bodies(c, 0x10C);
  std::size_t off = 0;
  for (double d : rep.trials.values("diameter")) off += d != 2.0;
  r.expect(off == 0, std::to_string(off) + " of " + std::to_string(c.trials) + " trials differ from 2; C_fit = " +
                         rep.summary["C_fit"].dump() + " (2^{k/n} = " + detail::fmt(std::pow(2.0, 0.5)) + ")");
  r.seconds = clock.seconds();
  return r;
}

inline CheckResult check_global_vr(Scale s) {
  auto r = detail::start("11", "Rogers-Shephard triangle ratio, cube volume ratio, n=6 k=3 pipeline");
  waistlab::detail::Stopwatch clock;
  const std::size_t samples = detail::full(s) ? 2000000 : 200000;
  spec::VertexPolytope tri;
  tri.vertices = {{1.0, 0.0}, {-0.5, std::sqrt(3.0) / 2}, {-0.5, -std::sqrt(3.0) / 2}};
  BodyOracle T = construct_body(BodySpec{tri});
  BodyOracle DT = difference_body(T);
  Estimate vT = mc_volume(T, samples, 0x11A);
  Estimate vD = mc_volume(DT, samples, 0x11B);
  double ratio = vD.value / vT.value;
  double se = ratio * std::hypot(vD.standard_error / vD.value, vT.standard_error / vT.value);
  r.expect(std::fabs(ratio - 6.0) <= 3.0 * se, "triangle |K-K|/|K| = " + detail::fmt(ratio) + " +- " + detail::fmt(se));
  Estimate A = volume_ratio(construct_body(detail::cube(2, 1.0)), samples, 0x11C);
  const double want = std::sqrt(4.0 / kPi);
  r.expect(std::fabs(A.value - want) <= 3.0 * A.standard_error,
           "volume_ratio(cube(1), n=2) = " + detail::fmt(A.value) + " +- " + detail::fmt(A.standard_error) +
               " (expected " + detail::fmt(want) + ")");

  waistlab::detail::Stopwatch pipe;
  GlobalVrConfig g;
  g.K = detail::cross(6, std::sqrt(6.0));
  g.k = 3;
  g.trials = detail::full(s) ? 50 : 10;
  g.volume_samples = detail::full(s) ? 400000 : 50000;
  ExperimentReport rep = run_global_vr(g, 0x11D);
  double t = pipe.seconds();
  bool fields = rep.summary.contains("volume_ratio") && rep.summary.contains("rogers_shephard_ratio") &&
                rep.summary.contains("diameter") && rep.summary.contains("beta_fit") &&
                rep.trials.rows.size() == g.trials;
  r.expect(fields && rep.summary["rogers_shephard_holds"].get<bool>(),
           "pipeline n=6 k=3: A = " + rep.summary["volume_ratio"]["value"].dump() + ", beta_fit = " +
               rep.summary["beta_fit"].dump() + ", " + detail::fmt(t) + " s");
  if (detail::full(s)) r.expect(t < 300.0, "pipeline runtime " + detail::fmt(t) + " s (limit 300 s)");
  r.seconds = clock.seconds();
  return r;
}

/// Small config for each harness, used by the determinism check.
inline std::vector<std::pair<std::string, ExperimentConfig>> determinism_configs() {
  std::vector<std::pair<std::string, ExperimentConfig>> out;
  TwoBodiesConfig tb;
  tb.n = 6;
  tb.k = 3;
  tb.trials = 8;
  out.emplace_back("two-bodies", tb);
  TwoBodiesConfig dual;
  dual.construction = "explicit";
  dual.mode = "dual";
  dual.n = 4;
  dual.k = 2;
  dual.K = detail::cube(4, 1.0);
  dual.L = detail::cross(4, 2.0);
  dual.trials = 6;
  out.emplace_back("two-bodies (dual)", dual);
  SectionsConfig sc;
  sc.K = detail::cube(4, 1.0);
  sc.k_exist = 2;
  sc.k_query = {1, 2, 3};
  sc.trials = 6;
  out.emplace_back("sections", sc);
  auto core = core_catalog(10)[0];
  core.sigma_samples = 20000;
  core.covering.interior_probes = 2000;
  core.covering.boundary_probes = 500;
  out.emplace_back("core", core);
  HigherSphereConfig hs;
  hs.randomize_dims = true;
  hs.configurations = 4;
  hs.samples = 20000;
  hs.claim_samples = 2000;
  out.emplace_back("higher-sphere", hs);
  ProjectionConfig pc;
  pc.K = detail::cylinder_product(5, 2, 0.1);
  pc.k = 2;
  pc.eps = {0.1, 0.3};
  pc.samples = 40000;
  pc.waist_samples = 20;
  out.emplace_back("projection", pc);
  GlobalVrConfig gv;
  gv.K = detail::cross(4, 2.0);
  gv.k = 2;
  gv.trials = 4;
  gv.volume_samples = 40000;
  out.emplace_back("global-vr", gv);
  return out;
}

inline CheckResult check_determinism(Scale) {
  auto r = detail::start("12", "same seed reproduces trials.csv byte-for-byte (also across worker counts)");
  waistlab::detail::Stopwatch clock;
  const char* prev = std::getenv("WAISTLAB_THREADS");
  std::string saved = prev ? prev : "";
  for (const auto& [name, cfg] : determinism_configs()) {
    setenv("WAISTLAB_THREADS", "1", 1);
    std::string a = trials_csv(run_experiment(cfg, 12345).trials);
    std::string b = trials_csv(run_experiment(cfg, 12345).trials);
    setenv("WAISTLAB_THREADS", "3", 1);
    std::string c = trials_csv(run_experiment(cfg, 12345).trials);
    std::string d = trials_csv(run_experiment(cfg, 12346).trials);
    r.expect(a == b && a == c, name + ": rerun identical " + (a == b ? "yes" : "no") + ", 3 workers identical " +
                                   (a == c ? "yes" : "no") + ", other seed differs " + (a != d ? "yes" : "no"));
  }
  if (prev) {
    setenv("WAISTLAB_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("WAISTLAB_THREADS");
  }
  r.seconds = clock.seconds();
  return r;
}

/// Criteria in order. `literal` selects the literal 10a statement; otherwise
/// the corrected relation is used in its place.
inline std::vector<Check> all_checks(bool literal) {
  std::vector<Check> out{
      {"1", "", check_exact_measure},       {"2", "", check_complement_identity},
      {"3", "", check_cap_bounds},          {"4", "", check_gaussian_fact},
      {"5", "", check_higher_sphere},       {"6", "", check_projection},
      {"7", "", check_segment_cap},         {"8", "", check_entropy},
      {"9", "", check_core_lemma},
  };
  if (literal) out.push_back({"10a", "", check_duality_literal});
  out.push_back({"10a'", "", check_duality_corrected});
  out.push_back({"10b", "", check_cylinder_stability});
  out.push_back({"10c", "", check_ball_anchor});
  out.push_back({"11", "", check_global_vr});
  out.push_back({"12", "", check_determinism});
  return out;
}

}  // namespace waistlab::verify
