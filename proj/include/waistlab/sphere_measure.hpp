#pragma once

// Measures of geodesic neighborhoods of equatorial subspheres, their
// Monte-Carlo counterpart, and the closed-form waist/cap/chi-square bounds.
//
// Notation: σ_{m,j}(θ) is the normalized measure on S^m ⊂ R^{m+1} of the
// θ-neighborhood of the canonical S^j (first j+1 coordinates). A uniform point
// x on S^m is within geodesic distance θ of S^j iff the squared norm of its
// last m−j coordinates is ≤ sin²θ, and that squared norm is
// Beta((m−j)/2, (j+1)/2)-distributed, so σ_{m,j}(θ) = I_{sin²θ}((m−j)/2, (j+1)/2).

#include "waistlab/core.hpp"
#include "waistlab/random.hpp"
#include "waistlab/special_functions.hpp"

#include <algorithm>
#include <cstdint>

namespace waistlab {

struct SubsphereQuery {
  int sphere_dim = 1;     ///< m: manifold dimension of S^m
  int subsphere_dim = 0;  ///< j: manifold dimension of the canonical S^j
  double theta = 0.0;     ///< neighborhood radius in radians, (0, π/2]

  void validate() const {
    if (sphere_dim < 1) throw DomainError("sphere_dim must be >= 1");
    if (subsphere_dim < 0 || subsphere_dim >= sphere_dim) {
      throw DomainError("subsphere_dim must satisfy 0 <= j < m (got j=" + std::to_string(subsphere_dim) +
                        ", m=" + std::to_string(sphere_dim) + ")");
    }
    if (!(theta > 0.0) || theta > kPi / 2) throw DomainError("theta must lie in (0, pi/2]");
  }
};

/// Unnamed absolute constants. The defaults are fitted once against the exact
/// measures over the full verification grids and then frozen; see README.
struct BoundConstants {
  double c_small = 0.2;
  double C_big = 2.0;
  double C1_sched = 1.0;
  double c2_sched = 0.5;
  double a_frac = 1.0 / 33.0;

  void validate() const {
    if (!(c_small > 0) || !(C_big > 0) || !(C1_sched > 0) || !(c2_sched > 0)) {
      throw DomainError("bound constants must be strictly positive");
    }
    if (!(a_frac > 0.0) || !(a_frac < 1.0)) throw DomainError("a_frac must lie in (0, 1)");
  }
};

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline double sigma_exact(const SubsphereQuery& q) {
  q.validate();
  if (q.theta == kPi / 2) return 1.0;
  const double s = std::sin(q.theta);
  const double c = std::cos(q.theta);
  const double a = 0.5 * (q.sphere_dim - q.subsphere_dim);
  const double b = 0.5 * (q.subsphere_dim + 1);
  return special::ibeta(a, b, s * s, c * c);
}

inline double sigma_exact(int m, int j, double theta) { return sigma_exact(SubsphereQuery{m, j, theta}); }

/// Monte-Carlo estimate of σ_{m,j}(θ): uniform points on S^m, geodesic
/// distance to S^j taken as arcsin of the norm of the orthogonal component.
inline Estimate sigma_mc(const SubsphereQuery& q, std::size_t samples, std::uint64_t seed) {
  q.validate();
  if (samples < 1) throw DomainError("sigma_mc needs at least one sample");
  const int ambient = q.sphere_dim + 1;
  const int span = q.subsphere_dim + 1;
  const double theta = q.theta;
  std::size_t hits = count_hits(samples, seed, [&](Rng& rng) {
    std::normal_distribution<double> normal;
    double inside = 0.0;
    double outside = 0.0;
    for (int i = 0; i < ambient; ++i) {
      double g = normal(rng);
      (i < span ? inside : outside) += g * g;
    }
    double perp = std::sqrt(outside / (inside + outside));
    return std::asin(std::min(perp, 1.0)) <= theta;
  });
  return proportion(hits, samples);
}

/// Right-hand side of the relaxed waist inequality σ^Lip_{n,k}(θ) ≥ σ_{2n−k+1,k−1}(θ).
inline double sigma_lip_lower(int n, int k, double theta) {
  if (k < 1 || k >= n) throw DomainError("sigma_lip_lower requires 1 <= k < n");
  return sigma_exact(2 * n - k + 1, k - 1, theta);
}

/// arcsin √(ε²k/n): the cap angle at which the small-cap bounds are stated.
inline double cap_angle(int n, int k, double eps) { return std::asin(std::sqrt(eps * eps * k / n)); }

/// arcsin √(1 − ε²k/n): the complementary angle.
inline double cap_angle_complement(int n, int k, double eps) {
  return std::asin(std::sqrt(1.0 - eps * eps * k / n));
}

struct CapBounds {
  double lower = 0;        ///< (cε)^{2k}
  double upper = 0;        ///< (Cε)^{k/2}
  double lower_compl = 0;  ///< 1 − (Cε)^{k/2}
  double upper_compl = 0;  ///< 1 − (cε)^k
};

namespace detail {
inline void check_bound_domain(int n, int k, double eps) {
  if (!(1 < k && k <= n)) throw DomainError("bounds require 1 < k <= n");
  if (!(eps > 0.0 && eps < 0.5)) throw DomainError("bounds require 0 < eps < 1/2");
}
}  // namespace detail

/// Bounds sandwiching σ_{n−1,n−k−1}(cap_angle) and σ_{n−1,k−1}(cap_angle_complement).
inline CapBounds cap_bounds(int n, int k, double eps, const BoundConstants& consts = {}) {
  detail::check_bound_domain(n, k, eps);
  consts.validate();
  const double ce = consts.c_small * eps;
  const double Ce = consts.C_big * eps;
  return {clamp01(std::pow(ce, 2.0 * k)), clamp01(std::pow(Ce, 0.5 * k)), clamp01(1.0 - std::pow(Ce, 0.5 * k)),
          clamp01(1.0 - std::pow(ce, static_cast<double>(k)))};
}

struct LipBounds {
  double bound_i = 0;   ///< lower bound for σ^Lip_{n−1,n−k−1}(cap_angle): (cε)^{8k}
  double bound_ii = 0;  ///< lower bound for σ^Lip_{n−1,k−1}(cap_angle_complement): 1 − (Cε)^{k/4}
};

inline LipBounds lip_bounds(int n, int k, double eps, const BoundConstants& consts = {}) {
  detail::check_bound_domain(n, k, eps);
  consts.validate();
  return {clamp01(std::pow(consts.c_small * eps, 8.0 * k)), clamp01(1.0 - std::pow(consts.C_big * eps, 0.25 * k))};
}

/// P{χ²_k ≤ x}.
inline double chisq_cdf(int k, double x) {
  if (k < 1) throw DomainError("chi-square degrees of freedom must be >= 1");
  if (x < 0.0) throw DomainError("chi-square argument must be nonnegative");
  return special::gamma_p(0.5 * k, 0.5 * x);
}

/// P{χ²_k > x}, computed directly so deep tails do not cancel to zero.
inline double chisq_sf(int k, double x) {
  if (k < 1) throw DomainError("chi-square degrees of freedom must be >= 1");
  if (x < 0.0) throw DomainError("chi-square argument must be nonnegative");
  return special::gamma_q(0.5 * k, 0.5 * x);
}

struct GaussianFactReport {
  // Tail: P{g₁²+…+g_k² > M²k} ≤ 2e^{−cM²k}
  double tail_probability = 0;
  double tail_bound = 0;
  bool tail_ok = false;
  // Small ball: (cε)^k ≤ P{g₁²+…+g_k² ≤ ε²k} ≤ (Cε)^k
  double smallball_probability = 0;
  double smallball_lower = 0;
  double smallball_upper = 0;
  bool smallball_ok = false;
};

inline GaussianFactReport gaussian_fact_check(int k, double M, double eps, const BoundConstants& consts = {}) {
  if (k < 1) throw DomainError("k must be >= 1");
  if (!(M >= 2.0)) throw DomainError("tail check requires M >= 2");
  if (!(eps > 0.0)) throw DomainError("small-ball check requires eps > 0");
  consts.validate();
  GaussianFactReport r;
  r.tail_probability = chisq_sf(k, M * M * k);
  r.tail_bound = 2.0 * std::exp(-consts.c_small * M * M * k);
  r.tail_ok = r.tail_probability <= r.tail_bound;
  r.smallball_probability = chisq_cdf(k, eps * eps * k);
  r.smallball_lower = std::pow(consts.c_small * eps, static_cast<double>(k));
  r.smallball_upper = std::pow(consts.C_big * eps, static_cast<double>(k));
  r.smallball_ok = r.smallball_lower <= r.smallball_probability && r.smallball_probability <= r.smallball_upper;
  return r;
}

}  // namespace waistlab
