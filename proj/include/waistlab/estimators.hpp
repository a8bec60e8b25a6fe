#pragma once

// Measurable quantities: sphere measure of ε-neighborhoods of a body,
// covering numbers, diameters of K ∩ UL, inclusion radii of K + UL, and
// section diameters.

#include "waistlab/sphere_optimizer.hpp"

#include <optional>
#include <string>

namespace waistlab {

/// σ_{n−1}(K + εD): fraction of uniform sphere points within ε of K.
inline Estimate mc_sigma_body(const BodyOracle& K, double eps, std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("mc_sigma_body needs at least one sample");
  if (!(eps >= 0.0)) throw DomainError("mc_sigma_body: eps must be nonnegative");
  const int n = K.dim();
  std::size_t hits = count_hits(samples, seed, [&](Rng& rng) { return K.distance(uniform_on_sphere(n, rng)) <= eps; });
  return proportion(hits, samples);
}

// ---------------------------------------------------------------------------
// Covering numbers.

struct CoveringOptions {
  std::size_t interior_probes = 20000;
  std::size_t boundary_probes = 5000;
  std::size_t max_centers = 100000;
  std::uint64_t seed = 1;
};

struct CoveringResult {
  std::size_t count = 0;
  std::vector<Vec> centers;
  std::size_t probes = 0;
  std::optional<double> volumetric_bound;  ///< |L + K/2| / |K/2| when both volumes are closed-form
};

namespace detail {
inline std::optional<double> ball_radius_of(const BodyOracle& B) {
  if (auto b = dynamic_cast<const models::BallModel*>(&B.model())) return b->radius();
  return std::nullopt;
}
}  // namespace detail

/// Greedy upper bound on N(L, K): repeatedly take an uncovered probe point p of
/// L and add a translate of K that contains p, chosen among centers on the ray
/// through p (including the one pushed against ∂L) to cover the most
/// uncovered probes. Probes are uniform in L plus points on ∂L; the count
/// bounds the number of translates needed for the probe set.
inline CoveringResult covering_number_upper(const BodyOracle& L, const BodyOracle& K, const CoveringOptions& opt = {}) {
  if (L.dim() != K.dim()) throw DimensionMismatch(L.dim(), K.dim());
  if (!std::isfinite(L.outer_radius())) throw DomainError("covering_number_upper: L must be bounded");
  if (!(K.inner_radius() > 0.0) || K.flat()) throw DomainError("covering_number_upper: K must have interior");
  const int n = L.dim();
  Rng rng = make_rng(opt.seed, 0xC07E);
  std::vector<Vec> probes;
  const double R = L.outer_radius();
  std::size_t attempts = 0;
  while (probes.size() < opt.interior_probes && attempts < 200 * opt.interior_probes) {
    ++attempts;
    Vec x = uniform_in_ball(n, R, rng);
    if (L.membership(x)) probes.push_back(std::move(x));
  }
  for (std::size_t i = 0; i < opt.boundary_probes; ++i) {
    Vec u = uniform_on_sphere(n, rng);
    double r = L.radial(u);
    if (std::isfinite(r)) probes.push_back(u * r);
  }
  CoveringResult res;
  res.probes = probes.size();
  std::vector<char> covered(probes.size(), 0);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (covered[i]) continue;
    const Vec& p = probes[i];
    std::vector<Vec> candidates{p};
    double len = p.norm();
    if (len > 0.0) {
      Vec dir = p / len;
      const double fwd = K.radial(dir);
      const double back = K.radial(-dir);
      const double lo = std::max(0.0, len - fwd);
      const double hi = std::min(len + back, L.radial(dir));
      for (int t = 0; t <= 8 && hi > lo; ++t) candidates.push_back(dir * (lo + (hi - lo) * t / 8.0));
      const double push = std::max(0.0, L.radial(dir) - fwd);
      if (push >= len - fwd && push <= len + back) candidates.push_back(dir * push);
      if (lo == 0.0) candidates.push_back(Vec::Zero(n));
    }
    Vec c = p;
    std::size_t best = 0;
    for (const auto& cand : candidates) {
      if (!K.membership(p - cand)) continue;
      std::size_t cnt = 0;
      for (std::size_t j = i; j < probes.size(); ++j) {
        if (!covered[j] && K.membership(probes[j] - cand)) ++cnt;
      }
      if (cnt > best) {
        best = cnt;
        c = cand;
      }
    }
    res.centers.push_back(c);
    if (res.centers.size() > opt.max_centers) throw CertificationFailure("covering: center cap exceeded");
    for (std::size_t j = i; j < probes.size(); ++j) {
      if (!covered[j] && K.membership(probes[j] - c)) covered[j] = 1;
    }
  }
  res.count = res.centers.size();
  auto rl = detail::ball_radius_of(L);
  auto rk = detail::ball_radius_of(K);
  if (rl && rk) res.volumetric_bound = std::pow((*rl + 0.5 * *rk) / (0.5 * *rk), n);
  return res;
}

/// 2ⁿ / σ, the entropy bound for N(D, K).
inline double entropy_bound(int n, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("entropy_bound requires sigma > 0");
  if (sigma > 1.0 + 1e-12) throw DomainError("entropy_bound requires sigma <= 1");
  return std::exp2(static_cast<double>(n)) / sigma;
}

inline double entropy_bound(const BodyOracle& K, double sigma) { return entropy_bound(K.dim(), sigma); }

// ---------------------------------------------------------------------------
// Diameters and inclusion radii.

struct DiameterResult {
  double diameter = 0.0;          ///< 2·max_u min(r_K(u), r_UL(u)) found by the optimizer
  double certified_lower = 0.0;   ///< equal to diameter: every reported value is attained
  double upper = kInf;            ///< Lipschitz bracket from a certified net, ∞ when unavailable
  bool truncation_active = false;
  Vec direction;
  std::string note;
  std::size_t evaluations = 0;
};

namespace detail {

/// Lipschitz constant of u ↦ r_K(u) on the sphere: r_out²/r_in.
inline double radial_lipschitz(const BodyOracle& K) {
  if (!(K.inner_radius() > 0.0)) return kInf;
  return K.outer_radius() * K.outer_radius() / K.inner_radius();
}

inline void require_symmetric(const BodyOracle& K, const char* who) {
  if (!K.symmetric()) throw DomainError(std::string(who) + ": bodies must be symmetric");
}

inline std::string bracket_note(const OptimizerResult& r, std::size_t dim, bool maximize) {
  std::string side = maximize ? "value is a lower bound on the maximum" : "value is an upper bound on the minimum";
  if (dim > 16) return side + "; uncertified mode (n > 16)";
  if (r.net_seeded) return side + (r.net_exhaustive ? "; net-seeded (exhaustively certified net)" : "; net-seeded");
  return side + "; randomly seeded";
}

}  // namespace detail

inline DiameterResult diameter_of_intersection(const BodyOracle& K, const BodyOracle& L, const Mat& U,
                                               const OptimizerConfig& cfg = {}, std::uint64_t seed = 1) {
  if (K.dim() != L.dim()) throw DimensionMismatch(K.dim(), L.dim());
  detail::require_symmetric(K, "diameter_of_intersection");
  detail::require_symmetric(L, "diameter_of_intersection");
  BodyOracle UL = rotate_body(L, U);
  const int n = K.dim();
  auto f = [&](const Vec& u) { return std::min(K.model().radial(u), UL.model().radial(u)); };
  OptimizerResult r = maximize_on_sphere(f, n, cfg, seed);
  DiameterResult out;
  out.diameter = 2.0 * r.value;
  out.certified_lower = out.diameter;
  out.direction = r.argmax;
  out.evaluations = r.evaluations;
  out.note = detail::bracket_note(r, n, true);
  if (r.net_seeded && r.net_exhaustive) {
    double lip = std::max(detail::radial_lipschitz(K), detail::radial_lipschitz(L));
    double chord = 2.0 * std::sin(0.5 * r.net_resolution);
    out.upper = 2.0 * (r.best_seed_value + lip * chord);
  }
  const double trunc = std::min(K.traits().truncation_radius, L.traits().truncation_radius);
  if (std::isfinite(trunc) && r.value >= trunc * (1.0 - 1e-9)) {
    out.truncation_active = true;
    out.note += "; radial reached the truncation radius, intersection is unbounded";
  }
  return out;
}

struct InclusionResult {
  double radius = 0.0;   ///< min_u h_K(u) + h_L(Uᵀu) found by the optimizer (upper bound on the min)
  double lower = -kInf;  ///< Lipschitz bracket from a certified net
  Vec direction;
  std::string note;
  std::size_t evaluations = 0;
};

/// Largest r with rD ⊆ K + UL, i.e. min over unit u of h_K(u) + h_L(Uᵀu).
inline InclusionResult inclusion_radius(const BodyOracle& K, const BodyOracle& L, const Mat& U,
                                        const OptimizerConfig& cfg = {}, std::uint64_t seed = 1) {
  if (K.dim() != L.dim()) throw DimensionMismatch(K.dim(), L.dim());
  if (!K.support_exact() || !L.support_exact()) throw DomainError("inclusion_radius needs exact support evaluators");
  BodyOracle UL = rotate_body(L, U);
  const int n = K.dim();
  auto f = [&](const Vec& u) { return -(K.model().support(u) + UL.model().support(u)); };
  OptimizerResult r = maximize_on_sphere(f, n, cfg, seed);
  InclusionResult out;
  out.radius = -r.value;
  out.direction = r.argmax;
  out.evaluations = r.evaluations;
  out.note = detail::bracket_note(r, n, false);
  if (r.net_seeded && r.net_exhaustive) {
    // h_K is r_out(K)-Lipschitz.
    double lip = K.outer_radius() + L.outer_radius();
    out.lower = -r.best_seed_value - lip * 2.0 * std::sin(0.5 * r.net_resolution);
  }
  return out;
}

/// 2·max over unit u ∈ E of r_K(u).
inline DiameterResult section_diameter(const BodyOracle& K, const Subspace& E, const OptimizerConfig& cfg = {},
                                       std::uint64_t seed = 1) {
  if (E.ambient() != K.dim()) throw DimensionMismatch(E.ambient(), K.dim());
  detail::require_symmetric(K, "section_diameter");
  auto f = [&](const Vec& z) { return K.model().radial(E.embed(z)); };
  OptimizerResult r = maximize_on_sphere(f, E.dim(), cfg, seed);
  DiameterResult out;
  out.diameter = 2.0 * r.value;
  out.certified_lower = out.diameter;
  out.direction = E.embed(r.argmax);
  out.evaluations = r.evaluations;
  out.note = detail::bracket_note(r, static_cast<std::size_t>(E.dim()), true);
  if (r.net_seeded && r.net_exhaustive) {
    out.upper = 2.0 * (r.best_seed_value + detail::radial_lipschitz(K) * 2.0 * std::sin(0.5 * r.net_resolution));
  }
  const double trunc = K.traits().truncation_radius;
  if (std::isfinite(trunc) && r.value >= trunc * (1.0 - 1e-9)) {
    out.truncation_active = true;
    out.note += "; radial reached the truncation radius, section is unbounded";
  }
  return out;
}

}  // namespace waistlab
