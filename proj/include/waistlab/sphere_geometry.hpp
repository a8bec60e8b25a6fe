#pragma once

// Haar rotations and random frames, geodesic distance, δ-nets on the sphere,
// the spherical projection onto a coordinate subsphere, and the odd lifting
// of a waist through a projection.

#include "waistlab/convex_bodies.hpp"
#include "waistlab/random.hpp"
#include "waistlab/sphere_measure.hpp"

#include <json.hpp>

#include <algorithm>
#include <optional>
#include <string>

namespace waistlab {

struct Rotation {
  Mat matrix;
  double residual = 0.0;  ///< ‖UᵀU − I‖_max
};

/// Haar-distributed element of O(n): Gaussian matrix, QR, columns sign-fixed
/// by diag(R), then a fair ±1 on the last column.
inline Rotation haar_rotation(int n, Rng& rng) {
  if (n < 1) throw DomainError("haar_rotation requires n >= 1");
  std::normal_distribution<double> normal;
  Mat G(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) G(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ() * Mat::Identity(n, n);
  Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  }
  if (std::bernoulli_distribution(0.5)(rng)) Q.col(n - 1) *= -1.0;
  return {Q, orthogonality_residual(Q)};
}

inline Rotation haar_rotation(int n, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  return haar_rotation(n, rng);
}

struct Subspace {
  Mat basis;  ///< k×n, orthonormal rows

  int dim() const { return static_cast<int>(basis.rows()); }
  int ambient() const { return static_cast<int>(basis.cols()); }
  double gram_residual() const {
    return (basis * basis.transpose() - Mat::Identity(basis.rows(), basis.rows())).cwiseAbs().maxCoeff();
  }
  /// Point of Rⁿ with coordinates z in the frame.
  Vec embed(const Vec& z) const { return basis.transpose() * z; }
  Vec coords(const Vec& x) const { return basis * x; }

  static Subspace coordinate(int n, int k) {
    if (k < 1 || k > n) throw DomainError("subspace dimension must satisfy 1 <= k <= n");
    return {Mat::Identity(n, n).topRows(k)};
  }

  static Subspace from_rows(const Mat& rows) {
    Subspace s{rows};
    if (rows.rows() < 1 || rows.rows() > rows.cols()) throw DomainError("subspace dimension must satisfy 1 <= k <= n");
    if (s.gram_residual() > kOrthogonalityTol) throw DomainError("subspace rows are not orthonormal to 1e-10");
    return s;
  }
};

inline Subspace random_subspace(int n, int k, Rng& rng) {
  if (k < 1 || k > n) throw DomainError("random_subspace requires 1 <= k <= n");
  Rotation U = haar_rotation(n, rng);
  return {U.matrix.topRows(k)};
}

inline Subspace random_subspace(int n, int k, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  return random_subspace(n, k, rng);
}

namespace detail {
inline Vec as_unit(const Vec& x) {
  double r = x.norm();
  if (r == 0.0) throw DomainError("geodesic distance of the zero vector");
  if (std::fabs(r - 1.0) > 1e-8) throw DomainError("geodesic distance needs unit vectors (off by more than 1e-8)");
  return x / r;
}
}  // namespace detail

/// Angle between unit vectors, in [0, π]. The atan2 form stays accurate near
/// 0 and π where arccos of the inner product loses half the digits.
inline double geodesic_distance(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw DimensionMismatch(static_cast<int>(x.size()), static_cast<int>(y.size()));
  Vec a = detail::as_unit(x);
  Vec b = detail::as_unit(y);
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

/// x ↦ P x / |P x| with P the projection onto the first n_sub coordinates.
inline Vec spherical_projection(const Vec& x, int n_sub) {
  if (n_sub < 1 || n_sub > x.size()) throw DomainError("spherical_projection: target dimension out of range");
  Vec p = x.head(n_sub);
  double r = p.norm();
  if (r <= 1e-12) throw DomainError("undefined projection: point is orthogonal to the subspace");
  return p / r;
}

// ---------------------------------------------------------------------------
// Nets.

struct SphereNet {
  int dim = 0;                ///< ambient n; points lie on S^{n-1}
  Mat points;                 ///< n×N
  double resolution = 0.0;    ///< certified covering radius δ
  double achieved = 0.0;      ///< largest certified distance from any check point to the net
  bool exhaustive = false;    ///< certified over a reference grid rather than random probes
  std::size_t cardinality() const { return static_cast<std::size_t>(points.cols()); }
};

struct NetOptions {
  std::size_t probes = 10000;
  std::size_t max_points = 200000;
  std::size_t max_grid = 2000000;
  int max_rounds = 20;
};

namespace detail {

/// Points of the cube surface grid with spacing ≤ h, radially projected to
/// the sphere. Any unit vector lies within 2·asin(h√(n−1)/4) of one of them.
inline std::vector<Vec> cube_face_grid(int n, int per_side) {
  std::vector<Vec> out;
  const double h = 2.0 / per_side;
  std::vector<int> idx(n - 1, 0);
  for (int axis = 0; axis < n; ++axis) {
    for (double sign : {-1.0, 1.0}) {
      std::fill(idx.begin(), idx.end(), 0);
      for (;;) {
        Vec p(n);
        int c = 0;
        for (int i = 0; i < n; ++i) {
          p(i) = (i == axis) ? sign : -1.0 + h * (idx[c++] + 0.5);
        }
        out.push_back(p.normalized());
        int d = 0;
        while (d < n - 1 && ++idx[d] == per_side) idx[d++] = 0;
        if (d == n - 1) break;
      }
    }
  }
  return out;
}

inline double grid_radius(int n, int per_side) {
  const double h = 2.0 / per_side;
  return 2.0 * std::asin(std::min(1.0, h * std::sqrt(n - 1.0) / 4.0));
}

/// Greedy farthest-point insertion over a candidate pool until every pool
/// point is within `target` of the net.
inline std::vector<Vec> farthest_point_net(const std::vector<Vec>& pool, double target, std::size_t first,
                                           std::size_t max_points) {
  std::vector<Vec> net;
  std::vector<double> best_cos(pool.size(), -2.0);
  const double cos_target = std::cos(target);
  std::size_t next = first;
  for (;;) {
    net.push_back(pool[next]);
    if (net.size() > max_points) throw CertificationFailure("net size cap exceeded");
    const Vec& c = net.back();
    double worst = 2.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      best_cos[i] = std::max(best_cos[i], pool[i].dot(c));
      if (best_cos[i] < worst) {
        worst = best_cos[i];
        next = i;
      }
    }
    if (worst >= cos_target) return net;
  }
}

inline Mat to_columns(const std::vector<Vec>& pts, int n) {
  Mat M(n, pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) M.col(static_cast<Eigen::Index>(i)) = pts[i];
  return M;
}

/// Largest angle from any of `checks` to the nearest column of `net`, and the
/// index of the worst check point.
inline std::pair<double, std::size_t> coverage(const Mat& net, const std::vector<Vec>& checks) {
  double worst = 2.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    double c = (net.transpose() * checks[i]).maxCoeff();
    if (c < worst) {
      worst = c;
      arg = i;
    }
  }
  return {std::acos(std::clamp(worst, -1.0, 1.0)), arg};
}

}  // namespace detail

/// Rough count of δ-caps needed to cover S^{n−1}: 1/σ(cap of radius δ).
inline double net_size_estimate(int n, double delta) {
  if (n == 1) return 2.0;
  return 2.0 / sigma_exact(n - 1, 0, delta);
}

/// A δ-net of S^{n−1}. For n ≤ 4 (and a grid of manageable size) coverage is
/// certified exhaustively: the net covers a cube-face reference grid to
/// within δ − ρ_grid. Otherwise it is certified against random probes; probes
/// left uncovered are added and fresh probes drawn, up to max_rounds.
inline SphereNet build_net(int n, double delta, std::uint64_t seed, const NetOptions& opt = {}) {
  if (!(delta > 0.0) || !(delta < kPi / 2)) throw DomainError("build_net requires 0 < delta < pi/2");
  if (n < 1 || n > 12) throw DomainError("build_net supports 1 <= n <= 12");
  SphereNet net;
  net.dim = n;
  net.resolution = delta;
  if (n == 1) {
    net.points = Mat(1, 2);
    net.points << 1.0, -1.0;
    net.exhaustive = true;
    return net;
  }
  if (net_size_estimate(n, delta) > static_cast<double>(opt.max_points)) {
    throw CertificationFailure("a " + std::to_string(delta) + "-net of S^" + std::to_string(n - 1) +
                               " would exceed the size cap");
  }
  Rng rng = make_rng(seed, 0x5E7);

  if (n <= 4) {
    // Finest grid within budget, keeping ρ_grid ≤ δ/2.
    int per_side = 1;
    while (detail::grid_radius(n, per_side) > delta / 8.0 &&
           2.0 * n * std::pow(per_side + 1.0, n - 1) <= static_cast<double>(opt.max_grid)) {
      ++per_side;
    }
    const double rho = detail::grid_radius(n, per_side);
    if (rho <= delta / 2.0) {
      auto grid = detail::cube_face_grid(n, per_side);
      std::size_t first = std::uniform_int_distribution<std::size_t>(0, grid.size() - 1)(rng);
      auto pts = detail::farthest_point_net(grid, delta - rho, first, opt.max_points);
      net.points = detail::to_columns(pts, n);
      net.achieved = detail::coverage(net.points, grid).first + rho;
      net.exhaustive = true;
      if (net.achieved > delta) throw CertificationFailure("net failed exhaustive certification");
      return net;
    }
  }

  const std::size_t pool_size = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(opt.max_points) * 4.0, std::max(2000.0, 20.0 * net_size_estimate(n, delta))));
  std::vector<Vec> pool;
  pool.reserve(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) pool.push_back(uniform_on_sphere(n, rng));
  auto pts = detail::farthest_point_net(pool, 0.8 * delta, 0, opt.max_points);
  for (int round = 0; round < opt.max_rounds; ++round) {
    std::vector<Vec> probes;
    probes.reserve(opt.probes);
    for (std::size_t i = 0; i < opt.probes; ++i) probes.push_back(uniform_on_sphere(n, rng));
    Mat M = detail::to_columns(pts, n);
    auto [worst, arg] = detail::coverage(M, probes);
    if (worst <= delta) {
      net.points = std::move(M);
      net.achieved = worst;
      return net;
    }
    // Extend: every uncovered probe joins the net.
    for (const auto& p : probes) {
      if ((M.transpose() * p).maxCoeff() < std::cos(delta)) pts.push_back(p);
    }
    if (pts.size() > opt.max_points) break;
  }
  throw CertificationFailure("net failed probabilistic certification after retries");
}

inline nlohmann::ordered_json to_json(const SphereNet& net) {
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < net.points.cols(); ++i) pts.push_back(to_std(net.points.col(i)));
  return {{"dim", net.dim},         {"resolution", net.resolution}, {"achieved", net.achieved},
          {"exhaustive", net.exhaustive}, {"cardinality", net.cardinality()}, {"points", pts}};
}

inline nlohmann::ordered_json to_json(const Rotation& U) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < U.matrix.rows(); ++i) rows.push_back(to_std(U.matrix.row(i).transpose()));
  return {{"matrix", rows}, {"residual", U.residual}};
}

// ---------------------------------------------------------------------------
// Waist lifting.

/// Checks PK ⊇ PD on sampled unit directions v of the subspace: the support
/// of PK at v is h_K(Pᵀv) and must be ≥ 1. Throws with the worst direction.
inline void check_projection_hypothesis(const BodyOracle& K, const Subspace& P, std::size_t probes, std::uint64_t seed) {
  if (P.ambient() != K.dim()) throw DimensionMismatch(P.ambient(), K.dim());
  Rng rng = make_rng(seed, 0x9A0);
  const int k = P.dim();
  auto check = [&](const Vec& z) {
    if (K.support(P.embed(z)) < 1.0 - kMembershipTol) {
      throw HypothesisFailure("projection of the body does not contain the projected unit ball", P.embed(z));
    }
  };
  for (int i = 0; i < k; ++i) {
    check(unit_vector(k, i));
    check(-unit_vector(k, i));
  }
  for (std::size_t i = 0; i < probes; ++i) check(uniform_on_sphere(k, rng));
}

struct Lift {
  Vec g;  ///< minimal-norm point of K with P g = x
  Vec f;  ///< g / |g|
};

namespace detail {
inline Lift lift_raw(const BodyOracle& K, const Subspace& P, const Vec& x) {
  Vec start = P.embed(x);
  auto sets = K.model().constraint_projectors();
  Mat B = P.basis;
  sets.emplace_back([B, x](const Vec& y) -> Vec { return y - B.transpose() * (B * y - x); });
  Vec g = solvers::dykstra(start, sets, 1e-14, 20000).point;
  g -= B.transpose() * (B * g - x);
  if (K.distance(g) > 1e-7) throw HypothesisFailure("empty fiber: projection hypothesis violated at this point", start);
  return {g, g / g.norm()};
}
}  // namespace detail

/// The odd lifting g : S^{k−1} → K through P, selecting the minimal-norm
/// point of each fiber K ∩ P⁻¹(x); f = g/|g| lands in K ∩ S^{n−1}. The
/// minimal-norm point of the fiber is the projection of Pᵀx onto it, computed
/// by Dykstra over K's constraint sets and the affine fiber. x may be given
/// in frame coordinates (length k) or in Rⁿ (length n, inside the range).
inline Lift lift_waist(const BodyOracle& K, const Subspace& P, const Vec& x_in) {
  if (P.ambient() != K.dim()) throw DimensionMismatch(P.ambient(), K.dim());
  Vec x;
  if (x_in.size() == P.dim()) {
    x = x_in;
  } else if (x_in.size() == P.ambient()) {
    x = P.coords(x_in);
    if ((P.embed(x) - x_in).norm() > 1e-8) throw DomainError("lift_waist: point is not in the range of P");
  } else {
    throw DimensionMismatch(static_cast<int>(x_in.size()), P.dim());
  }
  if (std::fabs(x.norm() - 1.0) > 1e-8) throw DomainError("lift_waist: point must be a unit vector");
  x.normalize();
  if (!K.symmetric()) return detail::lift_raw(K, P, x);
  // Evaluate on a canonical half of the sphere so that g(−x) = −g(x) exactly.
  Eigen::Index lead = 0;
  x.cwiseAbs().maxCoeff(&lead);
  if (x(lead) > 0.0) return detail::lift_raw(K, P, x);
  Lift l = detail::lift_raw(K, P, -x);
  return {-l.g, -l.f};
}

/// If d(y, z) ≤ arcsin ε then z lies within ε of the segment [−y, y].
inline bool segment_cap_check(const Vec& y, const Vec& z, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw DomainError("segment_cap_check requires 0 < eps < 1");
  if (geodesic_distance(y, z) > std::asin(eps)) return true;
  Vec yu = y.normalized();
  Vec zu = z.normalized();
  double t = std::clamp(zu.dot(yu), -1.0, 1.0);
  return (zu - t * yu).norm() <= eps + 1e-12;
}

}  // namespace waistlab
