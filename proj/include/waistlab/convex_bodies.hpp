#pragma once

// Body combinators (rotation, scaling, intersection, Minkowski sum, polar,
// difference body), the declarative catalog, and hit-or-miss volumes.

#include "waistlab/body_model.hpp"
#include "waistlab/polytope.hpp"
#include "waistlab/random.hpp"

#include <memory>
#include <optional>
#include <variant>

namespace waistlab {

namespace models {

/// U·K for orthogonal U: every evaluator is conjugated by U.
class RotatedModel final : public BodyModel {
 public:
  RotatedModel(BodyPtr base, Mat U) : BodyModel(rename(base->traits())), base_(std::move(base)), U_(std::move(U)) {}

  double support(const Vec& u) const override { return base_->support(back(u)); }
  Vec support_point(const Vec& u) const override { return U_ * base_->support_point(back(u)); }
  double gauge(const Vec& x) const override { return base_->gauge(back(x)); }
  double radial(const Vec& u) const override { return base_->radial(back(u)); }
  Vec project(const Vec& x) const override { return U_ * base_->project(back(x)); }
  double distance(const Vec& x) const override { return base_->distance(back(x)); }
  bool contains(const Vec& x) const override { return base_->contains(back(x)); }

  std::vector<solvers::Projector> constraint_projectors() const override {
    std::vector<solvers::Projector> out;
    for (auto& p : base_->constraint_projectors()) {
      out.emplace_back([p, U = U_](const Vec& y) -> Vec { return U * p(U.transpose() * y); });
    }
    return out;
  }

  BodyPtr closed_polar() const override {
    auto bp = base_->closed_polar();
    return bp ? std::make_shared<RotatedModel>(bp, U_) : nullptr;
  }

  const BodyPtr& base() const { return base_; }
  const Mat& matrix() const { return U_; }

 private:
  static BodyTraits rename(BodyTraits t) {
    t.name = "rotated(" + t.name + ")";
    return t;
  }
  Vec back(const Vec& x) const { return U_.transpose() * x; }

  BodyPtr base_;
  Mat U_;
};

/// s·K for real s ≠ 0 (s < 0 reflects through the origin).
class ScaledModel final : public BodyModel {
 public:
  ScaledModel(BodyPtr base, double s) : BodyModel(make_traits(base->traits(), s)), base_(std::move(base)), s_(s) {}

  double support(const Vec& u) const override { return base_->support(s_ * u); }
  Vec support_point(const Vec& u) const override { return s_ * base_->support_point(s_ * u); }
  double gauge(const Vec& x) const override { return base_->gauge(x / s_); }
  Vec project(const Vec& x) const override { return s_ * base_->project(x / s_); }
  double distance(const Vec& x) const override { return std::fabs(s_) * base_->distance(x / s_); }
  bool contains(const Vec& x) const override { return base_->contains(x / s_); }

  std::vector<solvers::Projector> constraint_projectors() const override {
    std::vector<solvers::Projector> out;
    for (auto& p : base_->constraint_projectors()) {
      out.emplace_back([p, s = s_](const Vec& y) -> Vec { return s * p(y / s); });
    }
    return out;
  }

  BodyPtr closed_polar() const override {
    auto bp = base_->closed_polar();
    return bp ? std::make_shared<ScaledModel>(bp, 1.0 / s_) : nullptr;
  }

 private:
  static BodyTraits make_traits(BodyTraits t, double s) {
    const double a = std::fabs(s);
    t.inner_radius *= a;
    t.outer_radius *= a;
    t.truncation_radius *= a;
    t.name = "scaled(" + t.name + ")";
    return t;
  }

  BodyPtr base_;
  double s_;
};

/// K ∩ L. Support is only an upper bound (min of the two supports); callers
/// needing exactness must go through gauge/radial.
class IntersectionModel final : public BodyModel {
 public:
  IntersectionModel(BodyPtr a, BodyPtr b) : BodyModel(make_traits(*a, *b)), a_(std::move(a)), b_(std::move(b)) {}

  double support(const Vec& u) const override { return std::min(a_->support(u), b_->support(u)); }
  double gauge(const Vec& x) const override { return std::max(a_->gauge(x), b_->gauge(x)); }
  double radial(const Vec& u) const override { return std::min(a_->radial(u), b_->radial(u)); }
  bool contains(const Vec& x) const override { return a_->contains(x) && b_->contains(x); }

  std::vector<solvers::Projector> constraint_projectors() const override {
    auto out = a_->constraint_projectors();
    for (auto& p : b_->constraint_projectors()) out.push_back(std::move(p));
    return out;
  }

  Vec project(const Vec& x) const override { return solvers::dykstra(x, constraint_projectors()).point; }

 private:
  static BodyTraits make_traits(const BodyModel& a, const BodyModel& b) {
    BodyTraits t;
    t.dim = a.dim();
    t.inner_radius = std::min(a.traits().inner_radius, b.traits().inner_radius);
    t.outer_radius = std::min(a.traits().outer_radius, b.traits().outer_radius);
    t.symmetric = a.traits().symmetric && b.traits().symmetric;
    t.support_exact = false;
    t.gauge_exact = a.traits().gauge_exact && b.traits().gauge_exact;
    t.flat = a.traits().flat || b.traits().flat;
    t.truncated = a.traits().truncated || b.traits().truncated;
    t.truncation_radius = std::min(a.traits().truncation_radius, b.traits().truncation_radius);
    t.name = "intersect(" + a.traits().name + "," + b.traits().name + ")";
    return t;
  }

  BodyPtr a_;
  BodyPtr b_;
};

/// K + L. When one summand is a Euclidean ball rB the distance is closed-form,
/// d_{K+rB}(x) = max(d_K(x) − r, 0); otherwise the min-norm-point method runs
/// on the summed support-point oracle.
class SumModel final : public BodyModel {
 public:
  SumModel(BodyPtr a, BodyPtr b) : BodyModel(make_traits(*a, *b)), a_(std::move(a)), b_(std::move(b)) {
    if (auto ball = dynamic_cast<const BallModel*>(b_.get())) {
      ball_radius_ = ball->radius();
      other_ = a_;
    } else if (auto ball_a = dynamic_cast<const BallModel*>(a_.get())) {
      ball_radius_ = ball_a->radius();
      other_ = b_;
    }
  }

  double support(const Vec& u) const override { return a_->support(u) + b_->support(u); }
  Vec support_point(const Vec& u) const override { return a_->support_point(u) + b_->support_point(u); }

  Vec project(const Vec& x) const override {
    if (other_) {
      Vec p = other_->project(x);
      Vec d = x - p;
      double len = d.norm();
      return len <= ball_radius_ ? x : Vec(p + d * (ball_radius_ / len));
    }
    auto lmo = [&](const Vec& d) -> Vec { return support_point(-d) - x; };
    return x + solvers::min_norm_point(lmo, dim(), 1e-18, 10000).point;
  }

  double distance(const Vec& x) const override {
    if (other_) return std::max(other_->distance(x) - ball_radius_, 0.0);
    return (x - project(x)).norm();
  }

  bool contains(const Vec& x) const override { return distance(x) <= kMembershipTol * std::max(1.0, x.norm()); }

  /// Smallest t with x ∈ t(K + L), by bisection on membership.
  double gauge(const Vec& x) const override {
    const double r = x.norm();
    if (r == 0.0) return 0.0;
    const double rin = traits().inner_radius;
    double hi = rin > 0.0 ? r / rin * (1.0 + 1e-12) : 0.0;
    if (hi == 0.0) {
      hi = r / traits().outer_radius;
      for (int i = 0; i < 200 && !inside_scaled(x, hi); ++i) hi *= 2.0;
      if (!inside_scaled(x, hi)) return kInf;
    }
    double lo = r / traits().outer_radius;
    // bisect_threshold keeps the largest t where the predicate holds.
    return solvers::bisect_threshold(lo, hi, [&](double t) { return !inside_scaled(x, t); }, 200);
  }

  BodyPtr closed_polar() const override { return nullptr; }

 private:
  bool inside_scaled(const Vec& x, double t) const { return distance(x / t) <= 1e-13; }

  static BodyTraits make_traits(const BodyModel& a, const BodyModel& b) {
    BodyTraits t;
    t.dim = a.dim();
    t.inner_radius = a.traits().inner_radius + b.traits().inner_radius;
    t.outer_radius = a.traits().outer_radius + b.traits().outer_radius;
    t.symmetric = a.traits().symmetric && b.traits().symmetric;
    t.support_exact = a.traits().support_exact && b.traits().support_exact;
    t.gauge_exact = false;
    t.flat = a.traits().flat && b.traits().flat;
    t.truncated = a.traits().truncated || b.traits().truncated;
    t.truncation_radius = a.traits().truncation_radius + b.traits().truncation_radius;
    t.name = "sum(" + a.traits().name + "," + b.traits().name + ")";
    return t;
  }

  BodyPtr a_;
  BodyPtr b_;
  BodyPtr other_;
  double ball_radius_ = 0.0;
};

/// K° for K with the origin in its interior. h_{K°} = ‖·‖_K and ‖·‖_{K°} = h_K.
class PolarModel final : public BodyModel {
 public:
  explicit PolarModel(BodyPtr base) : BodyModel(make_traits(base->traits())), base_(std::move(base)) {}

  double support(const Vec& u) const override { return base_->gauge(u); }
  double gauge(const Vec& x) const override { return base_->support(x); }
  bool contains(const Vec& x) const override { return base_->support(x) <= 1.0 + kMembershipTol; }

  /// A subgradient of ‖·‖_K at u, by central differences.
  Vec support_point(const Vec& u) const override {
    const double h = 1e-6 * std::max(1.0, u.norm());
    Vec g(dim());
    for (int i = 0; i < dim(); ++i) {
      Vec up = u;
      Vec dn = u;
      up(i) += h;
      dn(i) -= h;
      g(i) = (base_->gauge(up) - base_->gauge(dn)) / (2.0 * h);
    }
    return g;
  }

  BodyPtr closed_polar() const override { return base_; }

 private:
  static BodyTraits make_traits(BodyTraits t) {
    BodyTraits p;
    p.dim = t.dim;
    p.inner_radius = 1.0 / t.outer_radius;
    p.outer_radius = 1.0 / t.inner_radius;
    p.symmetric = t.symmetric;
    p.support_exact = t.gauge_exact;
    p.gauge_exact = t.support_exact;
    p.name = "polar(" + t.name + ")";
    return p;
  }

  BodyPtr base_;
};

}  // namespace models

// ---------------------------------------------------------------------------
// Operations on oracles.

inline BodyOracle make_body(BodyPtr p) { return BodyOracle(std::move(p)); }

inline BodyOracle ball(int n, double r = 1.0) { return make_body(std::make_shared<models::BallModel>(n, r)); }

inline BodyOracle intersect(const BodyOracle& K, const BodyOracle& L) {
  if (K.dim() != L.dim()) throw DimensionMismatch(K.dim(), L.dim());
  return make_body(std::make_shared<models::IntersectionModel>(K.model_ptr(), L.model_ptr()));
}

inline BodyOracle minkowski_sum(const BodyOracle& K, const BodyOracle& L) {
  if (K.dim() != L.dim()) throw DimensionMismatch(K.dim(), L.dim());
  if (dynamic_cast<const models::PointModel*>(&L.model())) return K;
  if (dynamic_cast<const models::PointModel*>(&K.model())) return L;
  return make_body(std::make_shared<models::SumModel>(K.model_ptr(), L.model_ptr()));
}

/// K + εD.
inline BodyOracle neighborhood(const BodyOracle& K, double eps) {
  if (!(eps >= 0.0)) throw DomainError("neighborhood radius must be nonnegative");
  if (eps == 0.0) return K;
  if (auto b = dynamic_cast<const models::BallModel*>(&K.model())) return ball(K.dim(), b->radius() + eps);
  return make_body(std::make_shared<models::SumModel>(K.model_ptr(), std::make_shared<models::BallModel>(K.dim(), eps)));
}

inline double orthogonality_residual(const Mat& U) {
  return (U.transpose() * U - Mat::Identity(U.cols(), U.cols())).cwiseAbs().maxCoeff();
}

inline BodyOracle rotate_body(const BodyOracle& K, const Mat& U) {
  if (U.rows() != U.cols()) throw DomainError("rotation must be square");
  if (U.rows() != K.dim()) throw DimensionMismatch(static_cast<int>(U.rows()), K.dim());
  if (orthogonality_residual(U) > kOrthogonalityTol) throw DomainError("rotation is not orthogonal to 1e-10");
  return make_body(std::make_shared<models::RotatedModel>(K.model_ptr(), U));
}

inline BodyOracle scale_body(const BodyOracle& K, double s) {
  if (s == 0.0 || !std::isfinite(s)) throw DomainError("scale factor must be finite and nonzero");
  if (s == 1.0) return K;
  return make_body(std::make_shared<models::ScaledModel>(K.model_ptr(), s));
}

inline BodyOracle polar(const BodyOracle& K) {
  if (auto p = K.model().closed_polar()) return make_body(p);
  if (!(K.inner_radius() > 0.0) || K.flat()) throw DomainError("polar requires the origin in the interior (r_in > 0)");
  return make_body(std::make_shared<models::PolarModel>(K.model_ptr()));
}

/// K − K. Symmetric bodies give 2K; polytopes give the hull of pairwise
/// vertex differences; anything else falls back to K + (−K).
inline BodyOracle difference_body(const BodyOracle& K) {
  if (K.symmetric()) return scale_body(K, 2.0);
  if (auto P = dynamic_cast<const models::PolytopeModel*>(&K.model())) {
    const Mat& V = P->vertices();
    std::vector<Vec> pts;
    for (Eigen::Index i = 0; i < V.cols(); ++i) {
      for (Eigen::Index j = 0; j < V.cols(); ++j) {
        if (i == j) continue;
        pts.push_back(V.col(i) - V.col(j));
      }
    }
    Mat D(K.dim(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) D.col(static_cast<Eigen::Index>(i)) = pts[i];
    return make_body(models::PolytopeModel::from_vertices(D));
  }
  return make_body(std::make_shared<models::SumModel>(K.model_ptr(), scale_body(K, -1.0).model_ptr()));
}

// ---------------------------------------------------------------------------
// Volumes.

/// Hit-or-miss estimate of |K| inside r_out·D.
inline Estimate mc_volume(const BodyOracle& K, std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("mc_volume needs at least one sample");
  if (K.flat()) return {0.0, 0.0};
  const double R = K.outer_radius();
  if (!std::isfinite(R)) throw DomainError("mc_volume: body is unbounded");
  const int n = K.dim();
  const double box = unit_ball_volume(n) * std::pow(R, n);
  std::size_t hits = count_hits(samples, seed, [&](Rng& rng) { return K.membership(uniform_in_ball(n, R, rng)); });
  Estimate p = proportion(hits, samples);
  return {p.value * box, p.standard_error * box};
}

/// Checks D ⊆ K on the coordinate axes plus `probes` uniform sphere points.
inline void require_contains_unit_ball(const BodyOracle& K, std::size_t probes, std::uint64_t seed) {
  const int n = K.dim();
  auto check = [&](const Vec& u) {
    if (K.gauge(u) > 1.0 + kMembershipTol) throw HypothesisFailure("unit ball is not contained in the body", u);
  };
  for (int i = 0; i < n; ++i) {
    check(unit_vector(n, i));
    check(-unit_vector(n, i));
  }
  Rng rng = make_rng(seed, 0xC0A7);
  for (std::size_t i = 0; i < probes; ++i) check(uniform_on_sphere(n, rng));
}

/// (|K|/|D|)^{1/n}, with a delta-method standard error.
inline Estimate volume_ratio(const BodyOracle& K, std::size_t samples, std::uint64_t seed, std::size_t probes = 10000) {
  require_contains_unit_ball(K, probes, seed);
  const int n = K.dim();
  Estimate v = mc_volume(K, samples, seed);
  double A = std::pow(v.value / unit_ball_volume(n), 1.0 / n);
  return {A, A * v.standard_error / (n * v.value)};
}

// ---------------------------------------------------------------------------
// Declarative catalog.

struct BodySpec;
using BodySpecPtr = std::shared_ptr<const BodySpec>;

namespace spec {
struct Ball {
  int dim = 0;
  double radius = 1.0;
};
struct Cube {
  int dim = 0;
  double half_width = 1.0;
};
struct CrossPolytope {
  int dim = 0;
  double radius = 1.0;
};
struct Ellipsoid {
  std::vector<double> semiaxes;
};
struct Slab {
  std::vector<double> normal;
  double width = 1.0;  ///< the slab is {x : |⟨normal, x⟩| ≤ width}
};
struct SlabIntersection {
  std::vector<Slab> slabs;
};
/// low × rest, rest on the trailing coordinates; a null rest is the origin.
struct Product {
  BodySpecPtr low;
  BodySpecPtr rest;
  int dim = 0;
};
struct VertexPolytope {
  std::vector<std::vector<double>> vertices;
  bool symmetric = false;
};
/// {x : B x ∈ core, |x − BᵀBx| ≤ transverse_radius}, cut off at
/// truncation_radius when the transverse radius exceeds it.
struct TruncatedCylinder {
  int dim = 0;
  BodySpecPtr core;
  std::vector<std::vector<double>> basis;  ///< rows of B; empty means the leading coordinates
  double transverse_radius = kInf;
  double truncation_radius = kDefaultTruncation;
};
}  // namespace spec

struct BodySpec {
  std::variant<spec::Ball, spec::Cube, spec::CrossPolytope, spec::Ellipsoid, spec::SlabIntersection, spec::Product,
               spec::VertexPolytope, spec::TruncatedCylinder>
      body;
};

inline constexpr int kMaxBodyDim = 64;

namespace detail {

inline void check_dim(int n, const char* field = "dim") {
  if (n < 1 || n > kMaxBodyDim) throw InvalidSpec(field, "dimension must lie in [1, 64]");
}

inline void check_positive(double v, const char* field) {
  if (!(v > 0.0) || std::isnan(v)) throw InvalidSpec(field, "must be strictly positive");
}

inline Mat rows_to_mat(const std::vector<std::vector<double>>& rows, const char* field) {
  if (rows.empty()) throw InvalidSpec(field, "empty list");
  const std::size_t n = rows.front().size();
  Mat M(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n) throw InvalidSpec(field, "rows have different lengths");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(rows[i][j])) throw InvalidSpec(field, "non-finite entry");
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return M;
}

/// Completes orthonormal rows B (k×n) to an orthogonal n×n matrix [B; C].
inline Mat complete_frame(const Mat& B) {
  const Eigen::Index k = B.rows();
  const Eigen::Index n = B.cols();
  Eigen::HouseholderQR<Mat> qr(B.transpose());
  Mat Q = qr.householderQ() * Mat::Identity(n, n);
  Mat frame(n, n);
  frame.topRows(k) = B;
  frame.bottomRows(n - k) = Q.rightCols(n - k).transpose();
  return frame;
}

inline BodyPtr build_model(const BodySpec& s);

inline BodyPtr build(const spec::Ball& b) {
  check_dim(b.dim);
  check_positive(b.radius, "radius");
  return std::make_shared<models::BallModel>(b.dim, b.radius);
}
inline BodyPtr build(const spec::Cube& c) {
  check_dim(c.dim);
  check_positive(c.half_width, "half_width");
  return std::make_shared<models::CubeModel>(c.dim, c.half_width);
}
inline BodyPtr build(const spec::CrossPolytope& c) {
  check_dim(c.dim);
  check_positive(c.radius, "radius");
  return std::make_shared<models::CrossPolytopeModel>(c.dim, c.radius);
}
inline BodyPtr build(const spec::Ellipsoid& e) {
  check_dim(static_cast<int>(e.semiaxes.size()), "semiaxes");
  for (double a : e.semiaxes) check_positive(a, "semiaxes");
  return std::make_shared<models::EllipsoidModel>(from_std(e.semiaxes));
}
inline BodyPtr build(const spec::SlabIntersection& s) {
  if (s.slabs.empty()) throw InvalidSpec("slabs", "empty list");
  const std::size_t n = s.slabs.front().normal.size();
  check_dim(static_cast<int>(n), "slabs");
  Mat A(2 * s.slabs.size(), n);
  Vec b(2 * s.slabs.size());
  for (std::size_t i = 0; i < s.slabs.size(); ++i) {
    const auto& sl = s.slabs[i];
    if (sl.normal.size() != n) throw InvalidSpec("normal", "slab normals have different lengths");
    check_positive(sl.width, "width");
    Vec a = from_std(sl.normal);
    if (a.norm() == 0.0) throw InvalidSpec("normal", "zero normal");
    A.row(2 * i) = a.transpose();
    A.row(2 * i + 1) = -a.transpose();
    b(2 * i) = b(2 * i + 1) = sl.width;
  }
  return models::PolytopeModel::from_halfspaces(A, b);
}
inline BodyPtr build(const spec::Product& p) {
  if (!p.low) throw InvalidSpec("low", "missing");
  BodyPtr low = build_model(*p.low);
  int rest_dim = p.dim - low->dim();
  BodyPtr rest;
  if (p.rest) {
    rest = build_model(*p.rest);
    if (p.dim != 0 && p.dim != low->dim() + rest->dim()) throw InvalidSpec("dim", "does not match the factors");
  } else {
    if (rest_dim < 1) throw InvalidSpec("dim", "must exceed the low factor's dimension when rest is the origin");
    rest = std::make_shared<models::PointModel>(rest_dim);
  }
  check_dim(low->dim() + rest->dim());
  return std::make_shared<models::ProductModel>(low, rest);
}
inline BodyPtr build(const spec::VertexPolytope& v) {
  Mat V = rows_to_mat(v.vertices, "vertices").transpose();
  check_dim(static_cast<int>(V.rows()), "vertices");
  if (v.symmetric && !models::detail::vertex_set_symmetric(V)) {
    throw InvalidSpec("vertices", "vertex list is not symmetric although the symmetric flag is set");
  }
  return models::PolytopeModel::from_vertices(V);
}
inline BodyPtr build(const spec::TruncatedCylinder& c) {
  check_dim(c.dim);
  if (!c.core) throw InvalidSpec("core", "missing");
  check_positive(c.transverse_radius, "transverse_radius");
  check_positive(c.truncation_radius, "truncation_radius");
  BodyPtr core = build_model(*c.core);
  const int k = core->dim();
  if (k >= c.dim) throw InvalidSpec("core", "core dimension must be smaller than dim");
  Mat B;
  if (c.basis.empty()) {
    B = Mat::Identity(c.dim, c.dim).topRows(k);
  } else {
    B = rows_to_mat(c.basis, "basis");
    if (B.rows() != k || B.cols() != c.dim) throw InvalidSpec("basis", "must be core-dim rows of length dim");
    if ((B * B.transpose() - Mat::Identity(k, k)).cwiseAbs().maxCoeff() > kOrthogonalityTol) {
      throw InvalidSpec("basis", "rows are not orthonormal to 1e-10");
    }
  }
  const double t = std::min(c.transverse_radius, c.truncation_radius);
  const double cut = c.transverse_radius > c.truncation_radius ? c.truncation_radius : kInf;
  BodyPtr prod = std::make_shared<models::ProductModel>(core, std::make_shared<models::BallModel>(c.dim - k, t), cut);
  if (c.basis.empty()) return prod;
  return std::make_shared<models::RotatedModel>(prod, complete_frame(B).transpose());
}

inline BodyPtr build_model(const BodySpec& s) {
  return std::visit([](const auto& b) { return build(b); }, s.body);
}

}  // namespace detail

inline BodyOracle construct_body(const BodySpec& s) { return make_body(detail::build_model(s)); }

template <class T>
BodySpecPtr make_spec(T v) {
  return std::make_shared<const BodySpec>(BodySpec{std::move(v)});
}

}  // namespace waistlab
