#pragma once

// Convex bodies as bundles of evaluators (support, gauge, radial, membership,
// distance/projection) plus certified radii. BodyModel is the polymorphic
// implementation; BodyOracle is the immutable value handle callers pass around.

#include "waistlab/convex_solvers.hpp"
#include "waistlab/core.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace waistlab {

struct BodyTraits {
  int dim = 0;
  double inner_radius = 0.0;    ///< r_in: rD ⊆ K
  double outer_radius = kInf;   ///< r_out: K ⊆ r_out·D
  bool symmetric = false;
  bool support_exact = true;    ///< false: support() is only an upper bound
  bool gauge_exact = true;
  bool flat = false;            ///< empty interior; gauge is ∞ off the span
  bool truncated = false;       ///< an unbounded body cut off at truncation_radius
  double truncation_radius = kInf;
  std::string name;
};

class BodyModel : public std::enable_shared_from_this<BodyModel> {
 public:
  explicit BodyModel(BodyTraits traits) : traits_(std::move(traits)) {}
  virtual ~BodyModel() = default;
  BodyModel(const BodyModel&) = delete;
  BodyModel& operator=(const BodyModel&) = delete;

  const BodyTraits& traits() const noexcept { return traits_; }
  int dim() const noexcept { return traits_.dim; }

  virtual double support(const Vec& u) const = 0;

  /// A point y ∈ K with ⟨y, u⟩ = h_K(u).
  virtual Vec support_point(const Vec& /*u*/) const {
    throw Error(traits_.name + ": support points are not available");
  }

  virtual double gauge(const Vec& x) const = 0;

  virtual double radial(const Vec& u) const {
    double g = gauge(u);
    return g == 0.0 ? kInf : 1.0 / g;
  }

  /// Nearest point of K. The default runs the min-norm-point method on the
  /// support-point oracle of K − x.
  virtual Vec project(const Vec& x) const {
    auto lmo = [&](const Vec& d) -> Vec { return support_point(-d) - x; };
    auto res = solvers::min_norm_point(lmo, dim(), 1e-16, 10000);
    return x + res.point;
  }

  virtual double distance(const Vec& x) const { return (x - project(x)).norm(); }

  virtual bool contains(const Vec& x) const {
    if (!traits_.flat && traits_.inner_radius > 0.0) return gauge(x) <= 1.0 + kMembershipTol;
    return distance(x) <= kMembershipTol;
  }

  /// Projections onto simple sets whose intersection is K (for Dykstra).
  virtual std::vector<solvers::Projector> constraint_projectors() const {
    auto self = shared_from_this();
    return {[self](const Vec& y) { return self->project(y); }};
  }

  /// Closed-form polar body, when one is known.
  virtual std::shared_ptr<const BodyModel> closed_polar() const { return nullptr; }

 protected:
  BodyTraits& mutable_traits() { return traits_; }

 private:
  BodyTraits traits_;
};

using BodyPtr = std::shared_ptr<const BodyModel>;

class BodyOracle {
 public:
  BodyOracle() = default;
  explicit BodyOracle(BodyPtr model) : model_(std::move(model)) {
    if (!model_) throw Error("BodyOracle: null model");
  }

  int dim() const { return model_->dim(); }
  double support(const Vec& u) const {
    require_dim(u, dim());
    return model_->support(u);
  }
  Vec support_point(const Vec& u) const {
    require_dim(u, dim());
    return model_->support_point(u);
  }
  double gauge(const Vec& x) const {
    require_dim(x, dim());
    return model_->gauge(x);
  }
  /// r_K(u) for the direction of u (normalized here).
  double radial(const Vec& u) const {
    require_dim(u, dim());
    double n = u.norm();
    if (n == 0.0) throw DomainError("radial: zero direction");
    return model_->radial(u / n);
  }
  bool membership(const Vec& x) const {
    require_dim(x, dim());
    return model_->contains(x);
  }
  double distance(const Vec& x) const {
    require_dim(x, dim());
    return model_->distance(x);
  }
  Vec project(const Vec& x) const {
    require_dim(x, dim());
    return model_->project(x);
  }

  const BodyTraits& traits() const { return model_->traits(); }
  double inner_radius() const { return traits().inner_radius; }
  double outer_radius() const { return traits().outer_radius; }
  bool symmetric() const { return traits().symmetric; }
  bool support_exact() const { return traits().support_exact; }
  bool flat() const { return traits().flat; }
  bool truncated() const { return traits().truncated; }
  const std::string& name() const { return traits().name; }

  const BodyModel& model() const { return *model_; }
  const BodyPtr& model_ptr() const { return model_; }

 private:
  BodyPtr model_;
};

namespace models {

class PointModel final : public BodyModel {
 public:
  explicit PointModel(int n) : BodyModel({n, 0.0, 0.0, true, true, true, true, false, kInf, "origin"}) {}
  double support(const Vec&) const override { return 0.0; }
  Vec support_point(const Vec&) const override { return Vec::Zero(dim()); }
  double gauge(const Vec& x) const override { return x.norm() == 0.0 ? 0.0 : kInf; }
  double radial(const Vec&) const override { return 0.0; }
  Vec project(const Vec&) const override { return Vec::Zero(dim()); }
  double distance(const Vec& x) const override { return x.norm(); }
  bool contains(const Vec& x) const override { return x.norm() <= kMembershipTol; }
};

class BallModel final : public BodyModel {
 public:
  BallModel(int n, double r) : BodyModel({n, r, r, true, true, true, false, false, kInf, "ball"}), r_(r) {}
  double radius() const { return r_; }
  double support(const Vec& u) const override { return r_ * u.norm(); }
  Vec support_point(const Vec& u) const override {
    double n = u.norm();
    return n == 0.0 ? Vec::Zero(dim()) : Vec(u * (r_ / n));
  }
  double gauge(const Vec& x) const override { return x.norm() / r_; }
  double radial(const Vec&) const override { return r_; }
  Vec project(const Vec& x) const override {
    double n = x.norm();
    return n <= r_ ? x : Vec(x * (r_ / n));
  }
  double distance(const Vec& x) const override { return std::max(x.norm() - r_, 0.0); }
  bool contains(const Vec& x) const override { return x.norm() <= r_ * (1.0 + kMembershipTol); }
  BodyPtr closed_polar() const override { return std::make_shared<BallModel>(dim(), 1.0 / r_); }

 private:
  double r_;
};

class CrossPolytopeModel;

class CubeModel final : public BodyModel {
 public:
  CubeModel(int n, double a)
      : BodyModel({n, a, a * std::sqrt(static_cast<double>(n)), true, true, true, false, false, kInf, "cube"}),
        a_(a) {}
  double half_width() const { return a_; }
  double support(const Vec& u) const override { return a_ * u.lpNorm<1>(); }
  Vec support_point(const Vec& u) const override {
    Vec y(dim());
    for (int i = 0; i < dim(); ++i) y(i) = u(i) < 0 ? -a_ : a_;
    return y;
  }
  double gauge(const Vec& x) const override { return x.lpNorm<Eigen::Infinity>() / a_; }
  Vec project(const Vec& x) const override { return x.cwiseMax(-a_).cwiseMin(a_); }
  BodyPtr closed_polar() const override;

 private:
  double a_;
};

class CrossPolytopeModel final : public BodyModel {
 public:
  CrossPolytopeModel(int n, double r)
      : BodyModel({n, r / std::sqrt(static_cast<double>(n)), r, true, true, true, false, false, kInf,
                   "cross_polytope"}),
        r_(r) {}
  double radius() const { return r_; }
  double support(const Vec& u) const override { return r_ * u.lpNorm<Eigen::Infinity>(); }
  Vec support_point(const Vec& u) const override {
    Eigen::Index i = 0;
    u.cwiseAbs().maxCoeff(&i);
    Vec y = Vec::Zero(dim());
    y(i) = u(i) < 0 ? -r_ : r_;
    return y;
  }
  double gauge(const Vec& x) const override { return x.lpNorm<1>() / r_; }
  Vec project(const Vec& x) const override { return solvers::project_l1_ball(x, r_); }
  BodyPtr closed_polar() const override { return std::make_shared<CubeModel>(dim(), 1.0 / r_); }

 private:
  double r_;
};

inline BodyPtr CubeModel::closed_polar() const { return std::make_shared<CrossPolytopeModel>(dim(), 1.0 / a_); }

class EllipsoidModel final : public BodyModel {
 public:
  explicit EllipsoidModel(Vec semiaxes)
      : BodyModel({static_cast<int>(semiaxes.size()), semiaxes.minCoeff(), semiaxes.maxCoeff(), true, true, true,
                   false, false, kInf, "ellipsoid"}),
        axes_(std::move(semiaxes)) {}
  const Vec& semiaxes() const { return axes_; }
  double support(const Vec& u) const override { return u.cwiseProduct(axes_).norm(); }
  Vec support_point(const Vec& u) const override {
    double h = support(u);
    if (h == 0.0) return Vec::Zero(dim());
    return Vec(u.cwiseProduct(axes_).cwiseProduct(axes_) / h);
  }
  double gauge(const Vec& x) const override { return x.cwiseQuotient(axes_).norm(); }
  Vec project(const Vec& x) const override { return solvers::project_ellipsoid(x, axes_); }
  BodyPtr closed_polar() const override { return std::make_shared<EllipsoidModel>(axes_.cwiseInverse()); }

 private:
  Vec axes_;
};

/// A × B with A on the first coordinates and B on the rest. Distances split
/// as √(d_A² + d_B²) and gauges as max(g_A, g_B).
class ProductModel final : public BodyModel {
 public:
  ProductModel(BodyPtr low, BodyPtr rest, double truncation = kInf)
      : BodyModel(make_traits(*low, *rest, truncation)), low_(std::move(low)), rest_(std::move(rest)) {}

  double support(const Vec& u) const override { return low_->support(head(u)) + rest_->support(tail(u)); }
  Vec support_point(const Vec& u) const override { return join(low_->support_point(head(u)), rest_->support_point(tail(u))); }
  double gauge(const Vec& x) const override { return std::max(low_->gauge(head(x)), rest_->gauge(tail(x))); }
  Vec project(const Vec& x) const override { return join(low_->project(head(x)), rest_->project(tail(x))); }
  double distance(const Vec& x) const override { return std::hypot(low_->distance(head(x)), rest_->distance(tail(x))); }
  bool contains(const Vec& x) const override { return low_->contains(head(x)) && rest_->contains(tail(x)); }

  const BodyPtr& low() const { return low_; }
  const BodyPtr& rest() const { return rest_; }

 private:
  static BodyTraits make_traits(const BodyModel& a, const BodyModel& b, double truncation) {
    BodyTraits t;
    t.dim = a.dim() + b.dim();
    t.inner_radius = std::min(a.traits().inner_radius, b.traits().inner_radius);
    t.outer_radius = std::hypot(a.traits().outer_radius, b.traits().outer_radius);
    t.symmetric = a.traits().symmetric && b.traits().symmetric;
    t.support_exact = a.traits().support_exact && b.traits().support_exact;
    t.gauge_exact = a.traits().gauge_exact && b.traits().gauge_exact;
    t.flat = a.traits().flat || b.traits().flat;
    t.truncated = std::isfinite(truncation) || a.traits().truncated || b.traits().truncated;
    t.truncation_radius = std::min({truncation, a.traits().truncation_radius, b.traits().truncation_radius});
    t.name = "product(" + a.traits().name + "," + b.traits().name + ")";
    return t;
  }
  Vec head(const Vec& x) const { return x.head(low_->dim()); }
  Vec tail(const Vec& x) const { return x.tail(rest_->dim()); }
  static Vec join(const Vec& a, const Vec& b) {
    Vec out(a.size() + b.size());
    out << a, b;
    return out;
  }

  BodyPtr low_;
  BodyPtr rest_;
};

}  // namespace models
}  // namespace waistlab
