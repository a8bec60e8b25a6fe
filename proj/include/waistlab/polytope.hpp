#pragma once

// Polytopes held in both representations. Facets of a vertex list (and
// vertices of a halfspace list) are found by enumerating d-subsets, which is
// exact and fast enough for the small polytopes the experiments use (d ≤ 8,
// at most ~3·10⁷ subsets). Lower-dimensional polytopes live in their linear
// span; the gauge is ∞ off that span.

#include "waistlab/body_model.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace waistlab::models {

namespace detail {

inline constexpr int kMaxEnumDim = 8;
inline constexpr double kEnumerationBudget = 3e7;

/// Solves the d×d system M z = r in place (partial pivoting). False if singular.
inline bool solve_small(int d, std::array<double, kMaxEnumDim * kMaxEnumDim>& m,
                        std::array<double, kMaxEnumDim>& r, double scale) {
  for (int col = 0; col < d; ++col) {
    int piv = col;
    double best = std::fabs(m[col * d + col]);
    for (int row = col + 1; row < d; ++row) {
      double v = std::fabs(m[row * d + col]);
      if (v > best) {
        best = v;
        piv = row;
      }
    }
    if (best <= 1e-11 * scale) return false;
    if (piv != col) {
      for (int c = 0; c < d; ++c) std::swap(m[col * d + c], m[piv * d + c]);
      std::swap(r[col], r[piv]);
    }
    for (int row = col + 1; row < d; ++row) {
      double f = m[row * d + col] / m[col * d + col];
      if (f == 0.0) continue;
      for (int c = col; c < d; ++c) m[row * d + c] -= f * m[col * d + c];
      r[row] -= f * r[col];
    }
  }
  for (int row = d - 1; row >= 0; --row) {
    double s = r[row];
    for (int c = row + 1; c < d; ++c) s -= m[row * d + c] * r[c];
    r[row] = s / m[row * d + row];
  }
  return true;
}

/// Calls fn(indices) for every k-subset of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k > n || k <= 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline double subset_count(int n, int k) {
  if (k > n) return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

struct Facets {
  Mat normals;  // f × d, unit rows
  Vec offsets;  // f
};

/// Facets {a·y ≤ b} of conv(points) for full-dimensional points in R^d.
inline Facets enumerate_facets(const Mat& points) {
  const int d = static_cast<int>(points.rows());
  const int v = static_cast<int>(points.cols());
  if (d > kMaxEnumDim) throw InvalidSpec("vertices", "dimension too large for exact facet enumeration");
  if (subset_count(v, d) > kEnumerationBudget) {
    throw InvalidSpec("vertices", "too many vertices for exact facet enumeration");
  }
  const double scale = std::max(1.0, points.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;
  std::vector<Vec> normals;
  std::vector<double> offsets;

  auto record = [&](const Vec& a, double b) {
    for (std::size_t i = 0; i < normals.size(); ++i) {
      if ((normals[i] - a).norm() < 1e-8 && std::fabs(offsets[i] - b) < 1e-8 * scale) return;
    }
    normals.push_back(a);
    offsets.push_back(b);
  };

  if (d == 1) {
    record(Vec::Constant(1, 1.0), points.maxCoeff());
    record(Vec::Constant(1, -1.0), -points.minCoeff());
  } else {
    // Hyperplane through y_0..y_{d-1}: normal a ⟂ (y_i − y_0), from the
    // (d−1)×(d−1) system obtained by fixing the pivot coordinate of a to 1.
    for_each_subset(v, d, [&](const std::vector<int>& idx) {
      Vec a;
      bool found = false;
      for (int pivot = d - 1; pivot >= 0 && !found; --pivot) {
        std::array<double, kMaxEnumDim * kMaxEnumDim> m{};
        std::array<double, kMaxEnumDim> r{};
        const int dd = d - 1;
        for (int row = 0; row < dd; ++row) {
          int c = 0;
          for (int col = 0; col < d; ++col) {
            double diff = points(col, idx[row + 1]) - points(col, idx[0]);
            if (col == pivot) {
              r[row] = -diff;
            } else {
              m[row * dd + c++] = diff;
            }
          }
        }
        if (!solve_small(dd, m, r, scale)) continue;
        a.resize(d);
        int c = 0;
        for (int col = 0; col < d; ++col) a(col) = (col == pivot) ? 1.0 : r[c++];
        found = true;
      }
      if (!found) return;
      a.normalize();
      double b = a.dot(points.col(idx[0]));
      bool above = false;
      bool below = false;
      for (int j = 0; j < v; ++j) {
        double s = a.dot(points.col(j)) - b;
        if (s > tol) above = true;
        if (s < -tol) below = true;
        if (above && below) return;
      }
      if (above) {
        a = -a;
        b = -b;
      }
      record(a, b);
    });
  }
  Facets f{Mat(normals.size(), d), Vec(offsets.size())};
  for (std::size_t i = 0; i < normals.size(); ++i) {
    f.normals.row(static_cast<Eigen::Index>(i)) = normals[i].transpose();
    f.offsets(static_cast<Eigen::Index>(i)) = offsets[i];
  }
  return f;
}

/// Vertices of the bounded polyhedron {A x ≤ b} in R^n.
inline Mat enumerate_vertices(const Mat& A, const Vec& b) {
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  if (n > kMaxEnumDim) throw InvalidSpec("slabs", "dimension too large for exact vertex enumeration");
  if (subset_count(m, n) > kEnumerationBudget) throw InvalidSpec("slabs", "too many halfspaces for vertex enumeration");
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  std::vector<Vec> verts;
  for_each_subset(m, n, [&](const std::vector<int>& idx) {
    std::array<double, kMaxEnumDim * kMaxEnumDim> mat{};
    std::array<double, kMaxEnumDim> r{};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) mat[i * n + j] = A(idx[i], j);
      r[i] = b(idx[i]);
    }
    if (!solve_small(n, mat, r, 1.0)) return;
    Vec x(n);
    for (int i = 0; i < n; ++i) x(i) = r[i];
    if (((A * x - b).array() > 1e-9 * scale).any()) return;
    for (const auto& y : verts) {
      if ((y - x).norm() < 1e-9 * scale) return;
    }
    verts.push_back(x);
  });
  Mat out(n, verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = verts[i];
  return out;
}

inline bool vertex_set_symmetric(const Mat& V) {
  const double scale = std::max(1.0, V.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < V.cols(); ++i) {
    bool paired = false;
    for (Eigen::Index j = 0; j < V.cols() && !paired; ++j) {
      paired = (V.col(i) + V.col(j)).norm() <= 1e-9 * scale;
    }
    if (!paired) return false;
  }
  return true;
}

}  // namespace detail

class PolytopeModel final : public BodyModel {
 public:
  /// conv(columns of V). The affine hull must contain the origin.
  static std::shared_ptr<const PolytopeModel> from_vertices(const Mat& V) {
    const int n = static_cast<int>(V.rows());
    if (V.cols() == 0) throw InvalidSpec("vertices", "empty vertex list");
    Eigen::JacobiSVD<Mat> svd(V, Eigen::ComputeFullU);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    if (smax == 0.0) throw InvalidSpec("vertices", "all vertices are at the origin");
    int d = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) > 1e-10 * smax) ++d;
    }
    Mat basis = svd.matrixU().leftCols(d).transpose();
    Mat Y = basis * V;
    // Affine hull through the origin: the centered points keep full rank d.
    Mat centered = Y.colwise() - Y.col(0);
    Eigen::FullPivLU<Mat> lu(centered);
    lu.setThreshold(1e-10);
    if (lu.rank() < d) throw InvalidSpec("vertices", "affine hull of the vertices must contain the origin");

    detail::Facets f = detail::enumerate_facets(Y);
    // Keep only extreme points: those lying on at least d facets.
    std::vector<Eigen::Index> keep;
    const double scale = std::max(1.0, Y.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
      int tight = 0;
      for (Eigen::Index r = 0; r < f.normals.rows(); ++r) {
        if (std::fabs(f.normals.row(r).dot(Y.col(j)) - f.offsets(r)) <= 1e-9 * scale) ++tight;
      }
      bool dup = false;
      for (auto k : keep) dup = dup || (Y.col(k) - Y.col(j)).norm() <= 1e-12 * scale;
      if (tight >= d && !dup) keep.push_back(j);
    }
    Mat Vk(n, keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) Vk.col(static_cast<Eigen::Index>(i)) = V.col(keep[i]);
    return std::shared_ptr<const PolytopeModel>(
        new PolytopeModel(std::move(basis), std::move(Vk), std::move(f.normals), std::move(f.offsets)));
  }

  /// {x : A x ≤ b}; must be bounded and full-dimensional.
  static std::shared_ptr<const PolytopeModel> from_halfspaces(const Mat& A, const Vec& b) {
    const int n = static_cast<int>(A.cols());
    Mat V = detail::enumerate_vertices(A, b);
    if (V.cols() <= n) throw InvalidSpec("slabs", "halfspaces do not bound a full-dimensional polytope");
    Eigen::FullPivLU<Mat> lu(V);
    lu.setThreshold(1e-10);
    if (lu.rank() < n) throw InvalidSpec("slabs", "halfspaces do not bound a full-dimensional polytope");
    Mat normals = A;
    Vec offsets = b;
    for (Eigen::Index r = 0; r < normals.rows(); ++r) {
      double len = normals.row(r).norm();
      if (len == 0.0) throw InvalidSpec("slabs", "zero normal");
      normals.row(r) /= len;
      offsets(r) /= len;
    }
    return std::shared_ptr<const PolytopeModel>(
        new PolytopeModel(Mat::Identity(n, n), std::move(V), std::move(normals), std::move(offsets)));
  }

  const Mat& vertices() const { return vertices_; }
  const Mat& facet_normals() const { return normals_; }
  const Vec& facet_offsets() const { return offsets_; }
  const Mat& span_basis() const { return basis_; }

  double support(const Vec& u) const override { return (vertices_.transpose() * u).maxCoeff(); }

  Vec support_point(const Vec& u) const override {
    Eigen::Index i = 0;
    (vertices_.transpose() * u).maxCoeff(&i);
    return vertices_.col(i);
  }

  double gauge(const Vec& x) const override {
    if (off_span(x) > kMembershipTol * std::max(1.0, x.norm())) return kInf;
    Vec y = basis_ * x;
    double g = 0.0;
    const double ny = std::max(1.0, y.norm());
    for (Eigen::Index r = 0; r < normals_.rows(); ++r) {
      double s = normals_.row(r).dot(y);
      if (offsets_(r) > 1e-12) {
        g = std::max(g, s / offsets_(r));
      } else if (s > 1e-12 * ny) {
        return kInf;
      }
    }
    return g;
  }

  bool contains(const Vec& x) const override {
    if (off_span(x) > kMembershipTol) return false;
    Vec y = basis_ * x;
    return ((normals_ * y - offsets_).array() <= kMembershipTol).all();
  }

  /// Full-dimensional polytopes split into their facet halfspaces, which
  /// Dykstra handles far better than nested min-norm solves.
  std::vector<solvers::Projector> constraint_projectors() const override {
    if (traits().flat) return BodyModel::constraint_projectors();
    std::vector<solvers::Projector> out;
    out.reserve(normals_.rows());
    for (Eigen::Index r = 0; r < normals_.rows(); ++r) {
      Vec a = normals_.row(r).transpose();
      double b = offsets_(r);
      out.emplace_back([a, b](const Vec& y) -> Vec {
        double s = a.dot(y) - b;
        return s > 0.0 ? Vec(y - s * a) : y;
      });
    }
    return out;
  }

  Vec project(const Vec& x) const override {
    auto lmo = [&](const Vec& d) -> Vec { return support_point(-d) - x; };
    return x + solvers::min_norm_point(lmo, dim(), 1e-18, 10000).point;
  }

  BodyPtr closed_polar() const override {
    if (traits().flat || traits().inner_radius <= 0.0) return nullptr;
    // Facets a·x ≤ b become vertices a/b; vertices v become facets v·y ≤ 1.
    const int n = dim();
    Mat pv(n, normals_.rows());
    for (Eigen::Index r = 0; r < normals_.rows(); ++r) pv.col(r) = normals_.row(r).transpose() / offsets_(r);
    Mat pn(vertices_.cols(), n);
    Vec pb(vertices_.cols());
    for (Eigen::Index c = 0; c < vertices_.cols(); ++c) {
      double len = vertices_.col(c).norm();
      pn.row(c) = vertices_.col(c).transpose() / len;
      pb(c) = 1.0 / len;
    }
    return std::shared_ptr<const PolytopeModel>(
        new PolytopeModel(Mat::Identity(n, n), std::move(pv), std::move(pn), std::move(pb)));
  }

 private:
  PolytopeModel(Mat basis, Mat vertices, Mat normals, Vec offsets)
      : BodyModel(make_traits(basis, vertices, normals, offsets)),
        basis_(std::move(basis)),
        vertices_(std::move(vertices)),
        normals_(std::move(normals)),
        offsets_(std::move(offsets)) {}

  static BodyTraits make_traits(const Mat& basis, const Mat& V, const Mat& normals, const Vec& offsets) {
    BodyTraits t;
    t.dim = static_cast<int>(V.rows());
    t.flat = basis.rows() < V.rows();
    t.outer_radius = V.colwise().norm().maxCoeff();
    t.inner_radius = (!t.flat && offsets.size() && offsets.minCoeff() > 0.0) ? offsets.minCoeff() : 0.0;
    (void)normals;
    t.symmetric = detail::vertex_set_symmetric(V);
    t.name = "polytope";
    return t;
  }

  double off_span(const Vec& x) const {
    if (basis_.rows() == x.size()) return 0.0;
    return (x - basis_.transpose() * (basis_ * x)).norm();
  }

  Mat basis_;
  Mat vertices_;
  Mat normals_;
  Vec offsets_;
};

}  // namespace waistlab::models
