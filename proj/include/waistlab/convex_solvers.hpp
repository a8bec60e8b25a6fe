#pragma once

// Projection primitives shared by the body oracles: closed-form projections for
// the catalog shapes, Dykstra's alternating projections for intersections, and
// Wolfe's minimum-norm-point method for bodies known only through a
// support-point (linear minimization) oracle.

#include "waistlab/core.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace waistlab::solvers {

/// Euclidean projection onto the ℓ¹ ball of radius r (sort-based).
inline Vec project_l1_ball(const Vec& x, double r) {
  if (x.lpNorm<1>() <= r) return x;
  if (r <= 0.0) return Vec::Zero(x.size());
  std::vector<double> mags(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) mags[i] = std::fabs(x(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    cumsum += mags[i];
    double t = (cumsum - r) / static_cast<double>(i + 1);
    if (i + 1 == mags.size() || mags[i + 1] <= t) {
      tau = t;
      break;
    }
  }
  Vec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double m = std::max(std::fabs(x(i)) - tau, 0.0);
    out(i) = x(i) < 0 ? -m : m;
  }
  return out;
}

/// Projection onto {y : Σ y_i²/a_i² ≤ 1}. The minimizer has the form
/// y_i = a_i² x_i / (a_i² + λ) with λ ≥ 0 the root of a decreasing function.
inline Vec project_ellipsoid(const Vec& x, const Vec& semiaxes) {
  auto constraint = [&](double lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double a2 = semiaxes(i) * semiaxes(i);
      double yi = a2 * x(i) / (a2 + lambda);
      s += yi * yi / a2;
    }
    return s - 1.0;
  };
  if (constraint(0.0) <= 0.0) return x;
  double lo = 0.0;
  double hi = 1.0;
  while (constraint(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (constraint(mid) > 0.0 ? lo : hi) = mid;
  }
  Vec y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double a2 = semiaxes(i) * semiaxes(i);
    y(i) = a2 * x(i) / (a2 + hi);
  }
  return y;
}

using Projector = std::function<Vec(const Vec&)>;

struct DykstraResult {
  Vec point;
  int sweeps = 0;
  bool converged = false;
};

/// Dykstra's algorithm: the projection of x onto the intersection of closed
/// convex sets, given exact projections onto each set.
inline DykstraResult dykstra(const Vec& x, const std::vector<Projector>& sets, double tol = 1e-13,
                             int max_sweeps = 10000) {
  DykstraResult res{x, 0, false};
  if (sets.empty()) {
    res.converged = true;
    return res;
  }
  if (sets.size() == 1) {
    res.point = sets.front()(x);
    res.converged = true;
    return res;
  }
  std::vector<Vec> increments(sets.size(), Vec::Zero(x.size()));
  Vec current = x;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    Vec start = current;
    double incr_change = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      Vec y = current + increments[i];
      Vec p = sets[i](y);
      Vec next_incr = y - p;
      incr_change += (next_incr - increments[i]).squaredNorm();
      increments[i] = std::move(next_incr);
      current = std::move(p);
    }
    double scale = std::max(1.0, current.norm());
    res.sweeps = sweep;
    if ((current - start).norm() <= tol * scale && std::sqrt(incr_change) <= 10 * tol * scale) {
      res.converged = true;
      break;
    }
  }
  res.point = current;
  return res;
}

struct MinNormResult {
  Vec point;               ///< nearest point of the set to the origin
  std::vector<Vec> atoms;  ///< active atoms
  std::vector<double> weights;
  int iterations = 0;
  bool converged = false;
};

/// Wolfe's minimum-norm-point method over a convex set C given by
/// lmo(d) = argmin_{z ∈ C} ⟨d, z⟩. Finite for polytopes; for smooth sets it
/// stops at duality gap ≤ tol·max(1, |z|²) or after max_iter oracle calls.
inline MinNormResult min_norm_point(const std::function<Vec(const Vec&)>& lmo, int dim, double tol = 1e-14,
                                    int max_iter = 10000) {
  MinNormResult res;
  Vec start_dir = Vec::Zero(dim);
  start_dir(0) = 1.0;
  std::vector<Vec> atoms{lmo(start_dir)};
  // Start from the atom itself; the first lmo call with d = z finds descent.
  std::vector<double> lambda{1.0};
  Vec z = atoms[0];

  auto affine_minimizer = [&](const std::vector<Vec>& s) {
    const int m = static_cast<int>(s.size());
    Mat sys = Mat::Zero(m + 1, m + 1);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j <= i; ++j) sys(i, j) = sys(j, i) = s[i].dot(s[j]);
      sys(i, m) = sys(m, i) = 1.0;
    }
    Vec rhs = Vec::Zero(m + 1);
    rhs(m) = 1.0;
    Vec sol = sys.completeOrthogonalDecomposition().solve(rhs);
    return std::vector<double>(sol.data(), sol.data() + m);
  };

  for (int it = 1; it <= max_iter; ++it) {
    res.iterations = it;
    Vec q = lmo(z);
    double gap = z.squaredNorm() - z.dot(q);
    if (gap <= tol * std::max(1.0, z.squaredNorm())) {
      res.converged = true;
      break;
    }
    bool duplicate = false;
    for (const auto& a : atoms) {
      if ((a - q).norm() <= 1e-15 * std::max(1.0, q.norm())) duplicate = true;
    }
    if (duplicate) {
      res.converged = true;
      break;
    }
    atoms.push_back(q);
    lambda.push_back(0.0);
    for (int minor = 0; minor < 1000; ++minor) {
      std::vector<double> alpha = affine_minimizer(atoms);
      bool interior = std::all_of(alpha.begin(), alpha.end(), [](double a) { return a > 1e-15; });
      if (interior) {
        lambda = alpha;
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] <= 1e-15 && lambda[i] - alpha[i] > 0) {
          theta = std::min(theta, lambda[i] / (lambda[i] - alpha[i]));
        }
      }
      for (std::size_t i = 0; i < alpha.size(); ++i) lambda[i] = theta * alpha[i] + (1.0 - theta) * lambda[i];
      std::vector<Vec> kept_atoms;
      std::vector<double> kept_lambda;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (lambda[i] > 1e-15) {
          kept_atoms.push_back(atoms[i]);
          kept_lambda.push_back(lambda[i]);
        }
      }
      if (kept_atoms.empty()) {
        kept_atoms.push_back(atoms.back());
        kept_lambda.push_back(1.0);
      }
      atoms = std::move(kept_atoms);
      lambda = std::move(kept_lambda);
      double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
      for (auto& l : lambda) l /= total;
    }
    Vec next = Vec::Zero(dim);
    for (std::size_t i = 0; i < atoms.size(); ++i) next += lambda[i] * atoms[i];
    if (next.squaredNorm() >= z.squaredNorm() - 1e-30) {
      z = next;
      res.converged = true;
      break;
    }
    z = next;
  }
  res.point = z;
  res.atoms = atoms;
  res.weights = lambda;
  return res;
}

/// Finds the largest t in [lo, hi] with pred(t) true, assuming pred is
/// monotone (true then false). Used to turn membership into a gauge.
template <class Pred>
double bisect_threshold(double lo, double hi, Pred&& pred, int iterations = 100) {
  for (int i = 0; i < iterations && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace waistlab::solvers
