#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace waistlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Boundary slack for membership tests; ties count as members.
inline constexpr double kMembershipTol = 1e-9;
/// Max-entry residual allowed for UᵀU − I and frame Gram matrices.
inline constexpr double kOrthogonalityTol = 1e-10;
/// Default radius at which unbounded test bodies are cut off.
inline constexpr double kDefaultTruncation = 1e6;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(int a, int b)
      : Error("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

/// A body description or config failed validation; `field()` names the offending entry.
class InvalidSpec : public Error {
 public:
  InvalidSpec(std::string field, const std::string& what)
      : Error("invalid field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Parameter schedule or configuration that cannot satisfy its own constraints.
class InfeasibleConfiguration : public Error {
 public:
  using Error::Error;
};

/// A geometric hypothesis (containment, section bound, ...) does not hold.
/// Carries the direction or point that exhibits the violation.
class HypothesisFailure : public Error {
 public:
  HypothesisFailure(const std::string& what, Vec witness)
      : Error(what), witness_(std::move(witness)) {}
  const Vec& witness() const noexcept { return witness_; }

 private:
  Vec witness_;
};

/// A net, covering or iterative solver did not certify within its cap.
class CertificationFailure : public Error {
 public:
  using Error::Error;
};

inline void require_dim(const Vec& v, int n) {
  if (v.size() != n) throw DimensionMismatch(static_cast<int>(v.size()), n);
}

inline Vec unit_vector(int n, int i) {
  Vec e = Vec::Zero(n);
  e(i) = 1.0;
  return e;
}

inline Vec from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

/// Volume of the unit Euclidean ball in R^n.
inline double unit_ball_volume(int n) {
  return std::exp(0.5 * n * std::log(kPi) - std::lgamma(0.5 * n + 1.0));
}

inline double binomial(int n, int k) {
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

}  // namespace waistlab
