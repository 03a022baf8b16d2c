#pragma once

// Hand-coded objectives for the benchmark problem classes.

#include <optional>
#include <vector>

#include "secantfw/core.hpp"

namespace secantfw::problems {

/// f(x) = 1/2 ||x - b||^2.
class SquaredDistance final : public Objective {
 public:
  explicit SquaredDistance(Vector target);

  std::size_t dimension() const override { return static_cast<std::size_t>(target_.size()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::optional<double> smoothness() const override { return 1.0; }
  std::optional<double> directional_curvature(const Vector& x, const Vector& d) const override;

  const Vector& target() const { return target_; }

 private:
  Vector target_;
};

/// f(x) = 1/2 (x - b)^T Q (x - b) with Q symmetric positive definite.
class DenseQuadratic final : public Objective {
 public:
  DenseQuadratic(Eigen::MatrixXd hessian, Vector target, double smoothness);

  std::size_t dimension() const override { return static_cast<std::size_t>(target_.size()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::optional<double> smoothness() const override { return L_; }
  std::optional<double> directional_curvature(const Vector& x, const Vector& d) const override;

  const Eigen::MatrixXd& hessian() const { return Q_; }
  const Vector& target() const { return target_; }

 private:
  Eigen::MatrixXd Q_;
  Vector target_;
  double L_;
};

/// Matrix completion loss f(X) = 1/2 sum_{(i,j) in mask} (X_ij - A_ij)^2 over
/// flattened row-major X.
class MaskedLeastSquares final : public Objective {
 public:
  MaskedLeastSquares(Shape shape, Vector target, std::vector<std::size_t> observed);

  std::size_t dimension() const override { return shape_.size(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::optional<double> smoothness() const override { return 1.0; }
  std::optional<double> directional_curvature(const Vector& x, const Vector& d) const override;

  Shape shape() const { return shape_; }
  const std::vector<std::size_t>& observed() const { return observed_; }

 private:
  Shape shape_;
  Vector target_;
  std::vector<std::size_t> observed_;
};

/// Portfolio log-revenue f(x) = -sum_i log(r_i^T x); +inf unless every
/// r_i^T x > 0.
class LogRevenue final : public Objective {
 public:
  explicit LogRevenue(Eigen::MatrixXd returns);

  std::size_t dimension() const override { return static_cast<std::size_t>(R_.cols()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  bool is_finite_at(const Vector& x) const override;
  std::optional<double> directional_curvature(const Vector& x, const Vector& d) const override;

  const Eigen::MatrixXd& returns() const { return R_; }

 private:
  Eigen::MatrixXd R_;
};

enum class DesignCriterion { D, A };

/// D criterion: -log det(A^T W A). A criterion: tr((A^T W A)^{-1}).
/// +inf when the information matrix is not positive definite.
double oed_value(const Vector& w, const Eigen::MatrixXd& A, DesignCriterion criterion);

/// D: -a_i^T M^{-1} a_i. A: -||M^{-1} a_i||^2. NaN-filled outside the domain.
Vector oed_gradient(const Vector& w, const Eigen::MatrixXd& A, DesignCriterion criterion);

class OptimalDesign final : public Objective {
 public:
  OptimalDesign(Eigen::MatrixXd design, DesignCriterion criterion);

  std::size_t dimension() const override { return static_cast<std::size_t>(A_.rows()); }
  double value(const Vector& w) const override { return oed_value(w, A_, criterion_); }
  Vector gradient(const Vector& w) const override { return oed_gradient(w, A_, criterion_); }

  const Eigen::MatrixXd& design() const { return A_; }
  DesignCriterion criterion() const { return criterion_; }

 private:
  Eigen::MatrixXd A_;
  DesignCriterion criterion_;
};

}  // namespace secantfw::problems
