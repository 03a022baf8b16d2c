#pragma once

// Shared numeric abstractions: vectors, objective oracles, error types and
// the per-iteration trajectory record.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace secantfw {

/// Dense 64-bit vector. Matrix iterates are stored flattened row-major.
using Vector = Eigen::VectorXd;

/// Row-major view of a flattened matrix.
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixView = Eigen::Map<RowMajorMatrix>;
using ConstMatrixView = Eigen::Map<const RowMajorMatrix>;

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  bool square() const { return rows == cols; }
  bool operator==(const Shape&) const = default;
};

inline ConstMatrixView as_matrix(const Vector& flat, Shape shape) {
  return ConstMatrixView(flat.data(), static_cast<Eigen::Index>(shape.rows),
                         static_cast<Eigen::Index>(shape.cols));
}

inline MatrixView as_matrix(Vector& flat, Shape shape) {
  return MatrixView(flat.data(), static_cast<Eigen::Index>(shape.rows),
                    static_cast<Eigen::Index>(shape.cols));
}

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Objective oracle

/**
 * First-order oracle for a smooth convex objective.
 *
 * Objectives with logarithmic or log-det terms return +inf from value() and a
 * non-finite gradient outside their domain instead of throwing, so that line
 * searches can probe close to the domain boundary. Implementations are
 * immutable after construction and safe to share across threads.
 */
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  virtual bool is_finite_at(const Vector& x) const;

  /// Global smoothness constant, when the generator knows it.
  virtual std::optional<double> smoothness() const { return std::nullopt; }

  /// Closed-form d^T H(x) d, when available.
  virtual std::optional<double> directional_curvature(const Vector& x,
                                                      const Vector& d) const;
};

/// Objective assembled from closures. Mostly used by tests and small drivers.
class FunctionObjective final : public Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  FunctionObjective(std::size_t dimension, ValueFn value, GradientFn gradient,
                    std::optional<double> smoothness = std::nullopt);

  std::size_t dimension() const override { return dimension_; }
  double value(const Vector& x) const override { return value_(x); }
  Vector gradient(const Vector& x) const override { return gradient_(x); }
  std::optional<double> smoothness() const override { return smoothness_; }

 private:
  std::size_t dimension_;
  ValueFn value_;
  GradientFn gradient_;
  std::optional<double> smoothness_;
};

/// Inner product; throws DimensionError on length mismatch.
double dot(const Vector& a, const Vector& b);

/// Central-difference gradient. Throws DomainError naming the coordinate when
/// a probe point evaluates to a non-finite value.
Vector finite_difference_gradient(const Objective& oracle, const Vector& x, double h);

/// Largest relative entrywise discrepancy, normalised by max(1, ||reference||_inf).
double relative_error(const Vector& value, const Vector& reference);

// ---------------------------------------------------------------------------
// Trajectory bookkeeping

enum class StepKind { fw, pairwise, drop };

const char* to_string(StepKind kind);

struct TrajectoryRecord {
  std::size_t t = 0;
  double primal = 0.0;
  double fw_gap = 0.0;
  double gamma = 0.0;
  int inner_iters = 0;
  double elapsed_s = 0.0;
  StepKind step_kind = StepKind::fw;
};

}  // namespace secantfw
