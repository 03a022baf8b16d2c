#include "secantfw/objectives.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace secantfw::problems {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_size(const Vector& x, std::size_t n, const char* who) {
  if (static_cast<std::size_t>(x.size()) != n) {
    throw DimensionError(std::string(who) + ": argument has wrong dimension");
  }
}

// Cholesky of A^T diag(w) A; nullopt when not positive definite.
std::optional<Eigen::LLT<Eigen::MatrixXd>> information_factor(const Vector& w,
                                                              const Eigen::MatrixXd& A) {
  if (!w.allFinite()) return std::nullopt;
  const Eigen::MatrixXd M = A.transpose() * w.asDiagonal() * A;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const auto diag = llt.matrixLLT().diagonal();
  if (!(diag.minCoeff() > 0.0) || !diag.allFinite()) return std::nullopt;
  return llt;
}

}  // namespace

// ---------------------------------------------------------------------------

SquaredDistance::SquaredDistance(Vector target) : target_(std::move(target)) {
  if (target_.size() == 0) throw DimensionError("SquaredDistance: empty target");
}

double SquaredDistance::value(const Vector& x) const {
  check_size(x, dimension(), "SquaredDistance");
  return 0.5 * (x - target_).squaredNorm();
}

Vector SquaredDistance::gradient(const Vector& x) const {
  check_size(x, dimension(), "SquaredDistance");
  return x - target_;
}

std::optional<double> SquaredDistance::directional_curvature(const Vector&, const Vector& d) const {
  return d.squaredNorm();
}

// ---------------------------------------------------------------------------

DenseQuadratic::DenseQuadratic(Eigen::MatrixXd hessian, Vector target, double smoothness)
    : Q_(std::move(hessian)), target_(std::move(target)), L_(smoothness) {
  if (Q_.rows() != Q_.cols() || Q_.rows() != target_.size()) {
    throw DimensionError("DenseQuadratic: Hessian and target sizes differ");
  }
}

double DenseQuadratic::value(const Vector& x) const {
  check_size(x, dimension(), "DenseQuadratic");
  const Vector r = x - target_;
  return 0.5 * r.dot(Q_ * r);
}

Vector DenseQuadratic::gradient(const Vector& x) const {
  check_size(x, dimension(), "DenseQuadratic");
  return Q_ * (x - target_);
}

std::optional<double> DenseQuadratic::directional_curvature(const Vector&, const Vector& d) const {
  return d.dot(Q_ * d);
}

// ---------------------------------------------------------------------------

MaskedLeastSquares::MaskedLeastSquares(Shape shape, Vector target,
                                       std::vector<std::size_t> observed)
    : shape_(shape), target_(std::move(target)), observed_(std::move(observed)) {
  if (static_cast<std::size_t>(target_.size()) != shape_.size()) {
    throw DimensionError("MaskedLeastSquares: target does not match shape");
  }
  for (std::size_t k : observed_) {
    if (k >= shape_.size()) throw DimensionError("MaskedLeastSquares: mask index out of range");
  }
}

double MaskedLeastSquares::value(const Vector& x) const {
  check_size(x, dimension(), "MaskedLeastSquares");
  double s = 0.0;
  for (std::size_t k : observed_) {
    const double r = x[static_cast<Eigen::Index>(k)] - target_[static_cast<Eigen::Index>(k)];
    s += r * r;
  }
  return 0.5 * s;
}

Vector MaskedLeastSquares::gradient(const Vector& x) const {
  check_size(x, dimension(), "MaskedLeastSquares");
  Vector g = Vector::Zero(x.size());
  for (std::size_t k : observed_) {
    const auto i = static_cast<Eigen::Index>(k);
    g[i] = x[i] - target_[i];
  }
  return g;
}

std::optional<double> MaskedLeastSquares::directional_curvature(const Vector&,
                                                                const Vector& d) const {
  double s = 0.0;
  for (std::size_t k : observed_) s += d[static_cast<Eigen::Index>(k)] * d[static_cast<Eigen::Index>(k)];
  return s;
}

// ---------------------------------------------------------------------------

LogRevenue::LogRevenue(Eigen::MatrixXd returns) : R_(std::move(returns)) {
  if (R_.size() == 0) throw DimensionError("LogRevenue: empty return matrix");
}

bool LogRevenue::is_finite_at(const Vector& x) const {
  check_size(x, dimension(), "LogRevenue");
  return x.allFinite() && (R_ * x).minCoeff() > 0.0;
}

double LogRevenue::value(const Vector& x) const {
  check_size(x, dimension(), "LogRevenue");
  const Vector rx = R_ * x;
  if (!rx.allFinite() || !(rx.minCoeff() > 0.0)) return kInf;
  return -rx.array().log().sum();
}

Vector LogRevenue::gradient(const Vector& x) const {
  check_size(x, dimension(), "LogRevenue");
  const Vector rx = R_ * x;
  if (!rx.allFinite() || !(rx.minCoeff() > 0.0)) return Vector::Constant(x.size(), kNaN);
  return -(R_.transpose() * rx.cwiseInverse());
}

std::optional<double> LogRevenue::directional_curvature(const Vector& x, const Vector& d) const {
  const Vector rx = R_ * x;
  if (!(rx.minCoeff() > 0.0)) return std::nullopt;
  const Vector rd = R_ * d;
  return (rd.array() / rx.array()).square().sum();
}

// ---------------------------------------------------------------------------

double oed_value(const Vector& w, const Eigen::MatrixXd& A, DesignCriterion criterion) {
  if (w.size() != A.rows()) throw DimensionError("oed_value: weights do not match design rows");
  const auto llt = information_factor(w, A);
  if (!llt) return kInf;
  if (criterion == DesignCriterion::D) {
    return -2.0 * llt->matrixLLT().diagonal().array().log().sum();
  }
  const Eigen::MatrixXd inv = llt->solve(Eigen::MatrixXd::Identity(A.cols(), A.cols()));
  return inv.trace();
}

Vector oed_gradient(const Vector& w, const Eigen::MatrixXd& A, DesignCriterion criterion) {
  if (w.size() != A.rows()) throw DimensionError("oed_gradient: weights do not match design rows");
  const auto llt = information_factor(w, A);
  if (!llt) return Vector::Constant(w.size(), kNaN);
  if (criterion == DesignCriterion::D) {
    // a_i^T M^{-1} a_i = ||L^{-1} a_i||^2
    const Eigen::MatrixXd half = llt->matrixL().solve(A.transpose());
    return -half.colwise().squaredNorm().transpose();
  }
  const Eigen::MatrixXd solved = llt->solve(A.transpose());
  return -solved.colwise().squaredNorm().transpose();
}

OptimalDesign::OptimalDesign(Eigen::MatrixXd design, DesignCriterion criterion)
    : A_(std::move(design)), criterion_(criterion) {
  if (A_.size() == 0) throw DimensionError("OptimalDesign: empty design matrix");
}

}  // namespace secantfw::problems
