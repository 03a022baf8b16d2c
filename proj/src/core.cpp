#include "secantfw/core.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace secantfw {

bool Objective::is_finite_at(const Vector& x) const { return std::isfinite(value(x)); }

std::optional<double> Objective::directional_curvature(const Vector&, const Vector&) const {
  return std::nullopt;
}

FunctionObjective::FunctionObjective(std::size_t dimension, ValueFn value, GradientFn gradient,
                                     std::optional<double> smoothness)
    : dimension_(dimension),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      smoothness_(smoothness) {
  if (dimension_ == 0) throw DimensionError("objective dimension must be positive");
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot: length mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  return a.dot(b);
}

Vector finite_difference_gradient(const Objective& oracle, const Vector& x, double h) {
  if (!(h > 0.0)) throw DomainError("finite_difference_gradient: step must be positive");
  if (static_cast<std::size_t>(x.size()) != oracle.dimension()) {
    throw DimensionError("finite_difference_gradient: point has wrong dimension");
  }
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    probe[i] = xi + h;
    const double up = oracle.value(probe);
    probe[i] = xi - h;
    const double down = oracle.value(probe);
    probe[i] = xi;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw DomainError("finite_difference_gradient: non-finite value probing coordinate " +
                        std::to_string(i));
    }
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double relative_error(const Vector& value, const Vector& reference) {
  if (value.size() != reference.size()) throw DimensionError("relative_error: length mismatch");
  if (value.size() == 0) return 0.0;
  const double scale = std::max(1.0, reference.lpNorm<Eigen::Infinity>());
  return (value - reference).lpNorm<Eigen::Infinity>() / scale;
}

const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::fw:
      return "fw";
    case StepKind::pairwise:
      return "pairwise";
    case StepKind::drop:
      return "drop";
  }
  return "unknown";
}

}  // namespace secantfw
