#pragma once

// Line searches along a Frank-Wolfe segment x - gamma d, gamma in [0, gamma_max].
//
// Sign convention: phi(gamma) = <grad f(x - gamma d), d> is the negated
// derivative of gamma -> f(x - gamma d). A descent direction has phi(0) > 0,
// phi is non-increasing for convex f, and the exact step is its root.

#include <limits>
#include <optional>
#include <vector>

#include "secantfw/core.hpp"

namespace secantfw::linesearch {

struct LineSearchResult {
  double gamma = 0.0;
  int inner_iters = 0;
  double residual = 0.0;
  bool clipped = false;
  bool used_fallback = false;
  /// Every step size at which the slope was evaluated, seeds first.
  std::vector<double> history;
};

struct SlsState {
  double last_gamma = 0.0;
  double rho = 1e-5;
  double eps_rel = 1e-8;
  double eps_floor = 1e-12;
  int max_inner = 40;
  int domain_halvings = 20;
};

/// Slope value with sum_i |g_i d_i|, the scale of its rounding error.
struct SlopeSample {
  double value = 0.0;
  double magnitude = 0.0;
};

/// Relative rounding floor applied to SlopeSample::magnitude by sls.
inline constexpr double kSlopeRoundoff = 64.0 * std::numeric_limits<double>::epsilon();

/// phi(gamma) for a fixed segment. Each call costs one gradient evaluation;
/// points outside the objective's domain yield +inf.
class DirectionalSlope {
 public:
  DirectionalSlope(const Objective& oracle, const Vector& x, const Vector& d);

  double operator()(double gamma) const { return sample(gamma).value; }
  SlopeSample sample(double gamma) const;

 private:
  const Objective& oracle_;
  const Vector& x_;
  const Vector& d_;
};

DirectionalSlope directional_slope(const Objective& oracle, const Vector& x, const Vector& d);

/**
 * Secant line search.
 *
 * Seeds are gamma_0 = state.last_gamma clamped to [0, gamma_max - rho] and
 * gamma_1 = gamma_0 + rho (rho is shrunk to gamma_max / 2 on short segments).
 * Every secant iterate is clipped to [0, gamma_max]; a clipped iterate whose
 * slope sign certifies boundary optimality ends the search. The slope
 * tolerance is max(eps_rel |phi(0)|, eps_floor), or `abs_tolerance` when
 * given, raised to the rounding floor kSlopeRoundoff * sum_i |g_i d_i| of
 * each sample. Degenerate secants, exhausted iterations and unrecoverable domain
 * violations fall back to golden-section search.
 *
 * `slope_at_zero` lets the caller pass <grad f(x), d> when already known.
 * state.last_gamma is updated to the returned step.
 */
LineSearchResult sls(const Objective& oracle, const Vector& x, const Vector& d, double gamma_max,
                     SlsState& state, std::optional<double> slope_at_zero = std::nullopt,
                     std::optional<double> abs_tolerance = std::nullopt);

/// Golden-section minimisation of gamma -> f(x - gamma d) on [0, gamma_max].
/// Non-finite probes are treated as +inf so the bracket shrinks toward 0.
LineSearchResult golden_section(const Objective& oracle, const Vector& x, const Vector& d,
                                double gamma_max, double tol);

/// Clipped closed-form step for quadratics. Throws DomainError when
/// d_curvature <= 0.
double exact_quadratic_step(double grad_dot_d, double d_curvature, double gamma_max);

}  // namespace secantfw::linesearch
