#pragma once

// Scalar root finding: the secant recursion, Newton's method, and an
// empirical order-of-convergence estimator.

#include <functional>
#include <vector>

#include "secantfw/core.hpp"

namespace secantfw::rootfind {

using ScalarFn = std::function<double(double)>;

struct RootResult {
  double root = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  /// Secant: both seeds followed by every iterate (iterations + 2 entries).
  /// Newton: the seed followed by every iterate (iterations + 1 entries).
  std::vector<double> history;
};

/// Raised when two slope values coincide and the secant is undefined.
class DegenerateSecant : public Error {
 public:
  using Error::Error;
};

/// Denominators below this magnitude are treated as degenerate.
inline constexpr double kDegenerateDenominator = 1e-300;

/**
 * One secant update x_cur - phi_cur (x_cur - x_prev) / (phi_cur - phi_prev).
 * Symmetric in its two (point, value) pairs.
 */
double secant_step(double x_prev, double x_cur, double phi_prev, double phi_cur);

/// Secant iteration from seeds x0, x1 until |phi| < tol or max_iter updates.
RootResult solve_secant(const ScalarFn& phi, double x0, double x1, double tol, int max_iter);

/// Newton iteration from x0. Stops with converged=false on a zero derivative.
RootResult solve_newton(const ScalarFn& phi, const ScalarFn& dphi, double x0, double tol,
                        int max_iter);

/**
 * Median of the three-point order estimates
 *   log(e_{n+1}/e_n) / log(e_n/e_{n-1}),  e_n = |x_n - root|,
 * over the iterates whose error exceeds 1e2 * machine epsilon (scaled by
 * max(1, |root|)). Throws Error when fewer than two estimates are available.
 */
double estimate_order(const std::vector<double>& history, double root);

}  // namespace secantfw::rootfind
