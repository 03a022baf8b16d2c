#include "secantfw/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace secantfw::rootfind {

double secant_step(double x_prev, double x_cur, double phi_prev, double phi_cur) {
  const double denom = phi_cur - phi_prev;
  if (!(std::abs(denom) >= kDegenerateDenominator)) {
    throw DegenerateSecant("secant_step: slope values coincide");
  }
  // Written as a weighted combination so that swapping the pairs gives a
  // bitwise-identical result.
  return (x_prev * phi_cur - x_cur * phi_prev) / denom;
}

RootResult solve_secant(const ScalarFn& phi, double x0, double x1, double tol, int max_iter) {
  if (!(tol > 0.0)) throw DomainError("solve_secant: tolerance must be positive");
  if (max_iter < 1) throw DomainError("solve_secant: max_iter must be at least 1");
  if (x0 == x1) throw DomainError("solve_secant: seeds must differ");

  RootResult out;
  out.history = {x0, x1};
  double x_prev = x0;
  double x_cur = x1;
  double f_prev = phi(x0);
  double f_cur = phi(x1);
  out.root = x_cur;
  out.residual = std::abs(f_cur);
  if (!std::isfinite(f_prev) || !std::isfinite(f_cur)) {
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  if (out.residual < tol) {
    out.converged = true;
    return out;
  }

  for (int it = 0; it < max_iter; ++it) {
    double x_next = 0.0;
    try {
      x_next = secant_step(x_prev, x_cur, f_prev, f_cur);
    } catch (const DegenerateSecant&) {
      return out;
    }
    if (!std::isfinite(x_next)) return out;
    const double f_next = phi(x_next);
    if (!std::isfinite(f_next)) return out;

    out.history.push_back(x_next);
    out.iterations = it + 1;
    x_prev = x_cur;
    f_prev = f_cur;
    x_cur = x_next;
    f_cur = f_next;
    out.root = x_cur;
    out.residual = std::abs(f_cur);
    if (out.residual < tol) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

RootResult solve_newton(const ScalarFn& phi, const ScalarFn& dphi, double x0, double tol,
                        int max_iter) {
  if (!(tol > 0.0)) throw DomainError("solve_newton: tolerance must be positive");
  if (max_iter < 1) throw DomainError("solve_newton: max_iter must be at least 1");

  RootResult out;
  out.history = {x0};
  double x = x0;
  double f = phi(x);
  out.root = x;
  out.residual = std::abs(f);
  if (!std::isfinite(f)) return out;
  if (out.residual < tol) {
    out.converged = true;
    return out;
  }

  for (int it = 0; it < max_iter; ++it) {
    const double df = dphi(x);
    if (!std::isfinite(df) || std::abs(df) < kDegenerateDenominator) return out;
    const double x_next = x - f / df;
    if (!std::isfinite(x_next)) return out;
    const double f_next = phi(x_next);
    if (!std::isfinite(f_next)) return out;

    out.history.push_back(x_next);
    out.iterations = it + 1;
    x = x_next;
    f = f_next;
    out.root = x;
    out.residual = std::abs(f);
    if (out.residual < tol) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

double estimate_order(const std::vector<double>& history, double root) {
  if (history.size() < 4) throw Error("estimate_order: need at least four iterates");

  const double floor =
      1e2 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(root));
  std::vector<double> errors;
  errors.reserve(history.size());
  for (double x : history) {
    const double e = std::abs(x - root);
    if (e <= floor) break;  // everything after is rounding noise
    errors.push_back(e);
  }

  std::vector<double> estimates;
  for (std::size_t n = 1; n + 1 < errors.size(); ++n) {
    const double num = std::log(errors[n + 1] / errors[n]);
    const double den = std::log(errors[n] / errors[n - 1]);
    if (den == 0.0 || !std::isfinite(num / den)) continue;
    estimates.push_back(num / den);
  }
  if (estimates.size() < 2) throw Error("estimate_order: not enough usable iterates");

  std::sort(estimates.begin(), estimates.end());
  const std::size_t mid = estimates.size() / 2;
  if (estimates.size() % 2 == 1) return estimates[mid];
  return 0.5 * (estimates[mid - 1] + estimates[mid]);
}

}  // namespace secantfw::rootfind
