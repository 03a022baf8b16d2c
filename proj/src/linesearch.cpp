#include "secantfw/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "secantfw/rootfind.hpp"

namespace secantfw::linesearch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double segment_value(const Objective& oracle, const Vector& x, const Vector& d, double gamma) {
  const double v = oracle.value(x - gamma * d);
  return std::isfinite(v) ? v : kInf;
}

LineSearchResult fallback(const Objective& oracle, const Vector& x, const Vector& d,
                          double gamma_max, const DirectionalSlope& phi,
                          LineSearchResult&& partial) {
  LineSearchResult gs = golden_section(oracle, x, d, gamma_max, 1e-10 * gamma_max);
  partial.gamma = gs.gamma;
  partial.inner_iters += gs.inner_iters;
  partial.residual = std::abs(phi(gs.gamma));
  partial.clipped = false;
  partial.used_fallback = true;
  partial.history.push_back(gs.gamma);
  return std::move(partial);
}

}  // namespace

DirectionalSlope::DirectionalSlope(const Objective& oracle, const Vector& x, const Vector& d)
    : oracle_(oracle), x_(x), d_(d) {
  if (x.size() != d.size()) throw DimensionError("directional_slope: x and d differ in length");
}

SlopeSample DirectionalSlope::sample(double gamma) const {
  const Vector g = oracle_.gradient(x_ - gamma * d_);
  const double s = g.dot(d_);
  if (!std::isfinite(s)) return {kInf, kInf};
  return {s, g.cwiseProduct(d_).cwiseAbs().sum()};
}

DirectionalSlope directional_slope(const Objective& oracle, const Vector& x, const Vector& d) {
  return DirectionalSlope(oracle, x, d);
}

LineSearchResult sls(const Objective& oracle, const Vector& x, const Vector& d, double gamma_max,
                     SlsState& state, std::optional<double> slope_at_zero,
                     std::optional<double> abs_tolerance) {
  if (!(gamma_max > 0.0)) throw DomainError("sls: gamma_max must be positive");
  if (!(state.rho > 0.0) || state.max_inner < 2) throw ConfigError("sls: invalid state");

  const DirectionalSlope phi(oracle, x, d);
  LineSearchResult out;

  const double phi_zero = slope_at_zero ? *slope_at_zero : phi(0.0);
  if (!std::isfinite(phi_zero)) throw DomainError("sls: slope is not finite at the current point");
  if (phi_zero <= 0.0) {
    // Not a descent direction: gamma = 0 is optimal on the segment.
    out.gamma = 0.0;
    out.residual = std::abs(phi_zero);
    out.clipped = true;
    out.history = {0.0};
    state.last_gamma = 0.0;
    return out;
  }

  const double eps = abs_tolerance ? *abs_tolerance
                                   : std::max(state.eps_rel * std::abs(phi_zero), state.eps_floor);
  const double rho = std::min(state.rho, 0.5 * gamma_max);

  auto finish = [&](double gamma, double slope, bool clipped) {
    out.gamma = gamma;
    out.residual = std::abs(slope);
    out.clipped = clipped;
    state.last_gamma = gamma;
    return out;
  };
  auto run_fallback = [&]() {
    LineSearchResult r = fallback(oracle, x, d, gamma_max, phi, std::move(out));
    state.last_gamma = r.gamma;
    return r;
  };

  auto converged = [&](const SlopeSample& p) {
    return std::abs(p.value) < std::max(eps, kSlopeRoundoff * p.magnitude);
  };
  const SlopeSample at_zero{phi_zero, 0.0};

  double g_prev = std::clamp(state.last_gamma, 0.0, gamma_max - rho);
  SlopeSample p_prev = g_prev == 0.0 ? at_zero : phi.sample(g_prev);
  if (!std::isfinite(p_prev.value)) {
    g_prev = 0.0;
    p_prev = at_zero;
  }
  out.history.push_back(g_prev);
  if (converged(p_prev)) return finish(g_prev, p_prev.value, false);

  double g_cur = g_prev + rho;
  SlopeSample p_cur = phi.sample(g_cur);
  for (int h = 0; !std::isfinite(p_cur.value); ++h) {
    if (h == state.domain_halvings) return run_fallback();
    g_cur = 0.5 * (g_prev + g_cur);
    p_cur = phi.sample(g_cur);
  }
  out.history.push_back(g_cur);
  if (converged(p_cur)) return finish(g_cur, p_cur.value, false);
  if (g_cur == gamma_max && p_cur.value >= 0.0) return finish(gamma_max, p_cur.value, true);

  for (int k = 1; k <= state.max_inner; ++k) {
    double g_next = 0.0;
    try {
      g_next = rootfind::secant_step(g_prev, g_cur, p_prev.value, p_cur.value);
    } catch (const rootfind::DegenerateSecant&) {
      return run_fallback();
    }
    if (!std::isfinite(g_next)) return run_fallback();

    bool at_lower = false;
    bool at_upper = false;
    if (g_next <= 0.0) {
      g_next = 0.0;
      at_lower = true;
    } else if (g_next >= gamma_max) {
      g_next = gamma_max;
      at_upper = true;
    }

    SlopeSample p_next = at_lower ? at_zero : phi.sample(g_next);
    for (int h = 0; !std::isfinite(p_next.value); ++h) {
      if (h == state.domain_halvings) return run_fallback();
      g_next = 0.5 * (g_next + g_cur);
      at_lower = at_upper = false;
      p_next = phi.sample(g_next);
    }
    out.inner_iters = k;
    out.history.push_back(g_next);

    // For convex f the slope sign at a clipped endpoint certifies optimality.
    if (at_upper && p_next.value >= 0.0) return finish(gamma_max, p_next.value, true);
    if (at_lower && p_next.value <= 0.0) return finish(0.0, p_next.value, true);
    if (converged(p_next)) return finish(g_next, p_next.value, false);

    g_prev = g_cur;
    p_prev = p_cur;
    g_cur = g_next;
    p_cur = p_next;
  }
  return run_fallback();
}

LineSearchResult golden_section(const Objective& oracle, const Vector& x, const Vector& d,
                                double gamma_max, double tol) {
  if (!(tol > 0.0)) throw DomainError("golden_section: tolerance must be positive");
  if (!(gamma_max > 0.0)) throw DomainError("golden_section: gamma_max must be positive");

  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0;
  double b = gamma_max;
  double c = b - inv_phi * (b - a);
  double e = a + inv_phi * (b - a);
  double fc = segment_value(oracle, x, d, c);
  double fe = segment_value(oracle, x, d, e);
  int evals = 2;

  // The bracket shrinks by inv_phi per step; the cap only guards tol below
  // the floating-point resolution of gamma_max.
  for (int it = 0; it < 400 && (b - a) >= tol; ++it) {
    if (!(fe < fc)) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = segment_value(oracle, x, d, c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = segment_value(oracle, x, d, e);
    }
    ++evals;
  }

  LineSearchResult out;
  out.gamma = std::clamp(0.5 * (a + b), 0.0, gamma_max);
  // A bracket that never left the upper end means the minimiser is gamma_max
  // itself; return it exactly so active-set solvers can drop the away atom.
  if (b == gamma_max) {
    ++evals;
    if (segment_value(oracle, x, d, gamma_max) <= segment_value(oracle, x, d, out.gamma)) {
      out.gamma = gamma_max;
      out.clipped = true;
    }
  }
  out.inner_iters = evals;
  out.residual = std::numeric_limits<double>::quiet_NaN();
  out.history = {out.gamma};
  return out;
}

double exact_quadratic_step(double grad_dot_d, double d_curvature, double gamma_max) {
  if (!(d_curvature > 0.0)) throw DomainError("exact_quadratic_step: curvature must be positive");
  return std::clamp(grad_dot_d / d_curvature, 0.0, gamma_max);
}

}  // namespace secantfw::linesearch
