#include "secantfw/stepsizes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace secantfw::stepsizes {
namespace {

constexpr double kRoundoff = 16.0 * std::numeric_limits<double>::epsilon();
constexpr int kMaxDoublings = 64;

double value_at(const StepContext& ctx, double gamma) {
  const double v = ctx.oracle.value(ctx.x - gamma * ctx.d);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

// Local smoothness along d from a short gradient difference.
double initial_smoothness_estimate(const StepContext& ctx) {
  const double dn = ctx.d.norm();
  for (double h = 1e-3 * ctx.gamma_max; h > 1e-12; h *= 0.5) {
    const Vector g = ctx.oracle.gradient(ctx.x - h * ctx.d);
    if (!g.allFinite()) continue;
    const double est = (g - ctx.grad).norm() / (h * dn);
    if (std::isfinite(est) && est > 0.0) return est;
  }
  return 1.0;
}

}  // namespace

double agnostic_step(std::size_t t) { return 2.0 / (static_cast<double>(t) + 2.0); }

double short_step(double grad_dot_d, double d_norm_sq, double L, double gamma_max) {
  if (!(L > 0.0)) throw DomainError("short_step: L must be positive");
  if (!(d_norm_sq > 0.0)) throw DomainError("short_step: direction must be nonzero");
  return std::clamp(grad_dot_d / (L * d_norm_sq), 0.0, gamma_max);
}

bool adaptive_test_holds(const StepContext& ctx, AdaptiveMode mode, double gamma, double L) {
  const double dn2 = ctx.d.squaredNorm();
  if (mode == AdaptiveMode::zero_order) {
    const double fx = ctx.oracle.value(ctx.x);
    const double fy = value_at(ctx, gamma);
    const double bound = fx - gamma * ctx.grad_dot_d + 0.5 * gamma * gamma * L * dn2;
    return fy <= bound + kRoundoff * std::max(1.0, std::abs(fx));
  }
  // First-order variant: the slope at the candidate must not fall below what
  // L-smoothness along d allows.
  const double slope = ctx.oracle.gradient(ctx.x - gamma * ctx.d).dot(ctx.d);
  if (!std::isfinite(slope)) return false;
  const double drop = gamma * L * dn2;
  const double slack = kRoundoff * (std::abs(ctx.grad_dot_d) + drop);
  return slope >= ctx.grad_dot_d - drop - slack;
}

double adaptive_step(AdaptiveState& state, const StepContext& ctx, AdaptiveMode mode) {
  if (!(state.L_est > 0.0) || !(state.tau > 1.0) || !(state.eta > 0.0 && state.eta <= 1.0)) {
    throw ConfigError("adaptive_step: invalid state");
  }
  if (ctx.grad_dot_d <= 0.0) return 0.0;
  const double dn2 = ctx.d.squaredNorm();
  if (dn2 == 0.0) return 0.0;

  if (state.primed) state.L_est *= state.eta;
  state.primed = true;

  for (int k = 0; k <= kMaxDoublings; ++k) {
    const double gamma = std::min(ctx.grad_dot_d / (state.L_est * dn2), ctx.gamma_max);
    if (adaptive_test_holds(ctx, mode, gamma, state.L_est)) return gamma;
    if (k < kMaxDoublings) state.L_est *= state.tau;
  }
  throw AdaptivityFailure("adaptive_step: smoothness estimate kept failing");
}

double monotonic_step(MonotonicState& state, const StepContext& ctx) {
  if (ctx.grad_dot_d <= 0.0) return 0.0;
  const double fx = ctx.oracle.value(ctx.x);
  const double base = agnostic_step(ctx.t);
  for (int j = state.halvings; j <= 64; ++j) {
    const double gamma = std::min(std::ldexp(base, -j), ctx.gamma_max);
    if (value_at(ctx, gamma) < fx) {
      state.halvings = j;
      return gamma;
    }
  }
  return 0.0;
}

double backtracking_step(const StepContext& ctx, int& evaluations, double alpha, double shrink,
                         int max_halvings) {
  evaluations = 0;
  if (ctx.grad_dot_d <= 0.0) return 0.0;
  const double fx = ctx.oracle.value(ctx.x);
  double gamma = ctx.gamma_max;
  for (int k = 0; k <= max_halvings; ++k) {
    ++evaluations;
    if (value_at(ctx, gamma) <= fx - alpha * gamma * ctx.grad_dot_d) return gamma;
    gamma *= shrink;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

StepOutcome SecantRule::step(const StepContext& ctx) {
  std::optional<double> slope_tol;
  if (ctx.primal_tolerance) slope_tol = *ctx.primal_tolerance / ctx.gamma_max;
  const auto r = linesearch::sls(ctx.oracle, ctx.x, ctx.d, ctx.gamma_max, state_, ctx.grad_dot_d,
                                 slope_tol);
  return {r.gamma, r.inner_iters, false, r.used_fallback};
}

StepOutcome AgnosticRule::step(const StepContext& ctx) {
  return {std::min(agnostic_step(ctx.t), ctx.gamma_max), 0, false, false};
}

ShortStepRule::ShortStepRule(double L) : L_(L) {
  if (!(L > 0.0)) throw ConfigError("shortstep needs a positive smoothness constant");
}

StepOutcome ShortStepRule::step(const StepContext& ctx) {
  const double dn2 = ctx.d.squaredNorm();
  if (dn2 == 0.0) return {0.0, 0, false, false};
  return {short_step(ctx.grad_dot_d, dn2, L_, ctx.gamma_max), 0, false, false};
}

StepOutcome AdaptiveRule::step(const StepContext& ctx) {
  if (!(state_.L_est > 0.0)) state_.L_est = initial_smoothness_estimate(ctx);
  StepOutcome out;
  const double before = state_.L_est;
  try {
    out.gamma = adaptive_step(state_, ctx, mode_);
  } catch (const AdaptivityFailure&) {
    state_.L_est = before;
    out.gamma = std::min(agnostic_step(ctx.t), ctx.gamma_max);
    out.used_fallback = true;
  }
  return out;
}

StepOutcome MonotonicRule::step(const StepContext& ctx) {
  const double gamma = monotonic_step(state_, ctx);
  return {gamma, 0, gamma == 0.0 && ctx.grad_dot_d > 0.0, false};
}

StepOutcome GoldenRule::step(const StepContext& ctx) {
  if (ctx.grad_dot_d <= 0.0) return {0.0, 0, false, false};
  const auto r = linesearch::golden_section(ctx.oracle, ctx.x, ctx.d, ctx.gamma_max,
                                            tol_ * ctx.gamma_max);
  return {r.gamma, r.inner_iters, false, false};
}

StepOutcome BacktrackingRule::step(const StepContext& ctx) {
  int evals = 0;
  const double gamma = backtracking_step(ctx, evals);
  return {gamma, evals, gamma == 0.0 && ctx.grad_dot_d > 0.0, false};
}

const std::vector<std::string>& step_rule_names() {
  static const std::vector<std::string> names = {
      "secant", "agnostic", "shortstep", "adaptive", "adaptive-zero", "monotonic", "golden",
      "backtracking"};
  return names;
}

std::unique_ptr<StepSizeRule> make_step_rule(std::string_view name, std::optional<double> known_L) {
  if (name == "secant") return std::make_unique<SecantRule>();
  if (name == "agnostic") return std::make_unique<AgnosticRule>();
  if (name == "shortstep") {
    if (!known_L) throw ConfigError("shortstep requires a known smoothness constant");
    return std::make_unique<ShortStepRule>(*known_L);
  }
  // Adaptive rules estimate L themselves (L_est = 0 means "estimate on first use").
  if (name == "adaptive") {
    return std::make_unique<AdaptiveRule>(AdaptiveMode::first_order, AdaptiveState{0.0});
  }
  if (name == "adaptive-zero") {
    return std::make_unique<AdaptiveRule>(AdaptiveMode::zero_order, AdaptiveState{0.0});
  }
  if (name == "monotonic") return std::make_unique<MonotonicRule>();
  if (name == "golden") return std::make_unique<GoldenRule>();
  if (name == "backtracking") return std::make_unique<BacktrackingRule>();
  throw ConfigError("unknown step-size rule '" + std::string(name) + "'");
}

}  // namespace secantfw::stepsizes
