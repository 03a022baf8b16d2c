#include "secantfw/fw.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace secantfw::fw {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::unique_ptr<stepsizes::StepSizeRule> rule_for(const Objective& oracle, const SolveConfig& cfg) {
  return stepsizes::make_step_rule(cfg.strategy, oracle.smoothness());
}

void validate(const SolveConfig& cfg) {
  if (!(cfg.gap_tol > 0.0)) throw ConfigError("gap_tol must be positive");
  if (cfg.tolerance.mode != ToleranceMode::none && !(cfg.tolerance.value > 0.0)) {
    throw ConfigError("line-search tolerance must be positive");
  }
}

// Runs the rule, turning errors and reported failures into null steps.
stepsizes::StepOutcome take_step(stepsizes::StepSizeRule& rule, const stepsizes::StepContext& ctx,
                                 SolveResult& result) {
  stepsizes::StepOutcome out;
  try {
    out = rule.step(ctx);
  } catch (const Error&) {
    out = {0.0, 0, true, false};
  }
  if (out.failed || !std::isfinite(out.gamma)) {
    out.gamma = 0.0;
    ++result.null_steps;
  }
  if (out.used_fallback) ++result.fallbacks;
  out.gamma = std::clamp(out.gamma, 0.0, ctx.gamma_max);
  return out;
}

}  // namespace

std::optional<double> ToleranceSchedule::at(std::size_t t) const {
  switch (mode) {
    case ToleranceMode::none:
      return std::nullopt;
    case ToleranceMode::constant:
      return value;
    case ToleranceMode::scheduled:
      return tolerance_schedule(value, t);
  }
  return std::nullopt;
}

double tolerance_schedule(double eps, std::size_t i) {
  const double a = 2.0 * static_cast<double>(i) + 2.0;
  const double A = (static_cast<double>(i) + 1.0) * (static_cast<double>(i) + 2.0);
  return eps * a / (2.0 * A);
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iters:
      return "max_iters";
    case SolveStatus::time_limit:
      return "time_limit";
    case SolveStatus::aborted:
      return "aborted";
  }
  return "unknown";
}

double fw_gap(const Vector& grad, const Vector& x, const Vector& v) {
  if (grad.size() != x.size() || x.size() != v.size()) throw DimensionError("fw_gap: size mismatch");
  return grad.dot(x - v);
}

SolveResult run_fw(const Objective& oracle, const lmo::LinearMinimizationOracle& lmo,
                   const Vector& x0, const SolveConfig& cfg, stepsizes::StepSizeRule& rule) {
  validate(cfg);
  if (static_cast<std::size_t>(x0.size()) != oracle.dimension() ||
      oracle.dimension() != lmo.dimension()) {
    throw DimensionError("run_fw: oracle, LMO and x0 dimensions differ");
  }

  const auto start = Clock::now();
  SolveResult result;
  Vector x = x0;

  for (std::size_t t = 0;; ++t) {
    const double primal = oracle.value(x);
    if (!std::isfinite(primal)) {
      result.status = SolveStatus::aborted;
      result.message = "non-finite objective at iteration " + std::to_string(t);
      break;
    }
    const Vector grad = oracle.gradient(x);
    const Vector v = lmo.minimize(grad);
    const Vector d = x - v;
    const double gap = grad.dot(d);
    result.primal = primal;
    result.gap = gap;

    if (gap <= cfg.gap_tol) {
      result.status = SolveStatus::converged;
      break;
    }
    if (t >= cfg.max_iters) {
      result.status = SolveStatus::max_iters;
      break;
    }
    if (seconds_since(start) >= cfg.time_limit_s) {
      result.status = SolveStatus::time_limit;
      break;
    }

    const stepsizes::StepContext ctx{t, x, d, grad, gap, 1.0, oracle, cfg.tolerance.at(t)};
    const auto step = take_step(rule, ctx, result);
    x -= step.gamma * d;

    result.trajectory.push_back(
        {t, primal, gap, step.gamma, step.inner_iters, seconds_since(start), StepKind::fw});
  }

  result.x = std::move(x);
  result.iterations = result.trajectory.size();
  result.elapsed_s = seconds_since(start);
  return result;
}

SolveResult run_fw(const Objective& oracle, const lmo::LinearMinimizationOracle& lmo,
                   const Vector& x0, const SolveConfig& cfg) {
  auto rule = rule_for(oracle, cfg);
  return run_fw(oracle, lmo, x0, cfg, *rule);
}

SolveResult run_bpcg(const Objective& oracle, const lmo::LinearMinimizationOracle& lmo,
                     ActiveSet active, const SolveConfig& cfg, stepsizes::StepSizeRule& rule) {
  validate(cfg);
  if (static_cast<std::size_t>(active.x().size()) != oracle.dimension() ||
      oracle.dimension() != lmo.dimension()) {
    throw DimensionError("run_bpcg: oracle, LMO and active set dimensions differ");
  }

  const auto start = Clock::now();
  SolveResult result;

  for (std::size_t t = 0;; ++t) {
    const Vector& x = active.x();
    const double primal = oracle.value(x);
    if (!std::isfinite(primal)) {
      result.status = SolveStatus::aborted;
      result.message = "non-finite objective at iteration " + std::to_string(t);
      break;
    }
    const Vector grad = oracle.gradient(x);
    const Vector w = lmo.minimize(grad);
    const double gap = fw_gap(grad, x, w);
    result.primal = primal;
    result.gap = gap;

    if (gap <= cfg.gap_tol) {
      result.status = SolveStatus::converged;
      break;
    }
    if (t >= cfg.max_iters) {
      result.status = SolveStatus::max_iters;
      break;
    }
    if (seconds_since(start) >= cfg.time_limit_s) {
      result.status = SolveStatus::time_limit;
      break;
    }

    const auto [away, local] = active.away_and_local(grad);
    const double local_gap = grad.dot(active.atom(away) - active.atom(local));

    TrajectoryRecord rec{t, primal, gap, 0.0, 0, 0.0, StepKind::fw};
    if (local_gap >= gap) {
      const Vector d = active.atom(away) - active.atom(local);
      const double gamma_max = active.weight(away);
      const stepsizes::StepContext ctx{t, x, d, grad, local_gap, gamma_max, oracle,
                                       cfg.tolerance.at(t)};
      const auto step = take_step(rule, ctx, result);
      const bool dropped = active.pairwise_update(away, local, step.gamma);
      rec.gamma = step.gamma;
      rec.inner_iters = step.inner_iters;
      rec.step_kind = dropped ? StepKind::drop : StepKind::pairwise;
    } else {
      const Vector d = x - w;
      const stepsizes::StepContext ctx{t, x, d, grad, gap, 1.0, oracle, cfg.tolerance.at(t)};
      const auto step = take_step(rule, ctx, result);
      active.fw_update(w, step.gamma);
      rec.gamma = step.gamma;
      rec.inner_iters = step.inner_iters;
    }

    if (std::abs(active.renormalize()) > 1e-8) ++result.renormalizations;
    rec.elapsed_s = seconds_since(start);
    result.trajectory.push_back(rec);
  }

  result.x = active.x();
  result.active_set_size = active.size();
  result.iterations = result.trajectory.size();
  result.elapsed_s = seconds_since(start);
  return result;
}

SolveResult run_bpcg(const Objective& oracle, const lmo::LinearMinimizationOracle& lmo,
                     ActiveSet active, const SolveConfig& cfg) {
  auto rule = rule_for(oracle, cfg);
  return run_bpcg(oracle, lmo, std::move(active), cfg, *rule);
}

}  // namespace secantfw::fw
