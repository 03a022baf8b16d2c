#pragma once

// Step-size rules for Frank-Wolfe type updates x <- x - gamma d.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secantfw/core.hpp"
#include "secantfw/linesearch.hpp"

namespace secantfw::stepsizes {

struct StepContext {
  std::size_t t = 0;
  const Vector& x;
  const Vector& d;
  const Vector& grad;
  double grad_dot_d = 0.0;
  double gamma_max = 1.0;
  const Objective& oracle;
  /// Requested accuracy of the step on the segment, in objective units.
  std::optional<double> primal_tolerance = std::nullopt;
};

struct AdaptiveState {
  double L_est = 1.0;
  double tau = 2.0;
  double eta = 0.9;
  /// The optimistic decrease by eta is skipped on the first call so that a
  /// user-supplied estimate is tried as given.
  bool primed = false;
};

struct MonotonicState {
  int halvings = 0;
};

enum class AdaptiveMode { zero_order, first_order };

class AdaptivityFailure : public Error {
 public:
  using Error::Error;
};

/// 2 / (t + 2).
double agnostic_step(std::size_t t);

/// clip(grad_dot_d / (L ||d||^2), 0, gamma_max).
double short_step(double grad_dot_d, double d_norm_sq, double L, double gamma_max);

/// Sufficiency test of the adaptive rules at step `gamma` with estimate `L`.
bool adaptive_test_holds(const StepContext& ctx, AdaptiveMode mode, double gamma, double L);

/// Smoothness-estimate step; throws AdaptivityFailure after 64 doublings.
double adaptive_step(AdaptiveState& state, const StepContext& ctx, AdaptiveMode mode);

/// Open-loop step 2^-j * 2/(t+2) with the smallest j >= state.halvings that
/// strictly improves f. Returns 0 if no j <= 64 qualifies.
double monotonic_step(MonotonicState& state, const StepContext& ctx);

/// Armijo backtracking from gamma_max, halving until sufficient decrease.
double backtracking_step(const StepContext& ctx, int& evaluations, double alpha = 0.5,
                         double shrink = 0.5, int max_halvings = 60);

// ---------------------------------------------------------------------------
// Strategy interface used by the solvers.

struct StepOutcome {
  double gamma = 0.0;
  int inner_iters = 0;
  bool failed = false;
  bool used_fallback = false;
};

class StepSizeRule {
 public:
  virtual ~StepSizeRule() = default;
  virtual std::string name() const = 0;
  virtual StepOutcome step(const StepContext& ctx) = 0;
  /// True for rules that guarantee f(x - gamma d) <= f(x).
  virtual bool monotone() const { return true; }
};

class SecantRule final : public StepSizeRule {
 public:
  explicit SecantRule(linesearch::SlsState state = {}) : state_(state) {}
  std::string name() const override { return "secant"; }
  StepOutcome step(const StepContext& ctx) override;
  const linesearch::SlsState& state() const { return state_; }

 private:
  linesearch::SlsState state_;
};

class AgnosticRule final : public StepSizeRule {
 public:
  std::string name() const override { return "agnostic"; }
  StepOutcome step(const StepContext& ctx) override;
  bool monotone() const override { return false; }
};

class ShortStepRule final : public StepSizeRule {
 public:
  explicit ShortStepRule(double L);
  std::string name() const override { return "shortstep"; }
  StepOutcome step(const StepContext& ctx) override;

 private:
  double L_;
};

class AdaptiveRule final : public StepSizeRule {
 public:
  AdaptiveRule(AdaptiveMode mode, AdaptiveState state) : mode_(mode), state_(state) {}
  std::string name() const override {
    return mode_ == AdaptiveMode::first_order ? "adaptive" : "adaptive-zero";
  }
  StepOutcome step(const StepContext& ctx) override;
  const AdaptiveState& state() const { return state_; }

 private:
  AdaptiveMode mode_;
  AdaptiveState state_;
};

class MonotonicRule final : public StepSizeRule {
 public:
  std::string name() const override { return "monotonic"; }
  StepOutcome step(const StepContext& ctx) override;

 private:
  MonotonicState state_;
};

class GoldenRule final : public StepSizeRule {
 public:
  explicit GoldenRule(double tol = 1e-10) : tol_(tol) {}
  std::string name() const override { return "golden"; }
  StepOutcome step(const StepContext& ctx) override;

 private:
  double tol_;
};

class BacktrackingRule final : public StepSizeRule {
 public:
  std::string name() const override { return "backtracking"; }
  StepOutcome step(const StepContext& ctx) override;
};

/// Names accepted by make_step_rule.
const std::vector<std::string>& step_rule_names();

/**
 * Builds a rule by name: secant, agnostic, shortstep, adaptive,
 * adaptive-zero, monotonic, golden, backtracking. `known_L` is required for
 * shortstep; the adaptive rules estimate their own constant on first use.
 */
std::unique_ptr<StepSizeRule> make_step_rule(std::string_view name,
                                             std::optional<double> known_L = std::nullopt);

}  // namespace secantfw::stepsizes
