#pragma once

// Frank-Wolfe solvers: vanilla FW (optionally with a line-search tolerance
// schedule) and Blended Pairwise Conditional Gradients over an active set.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "secantfw/core.hpp"
#include "secantfw/lmo.hpp"
#include "secantfw/stepsizes.hpp"

namespace secantfw::fw {

/// Extreme points with strictly positive convex weights, plus the cached
/// iterate x = sum_i weight_i * atom_i. Atoms are identified by exact equality.
class ActiveSet {
 public:
  explicit ActiveSet(Vector atom);
  ActiveSet(std::vector<Vector> atoms, std::vector<double> weights);

  std::size_t size() const { return atoms_.size(); }
  const Vector& atom(std::size_t i) const { return atoms_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const Vector& x() const { return x_; }

  std::optional<std::size_t> find(const Vector& atom) const;

  /// Indices of argmax and argmin of <grad, atom> (away and local atoms).
  std::pair<std::size_t, std::size_t> away_and_local(const Vector& grad) const;

  /// x <- (1 - gamma) x + gamma w. gamma = 1 collapses the set to {w}.
  void fw_update(const Vector& w, double gamma);

  /// Moves `gamma` weight from atom `away` to atom `local`. Returns true when
  /// the away atom's weight reaches zero and it is removed (drop step).
  bool pairwise_update(std::size_t away, std::size_t local, double gamma);

  double weight_sum() const;

  /// Rescales weights to sum to one; returns the pre-normalisation drift.
  double renormalize();

  /// Checks positivity, unit sum and the cached iterate against tolerances.
  bool invariants_hold(double weight_tol = 1e-12, double iterate_tol = 1e-10) const;

 private:
  void recompute_iterate();
  void remove(std::size_t i);

  std::vector<Vector> atoms_;
  std::vector<double> weights_;
  Vector x_;
};

// ---------------------------------------------------------------------------

enum class ToleranceMode { none, constant, scheduled };

struct ToleranceSchedule {
  ToleranceMode mode = ToleranceMode::none;
  double value = 0.0;  // delta for constant, epsilon for scheduled

  std::optional<double> at(std::size_t t) const;
};

/// delta_i = eps a_i / (2 A_i) with a_i = 2i + 2 and A_i = (i+1)(i+2), i.e. eps / (i + 2).
double tolerance_schedule(double eps, std::size_t i);

struct SolveConfig {
  std::size_t max_iters = 10000;
  double gap_tol = 1e-7;
  double time_limit_s = std::numeric_limits<double>::infinity();
  std::string strategy = "secant";
  ToleranceSchedule tolerance;
  std::uint64_t seed = 0;
};

enum class SolveStatus { converged, max_iters, time_limit, aborted };

const char* to_string(SolveStatus status);

struct SolveResult {
  Vector x;
  std::vector<TrajectoryRecord> trajectory;
  double primal = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::max_iters;
  std::string message;
  double elapsed_s = 0.0;
  std::size_t active_set_size = 0;
  int null_steps = 0;
  int fallbacks = 0;
  int renormalizations = 0;

  bool solved() const { return status == SolveStatus::converged; }
};

/// <grad, x - v>.
double fw_gap(const Vector& grad, const Vector& x, const Vector& v);

/**
 * Vanilla Frank-Wolfe: d_t = x_t - v_t, gamma_max = 1. One trajectory record
 * per step taken, holding the primal value and FW gap at x_t. Stops when the
 * gap falls to cfg.gap_tol, after cfg.max_iters steps, or on the time limit.
 */
SolveResult run_fw(const Objective& oracle, const lmo::LinearMinimizationOracle& lmo,
                   const Vector& x0, const SolveConfig& cfg, stepsizes::StepSizeRule& rule);

/// As above with the rule built from cfg.strategy.
SolveResult run_fw(const Objective& oracle, const lmo::LinearMinimizationOracle& lmo,
                   const Vector& x0, const SolveConfig& cfg);

/**
 * Blended Pairwise Conditional Gradients. Each iteration compares the local
 * pairwise gap <grad, a - s> (away atom a, local atom s) with the FW gap and
 * takes a pairwise step (gamma_max = weight of a) or an FW step
 * (gamma_max = 1). Pairwise steps that exhaust a are recorded as drop steps.
 */
SolveResult run_bpcg(const Objective& oracle, const lmo::LinearMinimizationOracle& lmo,
                     ActiveSet active, const SolveConfig& cfg, stepsizes::StepSizeRule& rule);

SolveResult run_bpcg(const Objective& oracle, const lmo::LinearMinimizationOracle& lmo,
                     ActiveSet active, const SolveConfig& cfg);

}  // namespace secantfw::fw
