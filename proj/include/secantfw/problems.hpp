#pragma once

// Seeded generators for the eight benchmark problem classes.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "secantfw/core.hpp"
#include "secantfw/fw.hpp"
#include "secantfw/lmo.hpp"
#include "secantfw/objectives.hpp"

namespace secantfw::problems {

enum class ProblemClass { QuadProb, Ill, Birkhoff, Nuclear, Spec, OD, OA, Port };

const std::vector<ProblemClass>& all_problem_classes();
const char* to_string(ProblemClass cls);
/// Case-insensitive; throws ConfigError for unknown names.
ProblemClass parse_problem_class(std::string_view name);

/// Condition number of the Ill class Hessian.
inline constexpr double kIllCondition = 1e6;
/// Strength of the leading factor of the Spec target.
inline constexpr double kSpecStrength = 5.0;

struct GeneratorOptions {
  /// Replaces the random QuadProb target.
  std::optional<Vector> quadprob_target;
  /// Skip the reference solve that fills known_opt.
  bool compute_known_opt = true;
};

struct ProblemInstance {
  ProblemClass cls = ProblemClass::QuadProb;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  Shape shape;  // (n, 1) for vector classes
  std::shared_ptr<const Objective> objective;
  std::shared_ptr<const lmo::LinearMinimizationOracle> lmo;
  std::optional<double> known_L;
  std::optional<double> known_opt;
  std::vector<Vector> initial_atoms;
  std::vector<double> initial_weights;

  std::size_t dimension() const { return shape.size(); }
  Vector x0() const;
  fw::ActiveSet initial_active_set() const;
};

/**
 * Deterministic instance for (class, size, seed). Vector classes use `size`
 * as the dimension; matrix classes use size x size matrices. Throws
 * ConfigError for sizes outside the supported range.
 */
ProblemInstance generate_instance(ProblemClass cls, std::size_t size, std::uint64_t seed,
                                  const GeneratorOptions& options = {});

/// Random point in the relative interior of the instance's feasible region.
Vector sample_feasible_point(const ProblemInstance& instance, std::mt19937_64& rng);

/// Euclidean projection onto the probability simplex.
Vector project_simplex(const Vector& y);

/// Euclidean projection onto the Birkhoff polytope (Dykstra's method).
Vector project_birkhoff(const Vector& y, std::size_t n, double tol = 1e-15,
                        int max_iter = 200000);

struct ReferenceSolution {
  Vector x;
  double value = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

/**
 * Accelerated projected gradient with function-value restarts, stopped once
 * the FW gap certificate from `lmo` drops below gap_tol * max(1, |f|), or
 * when a plain projected step no longer decreases f.
 */
ReferenceSolution projected_gradient_solve(const Objective& objective,
                                           const std::function<Vector(const Vector&)>& project,
                                           const lmo::LinearMinimizationOracle& lmo,
                                           const Vector& x0, double L, double gap_tol,
                                           int max_iter);

/// Self-describing text dump; (class, size, seed) is enough to regenerate.
nlohmann::json describe(const ProblemInstance& instance);
ProblemInstance regenerate(const nlohmann::json& description);

}  // namespace secantfw::problems
