#include <doctest.h>

#include <cmath>

#include "secantfw/fw.hpp"
#include "secantfw/problems.hpp"

using namespace secantfw;
using problems::ProblemClass;

namespace {

fw::SolveResult solve(const problems::ProblemInstance& inst, const std::string& solver,
                      const std::string& strategy, double gap_tol, std::size_t max_iters) {
  fw::SolveConfig cfg;
  cfg.strategy = strategy;
  cfg.gap_tol = gap_tol;
  cfg.max_iters = max_iters;
  cfg.time_limit_s = 60.0;
  auto rule = stepsizes::make_step_rule(strategy, inst.known_L);
  return solver == "fw" ? fw::run_fw(*inst.objective, *inst.lmo, inst.x0(), cfg, *rule)
                        : fw::run_bpcg(*inst.objective, *inst.lmo, inst.initial_active_set(), cfg,
                                       *rule);
}

}  // namespace

TEST_CASE("secant BPCG solves every class at small sizes") {
  const std::vector<std::pair<ProblemClass, std::size_t>> grid{
      {ProblemClass::QuadProb, 40}, {ProblemClass::Ill, 30}, {ProblemClass::Birkhoff, 5},
      {ProblemClass::Spec, 8},      {ProblemClass::OD, 24},  {ProblemClass::OA, 24},
      {ProblemClass::Port, 20},     {ProblemClass::Nuclear, 6}};
  for (auto [cls, size] : grid) {
    const std::string cls_name = problems::to_string(cls);
    CAPTURE(cls_name);
    const auto inst = problems::generate_instance(cls, size, 1);
    const auto res = solve(inst, "bpcg", "secant", 1e-6, 20000);
    CHECK(res.solved());
    CHECK(res.gap <= 1e-6);
    CHECK(res.null_steps == 0);
    if (inst.known_opt) {
      CHECK(std::abs(res.primal - *inst.known_opt) <= 1e-6 * std::max(1.0, std::abs(res.primal)));
    }
  }
}

TEST_CASE("secant and golden-section steps reach the same optimum") {
  for (auto cls : {ProblemClass::Port, ProblemClass::OA}) {
    const std::string cls_name = problems::to_string(cls);
    CAPTURE(cls_name);
    const auto inst = problems::generate_instance(cls, 16, 2);
    const auto sec = solve(inst, "bpcg", "secant", 1e-8, 20000);
    const auto gold = solve(inst, "bpcg", "golden", 1e-8, 20000);
    REQUIRE(sec.solved());
    REQUIRE(gold.solved());
    CHECK(std::abs(sec.primal - gold.primal) <= 2e-8);
  }
}

TEST_CASE("step-size rules on one instance") {
  const auto inst = problems::generate_instance(ProblemClass::QuadProb, 30, 3);
  for (const auto& name : stepsizes::step_rule_names()) {
    CAPTURE(name);
    for (const std::string solver : {"fw", "bpcg"}) {
      CAPTURE(solver);
      const auto res = solve(inst, solver, name, 1e-4, 20000);
      CHECK(res.solved());
      CHECK(res.primal - *inst.known_opt <= 1e-4 + 1e-12);
    }
  }
}

TEST_CASE("secant line search needs few inner iterations on quadratics") {
  const auto inst = problems::generate_instance(ProblemClass::Birkhoff, 6, 0);
  const auto res = solve(inst, "bpcg", "secant", 1e-7, 20000);
  REQUIRE(res.solved());
  long long inner = 0;
  for (const auto& t : res.trajectory) {
    CHECK(t.inner_iters <= 1);
    inner += t.inner_iters;
  }
  CHECK(double(inner) / double(res.trajectory.size()) <= 1.0);
}

TEST_CASE("inexact FW with the tolerance schedule converges") {
  const auto inst = problems::generate_instance(ProblemClass::Port, 20, 0);
  fw::SolveConfig cfg;
  cfg.strategy = "secant";
  cfg.gap_tol = 1e-4;
  cfg.max_iters = 50000;
  cfg.tolerance = {fw::ToleranceMode::scheduled, 1e-3};
  const auto res = fw::run_fw(*inst.objective, *inst.lmo, inst.x0(), cfg);
  CHECK(res.solved());
}
