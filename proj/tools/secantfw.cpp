// Command-line driver: solve one instance, run a benchmark grid, compare
// secant and Newton root finding, or run the acceptance suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "secantfw/bench.hpp"
#include "secantfw/fw.hpp"
#include "secantfw/problems.hpp"
#include "secantfw/selftest.hpp"
#include "secantfw/stepsizes.hpp"

namespace fs = std::filesystem;
using namespace secantfw;

namespace {

struct SolveOptions {
  std::string problem = "QuadProb";
  std::size_t size = 100;
  std::uint64_t seed = 0;
  std::string solver = "bpcg";
  std::string stepsize = "secant";
  double gap_tol = 1e-7;
  std::size_t max_iters = 100000;
  double time_limit_s = 60.0;
  std::string out;
};

struct BenchOptions {
  std::string config;
  std::vector<std::string> problems;
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> stepsizes;
  std::string solver;
  double gap_tol = 0.0;
  std::size_t max_iters = 0;
  double time_limit_s = 0.0;
  std::size_t workers = 0;
  std::string out;
};

struct RootOptions {
  double tol = 1e-8;
  int repeats = 100;
  int instances = 5;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_solve(const SolveOptions& o) {
  const auto cls = problems::parse_problem_class(o.problem);
  const auto inst = problems::generate_instance(cls, o.size, o.seed);
  auto rule = stepsizes::make_step_rule(o.stepsize, inst.known_L);

  fw::SolveConfig cfg;
  cfg.gap_tol = o.gap_tol;
  cfg.max_iters = o.max_iters;
  cfg.time_limit_s = o.time_limit_s;
  cfg.strategy = o.stepsize;
  fw::SolveResult res;
  if (o.solver == "fw") {
    res = fw::run_fw(*inst.objective, *inst.lmo, inst.x0(), cfg, *rule);
  } else if (o.solver == "bpcg") {
    res = fw::run_bpcg(*inst.objective, *inst.lmo, inst.initial_active_set(), cfg, *rule);
  } else {
    throw ConfigError("solver must be fw or bpcg");
  }

  long long inner = 0;
  for (const auto& t : res.trajectory) inner += t.inner_iters;
  nlohmann::json j = problems::describe(inst);
  j["solver"] = o.solver;
  j["stepsize"] = o.stepsize;
  j["status"] = fw::to_string(res.status);
  j["primal"] = res.primal;
  j["gap"] = res.gap;
  j["iterations"] = res.iterations;
  j["elapsed_s"] = res.elapsed_s;
  j["mean_inner"] = res.trajectory.empty() ? 0.0 : double(inner) / double(res.trajectory.size());
  j["active_set_size"] = res.active_set_size;
  j["null_steps"] = res.null_steps;
  j["fallbacks"] = res.fallbacks;
  if (!res.message.empty()) j["message"] = res.message;

  if (!o.out.empty()) {
    bench::RunRecord rec;
    rec.instance = {cls, o.size, o.seed};
    rec.strategy = o.stepsize;
    rec.solver = o.solver;
    rec.trajectory = res.trajectory;
    const auto report = bench::emit_plot_data({rec}, o.out);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_bench(const BenchOptions& o) {
  bench::BenchConfig cfg;
  if (!o.config.empty()) cfg = bench::load_bench_config(o.config);
  if (!o.problems.empty()) {
    cfg.classes.clear();
    for (const auto& p : o.problems) cfg.classes.push_back(problems::parse_problem_class(p));
  }
  if (!o.sizes.empty()) cfg.sizes = o.sizes;
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  if (!o.stepsizes.empty()) cfg.strategies = o.stepsizes;
  if (!o.solver.empty()) cfg.solver = o.solver;
  if (o.gap_tol > 0.0) cfg.gap_tol = o.gap_tol;
  if (o.max_iters > 0) cfg.max_iters = o.max_iters;
  if (o.time_limit_s > 0.0) cfg.time_limit_s = o.time_limit_s;
  if (o.workers > 0) cfg.workers = o.workers;
  if (!o.out.empty()) cfg.out_dir = o.out;

  const auto result = bench::run_benchmark(cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  std::cout << "class,strategy,solved,total,geomean_time_s,geomean_unsolved_gap,"
               "mean_iters_solved,mean_secant_inner\n";
  for (const auto& row : result.summary) {
    std::cout << problems::to_string(row.cls) << ',' << row.strategy << ',' << row.solved << ','
              << row.total << ',' << bench::format_number(row.geomean_time_s) << ','
              << bench::format_number(row.geomean_unsolved_gap) << ','
              << bench::format_number(row.mean_iters_solved) << ','
              << (row.mean_secant_inner ? bench::format_number(*row.mean_secant_inner) : "")
              << '\n';
  }
  if (!cfg.out_dir.empty()) {
    std::cerr << "wrote " << result.files.size() << " files to " << cfg.out_dir << "\n";
  }
  return 0;
}

int cmd_rootbench(const RootOptions& o) {
  const auto rows = bench::rootbench(o.tol, o.repeats, o.instances, o.seed);
  if (!o.out.empty()) bench::write_rootbench_csv(fs::path(o.out) / "rootbench.csv", rows);
  std::cout << "name,family,secant_iters,secant_converged,secant_time_s,newton_iters,"
               "newton_converged,newton_time_s,newton_over_secant\n";
  for (const auto& r : rows) {
    std::cout << r.name << ',' << r.family << ',' << r.secant_iters << ',' << r.secant_converged
              << ',' << bench::format_number(r.secant_time_s) << ',' << r.newton_iters << ','
              << r.newton_converged << ',' << bench::format_number(r.newton_time_s) << ','
              << bench::format_number(r.time_ratio) << '\n';
  }
  return 0;
}

int cmd_selftest() {
  bool all = true;
  for (const auto& c : selftest::criteria()) {
    const auto r = selftest::run_criterion(c);
    std::cout << selftest::format_result(r) << std::endl;
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frank-Wolfe solvers with a secant line search"};
  app.require_subcommand(1);

  SolveOptions so;
  auto* solve = app.add_subcommand("solve", "Solve one generated instance");
  solve->add_option("--problem", so.problem, "Problem class")->capture_default_str();
  solve->add_option("--size", so.size, "Instance size")->capture_default_str();
  solve->add_option("--seed", so.seed, "Instance seed")->capture_default_str();
  solve->add_option("--solver", so.solver, "fw or bpcg")->capture_default_str();
  solve->add_option("--stepsize", so.stepsize, "Step-size strategy")->capture_default_str();
  solve->add_option("--gap-tol", so.gap_tol, "FW gap tolerance")->capture_default_str();
  solve->add_option("--max-iters", so.max_iters, "Iteration limit")->capture_default_str();
  solve->add_option("--time-limit-s", so.time_limit_s, "Time limit")->capture_default_str();
  solve->add_option("--out", so.out, "Directory for the trajectory CSV");

  BenchOptions bo;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark grid");
  bench_cmd->add_option("--config", bo.config, "JSON config file");
  bench_cmd->add_option("--problem", bo.problems, "Problem classes")->delimiter(',');
  bench_cmd->add_option("--size", bo.sizes, "Instance sizes")->delimiter(',');
  bench_cmd->add_option("--seed", bo.seeds, "Instance seeds")->delimiter(',');
  bench_cmd->add_option("--stepsize", bo.stepsizes, "Step-size strategies")->delimiter(',');
  bench_cmd->add_option("--solver", bo.solver, "fw or bpcg");
  bench_cmd->add_option("--gap-tol", bo.gap_tol, "FW gap tolerance");
  bench_cmd->add_option("--max-iters", bo.max_iters, "Iteration limit");
  bench_cmd->add_option("--time-limit-s", bo.time_limit_s, "Time limit per run");
  bench_cmd->add_option("--workers", bo.workers, "Parallel workers");
  bench_cmd->add_option("--out", bo.out, "Output directory");

  RootOptions ro;
  auto* root_cmd = app.add_subcommand("rootbench", "Compare secant and Newton root finding");
  root_cmd->add_option("--tol", ro.tol, "Residual tolerance")->capture_default_str();
  root_cmd->add_option("--repeats", ro.repeats, "Timing repeats")->capture_default_str();
  root_cmd->add_option("--instances", ro.instances, "Line-search instances per family")
      ->capture_default_str();
  root_cmd->add_option("--seed", ro.seed, "Sampling seed")->capture_default_str();
  root_cmd->add_option("--out", ro.out, "Output directory");

  auto* self_cmd = app.add_subcommand("selftest", "Run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(so);
    if (*bench_cmd) return cmd_bench(bo);
    if (*root_cmd) return cmd_rootbench(ro);
    if (*self_cmd) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
