#pragma once

// Benchmark harness: solver x strategy x instance grids, summary tables in the
// reporting conventions of the experiments, the scalar root-finding
// comparison, and CSV plot data.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "secantfw/core.hpp"
#include "secantfw/problems.hpp"

namespace secantfw::bench {

struct InstanceSpec {
  problems::ProblemClass cls = problems::ProblemClass::QuadProb;
  std::size_t size = 0;
  std::uint64_t seed = 0;
};

struct BenchConfig {
  std::vector<problems::ProblemClass> classes;
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> strategies{"secant"};
  std::string solver = "bpcg";  // fw | bpcg
  double gap_tol = 1e-7;
  double time_limit_s = 60.0;
  std::size_t max_iters = 100000;
  std::string out_dir;  // empty: nothing is written
  std::size_t workers = 1;

  /// Throws ConfigError when the grid is empty or a field is invalid.
  void validate() const;
  /// classes x sizes x seeds, in that nesting order.
  std::vector<InstanceSpec> instances() const;
};

/// Reads the field names of BenchConfig; missing fields keep their defaults.
BenchConfig bench_config_from_json(const nlohmann::json& j);
BenchConfig load_bench_config(const std::filesystem::path& path);
nlohmann::json to_json(const BenchConfig& cfg);

struct RunRecord {
  InstanceSpec instance;
  std::string strategy;
  std::string solver;
  double primal = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::infinity();
  bool solved = false;
  std::size_t iterations = 0;
  double wall_time_s = 0.0;
  /// Line-search calls (one per step taken) and their summed inner iterations.
  std::size_t step_calls = 0;
  long long inner_total = 0;
  std::string status;
  std::string message;
  std::optional<double> known_opt;
  std::vector<TrajectoryRecord> trajectory;

  double mean_inner() const;
};

struct SummaryRow {
  problems::ProblemClass cls = problems::ProblemClass::QuadProb;
  std::string strategy;
  double geomean_time_s = 0.0;
  /// NaN when every instance was solved.
  double geomean_unsolved_gap = std::numeric_limits<double>::quiet_NaN();
  /// NaN when no instance was solved.
  double mean_iters_solved = std::numeric_limits<double>::quiet_NaN();
  /// Pooled over all line-search calls; present for the secant strategy only.
  std::optional<double> mean_secant_inner;
  std::size_t solved = 0;
  std::size_t total = 0;
};

double geometric_mean(const std::vector<double>& values);

/// Solves one (instance, strategy) pair. Errors become unsolved records.
RunRecord run_single(const InstanceSpec& spec, const std::string& strategy,
                     const std::string& solver, double gap_tol, double time_limit_s,
                     std::size_t max_iters);

/// Groups by (class, strategy) in order of first appearance.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

struct BenchResult {
  std::vector<RunRecord> records;
  std::vector<SummaryRow> summary;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/**
 * Runs the grid on a pool of cfg.workers threads. Records come back in grid
 * order (instances, then strategies) regardless of the worker count. When
 * cfg.out_dir is set, writes one record file per (class, strategy),
 * summary.csv and the plot data.
 */
BenchResult run_benchmark(const BenchConfig& cfg);

/// Scientific notation with 17 significant digits; "nan", "inf", "-inf".
std::string format_number(double v);

void write_records_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

struct PlotDataReport {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/**
 * One trajectory file per run plus one secant inner-iteration histogram per
 * class. A line search that accepts its warm-start seed counts as 0 inner
 * iterations. Classes without secant runs get a warning instead of a file.
 * Throws Error naming the path on I/O failure.
 */
PlotDataReport emit_plot_data(const std::vector<RunRecord>& records,
                              const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Scalar root-finding comparison

struct RootBenchRow {
  std::string name;
  std::string family;  // scalar | affine | quadratic-ls | portfolio-ls
  int secant_iters = 0;
  double secant_residual = 0.0;
  bool secant_converged = false;
  double secant_time_s = 0.0;
  int newton_iters = 0;
  double newton_residual = 0.0;
  bool newton_converged = false;
  double newton_time_s = 0.0;
  /// Newton time over secant time.
  double time_ratio = 0.0;
};

/**
 * Secant seeded at (0, 1e-5) against Newton seeded at 1e-5, on the eight
 * scalar test functions, an affine function, and `instances` random
 * line-search problems from each of a quadratic and a portfolio family.
 * Times are per solve, averaged over `repeats`.
 */
std::vector<RootBenchRow> rootbench(double tol, int repeats, int instances = 5,
                                    std::uint64_t seed = 0);

void write_rootbench_csv(const std::filesystem::path& path, const std::vector<RootBenchRow>& rows);

}  // namespace secantfw::bench
