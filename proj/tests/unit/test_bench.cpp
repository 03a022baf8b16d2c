#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "secantfw/bench.hpp"

using namespace secantfw;
using namespace secantfw::bench;
using problems::ProblemClass;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("secantfw_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

BenchConfig small_grid() {
  BenchConfig cfg;
  cfg.classes = {ProblemClass::QuadProb, ProblemClass::Port};
  cfg.sizes = {10};
  cfg.seeds = {0, 1};
  cfg.strategies = {"secant", "agnostic"};
  cfg.max_iters = 200;
  return cfg;
}

RunRecord fake_record(ProblemClass cls, std::string strategy, bool solved, double time, double gap,
                      std::size_t iters, std::size_t calls, long long inner) {
  RunRecord r;
  r.instance = {cls, 5, 0};
  r.strategy = std::move(strategy);
  r.solved = solved;
  r.wall_time_s = time;
  r.gap = gap;
  r.iterations = iters;
  r.step_calls = calls;
  r.inner_total = inner;
  return r;
}

}  // namespace

TEST_CASE("geometric mean") {
  CHECK(geometric_mean({1.0, 4.0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(geometric_mean({1e-6, 4e-6}) == doctest::Approx(2e-6).epsilon(1e-14));
  CHECK(geometric_mean({3.0}) == doctest::Approx(3.0));
  CHECK(std::isnan(geometric_mean({})));
  CHECK(std::isnan(geometric_mean({1.0, 0.0})));
}

TEST_CASE("number formatting") {
  CHECK(format_number(1.0) == "1.0000000000000000e+00");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("config validation and JSON") {
  BenchConfig cfg = small_grid();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.instances().size() == 4);
  CHECK(cfg.instances()[1].seed == 1);
  CHECK(cfg.instances()[2].cls == ProblemClass::Port);

  const auto j = to_json(cfg);
  const BenchConfig back = bench_config_from_json(j);
  CHECK(back.classes == cfg.classes);
  CHECK(back.sizes == cfg.sizes);
  CHECK(back.seeds == cfg.seeds);
  CHECK(back.strategies == cfg.strategies);
  CHECK(back.max_iters == 200);

  const BenchConfig partial = bench_config_from_json(nlohmann::json{{"classes", {"Ill"}}, {"sizes", {5}}});
  CHECK(partial.gap_tol == 1e-7);
  CHECK(partial.strategies == std::vector<std::string>{"secant"});
  CHECK_THROWS_AS(bench_config_from_json(nlohmann::json{{"sizes", "x"}}), ConfigError);
  CHECK_THROWS_AS(bench_config_from_json(nlohmann::json{{"classes", {"Nope"}}}), ConfigError);

  BenchConfig empty;
  CHECK_THROWS_AS(empty.validate(), ConfigError);
  BenchConfig bad = small_grid();
  bad.solver = "newton";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_grid();
  bad.strategies = {"nonsense"};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(load_bench_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("summary rows re-derived by hand") {
  std::vector<RunRecord> recs{
      fake_record(ProblemClass::Ill, "secant", true, 1.0, 1e-8, 10, 10, 12),
      fake_record(ProblemClass::Ill, "secant", true, 4.0, 1e-8, 30, 30, 30),
      fake_record(ProblemClass::Ill, "secant", false, 2.0, 1e-3, 100, 100, 158),
      fake_record(ProblemClass::Ill, "agnostic", false, 1.0, 1e-4, 100, 100, 0),
      fake_record(ProblemClass::OD, "secant", true, 2.0, 1e-8, 5, 5, 5),
  };
  const auto rows = summarize(recs);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].cls == ProblemClass::Ill);
  CHECK(rows[0].strategy == "secant");
  CHECK(rows[0].total == 3);
  CHECK(rows[0].solved == 2);
  CHECK(rows[0].geomean_time_s == doctest::Approx(2.0));
  CHECK(rows[0].geomean_unsolved_gap == doctest::Approx(1e-3));
  CHECK(rows[0].mean_iters_solved == doctest::Approx(20.0));
  CHECK(rows[0].mean_secant_inner.value() == doctest::Approx(200.0 / 140.0));
  CHECK(rows[1].strategy == "agnostic");
  CHECK_FALSE(rows[1].mean_secant_inner.has_value());
  CHECK(std::isnan(rows[1].mean_iters_solved));
  CHECK(rows[2].cls == ProblemClass::OD);
  CHECK(std::isnan(rows[2].geomean_unsolved_gap));
}

TEST_CASE("a 2 x 2 grid gives four rows per strategy and matches its records") {
  BenchConfig cfg = small_grid();
  const auto res = run_benchmark(cfg);
  REQUIRE(res.records.size() == 8);
  CHECK(res.summary.size() == 4);
  for (std::size_t i = 0; i < cfg.instances().size(); ++i) {
    for (std::size_t s = 0; s < 2; ++s) {
      const auto& r = res.records[i * 2 + s];
      CHECK(r.instance.cls == cfg.instances()[i].cls);
      CHECK(r.instance.seed == cfg.instances()[i].seed);
      CHECK(r.strategy == cfg.strategies[s]);
      CHECK(r.step_calls == r.trajectory.size());
    }
  }
  // Summary rows recomputed from the records.
  const auto again = summarize(res.records);
  for (std::size_t k = 0; k < again.size(); ++k) {
    CHECK(again[k].solved == res.summary[k].solved);
    CHECK(again[k].geomean_time_s == res.summary[k].geomean_time_s);
  }
  CHECK(res.files.empty());
}

TEST_CASE("runs are reproducible across worker counts") {
  BenchConfig cfg = small_grid();
  const auto a = run_benchmark(cfg);
  const auto b = run_benchmark(cfg);
  cfg.workers = 3;
  const auto c = run_benchmark(cfg);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    for (const auto* other : {&b, &c}) {
      const auto& x = a.records[i];
      const auto& y = other->records[i];
      CHECK(x.primal == y.primal);
      CHECK(x.gap == y.gap);
      CHECK(x.iterations == y.iterations);
      CHECK(x.inner_total == y.inner_total);
      REQUIRE(x.trajectory.size() == y.trajectory.size());
      for (std::size_t t = 0; t < x.trajectory.size(); ++t) {
        CHECK(x.trajectory[t].gamma == y.trajectory[t].gamma);
      }
    }
  }
}

TEST_CASE("errors become unsolved records") {
  const auto r = run_single({ProblemClass::OD, 2, 0}, "secant", "bpcg", 1e-7, 10.0, 100);
  CHECK(r.status == "error");
  CHECK_FALSE(r.solved);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("output files") {
  const auto dir = scratch_dir("bench");
  BenchConfig cfg = small_grid();
  cfg.out_dir = dir.string();
  const auto res = run_benchmark(cfg);
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "records_QuadProb_secant.csv"));
  CHECK(fs::exists(dir / "records_Port_agnostic.csv"));

  const auto summary = read_csv(dir / "summary.csv");
  REQUIRE(summary.size() == 5);
  CHECK(summary[0][0] == "class");
  CHECK(summary[1][7] == "2");

  const auto recs = read_csv(dir / "records_QuadProb_secant.csv");
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].size() == 16);
  CHECK(recs[1][0] == "QuadProb");

  CHECK(load_bench_config(dir / "config.json").strategies == cfg.strategies);

  // Histogram weighted mean equals the pooled summary value.
  for (const auto& row : res.summary) {
    if (row.strategy != "secant") continue;
    const auto hist =
        read_csv(dir / "plots" / ("secant_hist_" + std::string(problems::to_string(row.cls)) + ".csv"));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < hist.size(); ++i) {
      num += std::stod(hist[i][0]) * std::stod(hist[i][1]);
      den += std::stod(hist[i][1]);
    }
    CHECK(num / den == doctest::Approx(*row.mean_secant_inner).epsilon(1e-12));
  }
  fs::remove_all(dir);
}

TEST_CASE("plot data") {
  const auto dir = scratch_dir("plots");
  RunRecord r = fake_record(ProblemClass::Port, "secant", true, 1.0, 0.0, 10, 10, 0);
  for (std::size_t t = 0; t < 10; ++t) {
    r.trajectory.push_back({t, 1.0 / double(t + 1), 0.5, 0.25, int(t % 3), 0.01 * t, StepKind::fw});
  }
  const auto report = emit_plot_data({r}, dir);
  CHECK(report.warnings.empty());
  const auto traj = read_csv(dir / "traj_Port_n5_s0_secant.csv");
  CHECK(traj.size() == 11);
  CHECK(traj[0][0] == "iteration");
  CHECK(traj[3][4] == "2");
  CHECK(traj[3][6] == "fw");
  const auto hist = read_csv(dir / "secant_hist_Port.csv");
  REQUIRE(hist.size() == 4);
  CHECK(hist[1] == std::vector<std::string>{"0", "4"});

  RunRecord other = fake_record(ProblemClass::OA, "agnostic", true, 1.0, 0.0, 1, 1, 0);
  const auto rep2 = emit_plot_data({other}, dir);
  REQUIRE(rep2.warnings.size() == 1);
  CHECK(rep2.warnings[0].find("OA") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "secant_hist_OA.csv"));

  CHECK(emit_plot_data({}, dir).warnings.size() == 1);
  CHECK_THROWS_AS(emit_plot_data({r}, "/proc/definitely/not/writable"), Error);
  fs::remove_all(dir);
}

TEST_CASE("root-finding comparison") {
  const auto rows = rootbench(1e-8, 1, 2, 0);
  std::map<std::string, int> families;
  for (const auto& r : rows) {
    ++families[r.family];
    CAPTURE(r.name);
    CHECK(r.newton_converged);
    CHECK(r.newton_residual < 1e-8);
    if (r.name == "x^3 - 2") {
      // phi is flat at the seed 0: the first secant slope is pure rounding
      // and the iterates collapse onto the second seed. The row reports it.
      CHECK_FALSE(r.secant_converged);
      continue;
    }
    CHECK(r.secant_converged);
    CHECK(r.secant_residual < 1e-8);
    CHECK(r.time_ratio > 0.0);
    if (r.family == "affine" || r.family == "quadratic-ls") CHECK(r.secant_iters <= 1);
  }
  CHECK(families["scalar"] == 8);
  CHECK(families["affine"] == 1);
  CHECK(families["quadratic-ls"] == 2);
  CHECK(families["portfolio-ls"] == 2);
  CHECK_THROWS_AS(rootbench(0.0, 1), ConfigError);

  const auto dir = scratch_dir("root");
  write_rootbench_csv(dir / "rootbench.csv", rows);
  CHECK(read_csv(dir / "rootbench.csv").size() == rows.size() + 1);
  fs::remove_all(dir);
}
