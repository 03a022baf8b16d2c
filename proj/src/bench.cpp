#include "secantfw/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "secantfw/fw.hpp"
#include "secantfw/linesearch.hpp"
#include "secantfw/rootfind.hpp"
#include "secantfw/stepsizes.hpp"

namespace secantfw::bench {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw Error("write failed for " + path.string());
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

RunRecord run_on_instance(const problems::ProblemInstance& inst, const std::string& strategy,
                          const std::string& solver, double gap_tol, double time_limit_s,
                          std::size_t max_iters) {
  RunRecord rec;
  rec.instance = {inst.cls, inst.size, inst.seed};
  rec.strategy = strategy;
  rec.solver = solver;
  rec.known_opt = inst.known_opt;
  const auto start = Clock::now();
  try {
    fw::SolveConfig cfg;
    cfg.gap_tol = gap_tol;
    cfg.time_limit_s = time_limit_s;
    cfg.max_iters = max_iters;
    cfg.strategy = strategy;
    auto rule = stepsizes::make_step_rule(strategy, inst.known_L);
    fw::SolveResult result;
    if (solver == "fw") {
      result = fw::run_fw(*inst.objective, *inst.lmo, inst.x0(), cfg, *rule);
    } else {
      result = fw::run_bpcg(*inst.objective, *inst.lmo, inst.initial_active_set(), cfg, *rule);
    }
    rec.primal = result.primal;
    rec.gap = result.gap;
    rec.solved = result.solved();
    rec.iterations = result.iterations;
    rec.status = fw::to_string(result.status);
    rec.message = result.message;
    rec.step_calls = result.trajectory.size();
    for (const auto& t : result.trajectory) rec.inner_total += t.inner_iters;
    rec.trajectory = std::move(result.trajectory);
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.message = e.what();
  }
  rec.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return rec;
}

RunRecord error_record(const InstanceSpec& spec, const std::string& strategy,
                       const std::string& solver, const std::string& message) {
  RunRecord rec;
  rec.instance = spec;
  rec.strategy = strategy;
  rec.solver = solver;
  rec.status = "error";
  rec.message = message;
  return rec;
}

std::string file_stem(const RunRecord& r) {
  std::ostringstream os;
  os << problems::to_string(r.instance.cls) << "_n" << r.instance.size << "_s" << r.instance.seed
     << "_" << r.strategy;
  return os.str();
}

template <typename T>
T timed_mean(int repeats, double& seconds, const std::function<T()>& fn) {
  T out = fn();
  const auto start = Clock::now();
  for (int i = 0; i < repeats; ++i) out = fn();
  seconds = std::chrono::duration<double>(Clock::now() - start).count() / repeats;
  return out;
}

RootBenchRow compare(const std::string& name, const std::string& family,
                     const rootfind::ScalarFn& phi, const rootfind::ScalarFn& dphi, double tol,
                     int repeats) {
  constexpr double kRho = 1e-5;
  constexpr int kMaxIter = 200;
  RootBenchRow row;
  row.name = name;
  row.family = family;
  const auto sec = timed_mean<rootfind::RootResult>(repeats, row.secant_time_s, [&] {
    return rootfind::solve_secant(phi, 0.0, kRho, tol, kMaxIter);
  });
  const auto nwt = timed_mean<rootfind::RootResult>(repeats, row.newton_time_s, [&] {
    return rootfind::solve_newton(phi, dphi, kRho, tol, kMaxIter);
  });
  row.secant_iters = sec.iterations;
  row.secant_residual = sec.residual;
  row.secant_converged = sec.converged;
  row.newton_iters = nwt.iterations;
  row.newton_residual = nwt.residual;
  row.newton_converged = nwt.converged;
  row.time_ratio = row.secant_time_s > 0.0 ? row.newton_time_s / row.secant_time_s : kNaN;
  return row;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void BenchConfig::validate() const {
  if (classes.empty() || sizes.empty() || seeds.empty()) {
    throw ConfigError("bench config needs at least one class, size and seed");
  }
  if (strategies.empty()) throw ConfigError("bench config needs at least one strategy");
  for (const auto& s : strategies) {
    const auto& names = stepsizes::step_rule_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      throw ConfigError("unknown strategy '" + s + "'");
    }
  }
  if (solver != "fw" && solver != "bpcg") throw ConfigError("solver must be fw or bpcg");
  if (!(gap_tol > 0.0)) throw ConfigError("gap_tol must be positive");
  if (!(time_limit_s > 0.0)) throw ConfigError("time_limit_s must be positive");
  if (workers == 0) throw ConfigError("workers must be at least 1");
}

std::vector<InstanceSpec> BenchConfig::instances() const {
  std::vector<InstanceSpec> out;
  for (auto cls : classes) {
    for (auto size : sizes) {
      for (auto seed : seeds) out.push_back({cls, size, seed});
    }
  }
  return out;
}

BenchConfig bench_config_from_json(const nlohmann::json& j) {
  BenchConfig cfg;
  try {
    if (j.contains("classes")) {
      cfg.classes.clear();
      for (const auto& c : j.at("classes")) {
        cfg.classes.push_back(problems::parse_problem_class(c.get<std::string>()));
      }
    }
    if (j.contains("sizes")) cfg.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("strategies")) cfg.strategies = j.at("strategies").get<std::vector<std::string>>();
    if (j.contains("solver")) cfg.solver = j.at("solver").get<std::string>();
    if (j.contains("gap_tol")) cfg.gap_tol = j.at("gap_tol").get<double>();
    if (j.contains("time_limit_s")) cfg.time_limit_s = j.at("time_limit_s").get<double>();
    if (j.contains("max_iters")) cfg.max_iters = j.at("max_iters").get<std::size_t>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed bench config: ") + e.what());
  }
  return cfg;
}

BenchConfig load_bench_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  try {
    return bench_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

nlohmann::json to_json(const BenchConfig& cfg) {
  nlohmann::json j;
  std::vector<std::string> classes;
  for (auto c : cfg.classes) classes.emplace_back(problems::to_string(c));
  j["classes"] = classes;
  j["sizes"] = cfg.sizes;
  j["seeds"] = cfg.seeds;
  j["strategies"] = cfg.strategies;
  j["solver"] = cfg.solver;
  j["gap_tol"] = cfg.gap_tol;
  j["time_limit_s"] = cfg.time_limit_s;
  j["max_iters"] = cfg.max_iters;
  j["out_dir"] = cfg.out_dir;
  j["workers"] = cfg.workers;
  return j;
}

// ---------------------------------------------------------------------------
// Records and summaries

double RunRecord::mean_inner() const {
  return step_calls == 0 ? kNaN : static_cast<double>(inner_total) / static_cast<double>(step_calls);
}

double geometric_mean(const std::vector<double>& values) {
  if (values.empty()) return kNaN;
  double log_sum = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) return kNaN;
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(values.size()));
}

RunRecord run_single(const InstanceSpec& spec, const std::string& strategy,
                     const std::string& solver, double gap_tol, double time_limit_s,
                     std::size_t max_iters) {
  try {
    const auto inst = problems::generate_instance(spec.cls, spec.size, spec.seed);
    return run_on_instance(inst, strategy, solver, gap_tol, time_limit_s, max_iters);
  } catch (const std::exception& e) {
    return error_record(spec, strategy, solver, e.what());
  }
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::vector<std::pair<problems::ProblemClass, std::string>> order;
  std::map<std::pair<problems::ProblemClass, std::string>, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.instance.cls, r.strategy);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }

  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const auto& group = groups[key];
    SummaryRow row;
    row.cls = key.first;
    row.strategy = key.second;
    row.total = group.size();
    std::vector<double> times, unsolved_gaps;
    double iter_sum = 0.0;
    std::size_t calls = 0;
    long long inner = 0;
    for (const RunRecord* r : group) {
      times.push_back(r->wall_time_s);
      if (r->solved) {
        ++row.solved;
        iter_sum += static_cast<double>(r->iterations);
      } else {
        unsolved_gaps.push_back(r->gap);
      }
      calls += r->step_calls;
      inner += r->inner_total;
    }
    row.geomean_time_s = geometric_mean(times);
    row.geomean_unsolved_gap = geometric_mean(unsolved_gaps);
    if (row.solved > 0) row.mean_iters_solved = iter_sum / static_cast<double>(row.solved);
    if (row.strategy == "secant") {
      row.mean_secant_inner =
          calls == 0 ? kNaN : static_cast<double>(inner) / static_cast<double>(calls);
    }
    rows.push_back(row);
  }
  return rows;
}

BenchResult run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  const auto specs = cfg.instances();
  const std::size_t n_strat = cfg.strategies.size();

  BenchResult out;
  out.records.resize(specs.size() * n_strat);
  std::atomic<std::size_t> next{0};

  // Each task is one instance: generate once, then run every strategy on it.
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      const auto& spec = specs[i];
      std::optional<problems::ProblemInstance> inst;
      std::string failure;
      try {
        inst = problems::generate_instance(spec.cls, spec.size, spec.seed);
      } catch (const std::exception& e) {
        failure = e.what();
      }
      for (std::size_t s = 0; s < n_strat; ++s) {
        out.records[i * n_strat + s] =
            inst ? run_on_instance(*inst, cfg.strategies[s], cfg.solver, cfg.gap_tol,
                                   cfg.time_limit_s, cfg.max_iters)
                 : error_record(spec, cfg.strategies[s], cfg.solver, failure);
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.workers, specs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  out.summary = summarize(out.records);

  if (!cfg.out_dir.empty()) {
    const fs::path dir(cfg.out_dir);
    std::map<std::pair<problems::ProblemClass, std::string>, std::vector<RunRecord>> by_file;
    for (const auto& r : out.records) by_file[{r.instance.cls, r.strategy}].push_back(r);
    for (const auto& [key, recs] : by_file) {
      const fs::path path =
          dir / ("records_" + std::string(problems::to_string(key.first)) + "_" + key.second + ".csv");
      write_records_csv(path, recs);
      out.files.push_back(path);
    }
    write_summary_csv(dir / "summary.csv", out.summary);
    out.files.push_back(dir / "summary.csv");
    std::ofstream cfg_out = open_output(dir / "config.json");
    cfg_out << to_json(cfg).dump(2) << "\n";
    close_output(cfg_out, dir / "config.json");

    auto plots = emit_plot_data(out.records, dir / "plots");
    out.files.insert(out.files.end(), plots.files.begin(), plots.files.end());
    out.warnings = std::move(plots.warnings);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV output

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::scientific << std::setprecision(16) << v;
  return os.str();
}

void write_records_csv(const fs::path& path, const std::vector<RunRecord>& records) {
  std::ofstream out = open_output(path);
  out << "class,size,seed,strategy,solver,primal,gap,solved,iterations,wall_time_s,"
         "mean_inner,step_calls,inner_total,status,known_opt,message\n";
  for (const auto& r : records) {
    out << problems::to_string(r.instance.cls) << ',' << r.instance.size << ',' << r.instance.seed
        << ',' << r.strategy << ',' << r.solver << ',' << format_number(r.primal) << ','
        << format_number(r.gap) << ',' << (r.solved ? 1 : 0) << ',' << r.iterations << ','
        << format_number(r.wall_time_s) << ',' << format_number(r.mean_inner()) << ','
        << r.step_calls << ',' << r.inner_total << ',' << r.status << ','
        << optional_number(r.known_opt) << ',' << csv_field(r.message) << '\n';
  }
  close_output(out, path);
}

void write_summary_csv(const fs::path& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out = open_output(path);
  out << "class,strategy,geomean_time_s,geomean_unsolved_gap,mean_iters_solved,"
         "mean_secant_inner,solved,total\n";
  for (const auto& r : rows) {
    out << problems::to_string(r.cls) << ',' << r.strategy << ',' << format_number(r.geomean_time_s)
        << ',' << format_number(r.geomean_unsolved_gap) << ','
        << format_number(r.mean_iters_solved) << ',' << optional_number(r.mean_secant_inner)
        << ',' << r.solved << ',' << r.total << '\n';
  }
  close_output(out, path);
}

PlotDataReport emit_plot_data(const std::vector<RunRecord>& records, const fs::path& dir) {
  PlotDataReport report;
  if (records.empty()) {
    report.warnings.push_back("no records: no plot data written");
    return report;
  }

  for (const auto& r : records) {
    const fs::path path = dir / ("traj_" + file_stem(r) + ".csv");
    std::ofstream out = open_output(path);
    out << "iteration,primal,gap,gamma,inner_iters,elapsed_s,step_kind\n";
    for (const auto& t : r.trajectory) {
      out << t.t << ',' << format_number(t.primal) << ',' << format_number(t.fw_gap) << ','
          << format_number(t.gamma) << ',' << t.inner_iters << ',' << format_number(t.elapsed_s)
          << ',' << to_string(t.step_kind) << '\n';
    }
    close_output(out, path);
    report.files.push_back(path);
  }

  std::vector<problems::ProblemClass> classes;
  for (const auto& r : records) {
    if (std::find(classes.begin(), classes.end(), r.instance.cls) == classes.end()) {
      classes.push_back(r.instance.cls);
    }
  }
  for (auto cls : classes) {
    std::map<int, long long> histogram;
    for (const auto& r : records) {
      if (r.instance.cls != cls || r.strategy != "secant") continue;
      for (const auto& t : r.trajectory) ++histogram[t.inner_iters];
    }
    if (histogram.empty()) {
      report.warnings.push_back(std::string("no secant runs for class ") + problems::to_string(cls) +
                                ": histogram skipped");
      continue;
    }
    const fs::path path = dir / ("secant_hist_" + std::string(problems::to_string(cls)) + ".csv");
    std::ofstream out = open_output(path);
    out << "inner_iters,count\n";
    for (const auto& [k, count] : histogram) out << k << ',' << count << '\n';
    close_output(out, path);
    report.files.push_back(path);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Root-finding comparison

std::vector<RootBenchRow> rootbench(double tol, int repeats, int instances, std::uint64_t seed) {
  if (!(tol > 0.0)) throw ConfigError("rootbench: tol must be positive");
  if (repeats < 1) throw ConfigError("rootbench: repeats must be at least 1");
  if (instances < 0) throw ConfigError("rootbench: instances must be non-negative");

  struct Scalar {
    const char* name;
    rootfind::ScalarFn f;
    rootfind::ScalarFn df;
  };
  const std::vector<Scalar> scalars = {
      {"x^2 - 2", [](double x) { return x * x - 2.0; }, [](double x) { return 2.0 * x; }},
      {"x^2 - 5", [](double x) { return x * x - 5.0; }, [](double x) { return 2.0 * x; }},
      {"x^2 - 10", [](double x) { return x * x - 10.0; }, [](double x) { return 2.0 * x; }},
      {"x^2 - x - 2", [](double x) { return x * x - x - 2.0; },
       [](double x) { return 2.0 * x - 1.0; }},
      {"x^2 + 2x - 7", [](double x) { return x * x + 2.0 * x - 7.0; },
       [](double x) { return 2.0 * x + 2.0; }},
      {"x^3 - 2", [](double x) { return x * x * x - 2.0; }, [](double x) { return 3.0 * x * x; }},
      {"x e^x - 7", [](double x) { return x * std::exp(x) - 7.0; },
       [](double x) { return (1.0 + x) * std::exp(x); }},
      {"x - cos(x)", [](double x) { return x - std::cos(x); },
       [](double x) { return 1.0 + std::sin(x); }},
  };

  std::vector<RootBenchRow> rows;
  for (const auto& s : scalars) rows.push_back(compare(s.name, "scalar", s.f, s.df, tol, repeats));
  rows.push_back(compare(
      "3 - 2x", "affine", [](double x) { return 3.0 - 2.0 * x; }, [](double) { return -2.0; }, tol,
      repeats));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto unit_sphere = [&](Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    return Vector(v.normalized());
  };

  // Quadratic family: the QuadProb objective along random unit-sphere (x, d).
  constexpr std::size_t kLineSearchDim = 50;
  for (int k = 0; k < instances; ++k) {
    const auto inst = problems::generate_instance(problems::ProblemClass::QuadProb, kLineSearchDim,
                                                  static_cast<std::uint64_t>(k), {std::nullopt, false});
    const Vector x = unit_sphere(kLineSearchDim);
    const Vector d = unit_sphere(kLineSearchDim);
    const linesearch::DirectionalSlope phi(*inst.objective, x, d);
    const double curvature = d.squaredNorm();
    rows.push_back(compare(
        "quadratic #" + std::to_string(k), "quadratic-ls", [&](double g) { return phi(g); },
        [&](double) { return -curvature; }, tol, repeats));
  }

  // Portfolio family: segments from an interior point toward a vertex whose
  // slope changes sign on (0, 1).
  for (int k = 0; k < instances; ++k) {
    const auto inst = problems::generate_instance(problems::ProblemClass::Port, kLineSearchDim,
                                                  static_cast<std::uint64_t>(k));
    const auto& port = static_cast<const problems::LogRevenue&>(*inst.objective);
    Vector x, d;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) throw Error("rootbench: no sign-changing portfolio segment found");
      x = problems::sample_feasible_point(inst, rng);
      const auto vertex = static_cast<Eigen::Index>(rng() % kLineSearchDim);
      d = x - Vector::Unit(static_cast<Eigen::Index>(kLineSearchDim), vertex);
      const linesearch::DirectionalSlope phi(port, x, d);
      if (phi(0.0) > 0.0 && phi(1.0) < 0.0) break;
    }
    const linesearch::DirectionalSlope phi(port, x, d);
    const Eigen::MatrixXd& R = port.returns();
    const Vector rd = R * d;
    rows.push_back(compare(
        "portfolio #" + std::to_string(k), "portfolio-ls", [&](double g) { return phi(g); },
        [&](double g) {
          const Vector rx = R * (x - g * d);
          return -(rd.array() / rx.array()).square().sum();
        },
        tol, repeats));
  }
  return rows;
}

void write_rootbench_csv(const fs::path& path, const std::vector<RootBenchRow>& rows) {
  std::ofstream out = open_output(path);
  out << "name,family,secant_iters,secant_residual,secant_converged,secant_time_s,newton_iters,"
         "newton_residual,newton_converged,newton_time_s,newton_over_secant\n";
  for (const auto& r : rows) {
    out << csv_field(r.name) << ',' << r.family << ',' << r.secant_iters << ','
        << format_number(r.secant_residual) << ',' << (r.secant_converged ? 1 : 0) << ','
        << format_number(r.secant_time_s) << ',' << r.newton_iters << ','
        << format_number(r.newton_residual) << ',' << (r.newton_converged ? 1 : 0) << ','
        << format_number(r.newton_time_s) << ',' << format_number(r.time_ratio) << '\n';
  }
  close_output(out, path);
}

}  // namespace secantfw::bench
