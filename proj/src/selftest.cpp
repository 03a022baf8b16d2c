#include "secantfw/selftest.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "secantfw/bench.hpp"
#include "secantfw/fw.hpp"
#include "secantfw/linesearch.hpp"
#include "secantfw/lmo.hpp"
#include "secantfw/problems.hpp"
#include "secantfw/rootfind.hpp"

namespace secantfw::selftest {
namespace {

using Clock = std::chrono::steady_clock;
using problems::ProblemClass;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

Vector dirichlet(Eigen::Index n, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = expo(rng);
  return w / w.sum();
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

// ---------------------------------------------------------------------------

CriterionResult quadratic_one_shot() {
  constexpr int kProblems = 100;
  constexpr double kStepTol = 1e-10;
  constexpr double kRuntime = 1.0;

  CriterionResult r;
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(2, 20);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  int worst_inner = 0;
  double worst_err = 0.0;
  int clipped = 0;
  for (int k = 0; k < kProblems; ++k) {
    const Eigen::Index n = dim(rng);
    const Eigen::MatrixXd M = gaussian(n, n, rng);
    const Eigen::MatrixXd Q =
        M.transpose() * M / static_cast<double>(n) + 0.05 * Eigen::MatrixXd::Identity(n, n);
    const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q).eigenvalues().maxCoeff();
    // Target near the simplex, so that most exact steps are interior.
    const Vector target = dirichlet(n, rng) + 0.1 * gaussian(n, 1, rng).col(0);
    const problems::DenseQuadratic f(Q, target, L);

    const Vector x = dirichlet(n, rng);
    const Vector g = f.gradient(x);
    Vector d;
    double gamma_max = 1.0;
    if (k % 2 == 0) {
      Eigen::Index v = 0;
      g.minCoeff(&v);
      d = x - Vector::Unit(n, v);
    } else {
      Eigen::Index away = 0, local = 0;
      g.maxCoeff(&away);
      g.minCoeff(&local);
      d = Vector::Unit(n, away) - Vector::Unit(n, local);
      gamma_max = x[away];
    }
    const double gdd = g.dot(d);
    if (!(gdd > 0.0)) continue;

    linesearch::SlsState state;
    if (k % 4 >= 2) state.last_gamma = unif(rng) * gamma_max;
    const auto res = linesearch::sls(f, x, d, gamma_max, state);
    const double exact = linesearch::exact_quadratic_step(gdd, d.dot(Q * d), gamma_max);
    worst_inner = std::max(worst_inner, res.inner_iters);
    worst_err = std::max(worst_err, std::abs(res.gamma - exact));
    if (res.clipped) ++clipped;
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.passed = worst_inner <= 1 && worst_err <= kStepTol && r.seconds < kRuntime;
  r.detail = "max inner " + std::to_string(worst_inner) + ", max |gamma - exact| " + fmt(worst_err) +
             ", clipped " + std::to_string(clipped) + "/" + std::to_string(kProblems);
  return r;
}

CriterionResult secant_order() {
  constexpr double kOrderLo = 1.4, kOrderHi = 1.8;
  constexpr double kRatioTol = 0.05;
  constexpr double kRuntime = 1.0;

  CriterionResult r;
  const auto start = Clock::now();
  const auto cubic =
      rootfind::solve_secant([](double x) { return x * x * x - 2.0; }, 1.0, 1.1, 1e-15, 100);
  const double order = rootfind::estimate_order(cubic.history, std::cbrt(2.0));

  const auto dbl =
      rootfind::solve_secant([](double x) { return (x - 1.0) * (x - 1.0); }, 2.0, 1.5, 1e-20, 200);
  const auto& h = dbl.history;
  const double ratio = std::abs(h[h.size() - 1] - 1.0) / std::abs(h[h.size() - 2] - 1.0);
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);

  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.passed = cubic.converged && order >= kOrderLo && order <= kOrderHi && dbl.converged &&
             std::abs(ratio - golden) <= kRatioTol && r.seconds < kRuntime;
  r.detail = "order " + fmt(order) + " on x^3-2, double-root ratio " + fmt(ratio);
  return r;
}

CriterionResult contraction() {
  constexpr double kRuntime = 1.0;
  CriterionResult r;
  const auto start = Clock::now();
  const auto res =
      rootfind::solve_secant([](double x) { return std::expm1(x); }, 2.0, 1.5, 1e-12, 100);
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < res.history.size(); ++i) {
    const double q = res.history[i + 1] / res.history[i];
    if (!(q > 0.0 && q < 1.0)) monotone = false;
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.passed = res.converged && monotone && r.seconds < kRuntime;
  r.detail = std::to_string(res.iterations) + " iterations, residual " + fmt(res.residual) +
             (monotone ? ", ratios in (0,1)" : ", ratio outside (0,1)");
  return r;
}

CriterionResult fw_budget() {
  constexpr double kEps = 1e-4;
  constexpr std::size_t kHorizon = 2000;
  constexpr double kRuntime = 5.0;

  CriterionResult r;
  const auto start = Clock::now();
  const auto inst = problems::generate_instance(ProblemClass::QuadProb, 50, 0);
  const double L = *inst.known_L;
  const double D2 = 2.0;  // squared diameter of the simplex
  const double fstar = *inst.known_opt;

  fw::SolveConfig cfg;
  cfg.max_iters = kHorizon;
  cfg.gap_tol = 1e-300;
  cfg.tolerance = {fw::ToleranceMode::scheduled, kEps};
  const auto res = fw::run_fw(*inst.objective, *inst.lmo, inst.x0(), cfg);

  // values[t] = f(x_t); after the last recorded step the iterate is final.
  std::vector<double> values;
  for (const auto& rec : res.trajectory) values.push_back(rec.primal);
  values.push_back(res.primal);

  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  for (std::size_t T = 0; T < kHorizon; ++T) {
    const double f_next = values[std::min(T + 1, values.size() - 1)];
    const double bound = 2.0 * L * D2 / (static_cast<double>(T) + 2.0) + kEps / 2.0;
    const double slack = bound - (f_next - fstar);
    worst_slack = std::min(worst_slack, slack);
    if (slack < 0.0) ++violations;
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.passed = violations == 0 && r.seconds < kRuntime;
  r.detail = std::to_string(res.iterations) + " steps, violations " + std::to_string(violations) +
             ", min slack " + fmt(worst_slack);
  return r;
}

// Shared BPCG + secant runs for the solve and inner-iteration criteria.
struct DeskRun {
  ProblemClass cls;
  std::size_t size;
  std::uint64_t seed;
  bool solved;
  double gap;
  double seconds;
  std::optional<double> known_opt;
  double primal;
  std::size_t calls;
  long long inner;
};

const std::vector<DeskRun>& desk_runs() {
  static const std::vector<DeskRun> runs = [] {
    const std::vector<std::pair<ProblemClass, std::size_t>> grid = {
        {ProblemClass::QuadProb, 100}, {ProblemClass::Ill, 100}, {ProblemClass::Birkhoff, 10},
        {ProblemClass::Spec, 20},      {ProblemClass::Port, 50}, {ProblemClass::OD, 100}};
    std::vector<DeskRun> out;
    for (const auto& [cls, size] : grid) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto start = Clock::now();
        const auto inst = problems::generate_instance(cls, size, seed);
        fw::SolveConfig cfg;
        cfg.gap_tol = 1e-7;
        cfg.max_iters = 1000000;
        cfg.time_limit_s = 60.0;
        const auto res = fw::run_bpcg(*inst.objective, *inst.lmo, inst.initial_active_set(), cfg);
        long long inner = 0;
        for (const auto& rec : res.trajectory) inner += rec.inner_iters;
        out.push_back({cls, size, seed, res.solved(), res.gap,
                       std::chrono::duration<double>(Clock::now() - start).count(), inst.known_opt,
                       res.primal, res.trajectory.size(), inner});
      }
    }
    return out;
  }();
  return runs;
}

CriterionResult desk_solves() {
  constexpr double kGapTol = 1e-7;
  constexpr double kTimeLimit = 60.0;
  constexpr double kOptTol = 1e-8;

  CriterionResult r;
  const auto start = Clock::now();
  const auto& runs = desk_runs();
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();

  r.passed = true;
  std::ostringstream failures;
  int checked = 0;
  double worst_time = 0.0;
  double worst_opt = 0.0;
  for (const auto& run : runs) {
    if (run.cls == ProblemClass::OD) continue;
    ++checked;
    worst_time = std::max(worst_time, run.seconds);
    bool ok = run.solved && run.gap <= kGapTol && run.seconds < kTimeLimit;
    if (run.known_opt) {
      const double diff = std::abs(run.primal - *run.known_opt);
      worst_opt = std::max(worst_opt, diff);
      ok = ok && diff <= kOptTol;
    }
    if (!ok) {
      r.passed = false;
      failures << " " << problems::to_string(run.cls) << "/" << run.seed << "(gap " << fmt(run.gap)
               << ")";
    }
  }
  r.detail = std::to_string(checked) + " instances, slowest " + fmt(worst_time) +
             " s, max |f - f*| " + fmt(worst_opt);
  if (!r.passed) r.detail += ", failed:" + failures.str();
  return r;
}

CriterionResult inner_economy() {
  constexpr double kQuadraticBound = 1.5;
  constexpr double kNonQuadraticBound = 4.0;

  CriterionResult r;
  const auto start = Clock::now();
  std::map<ProblemClass, std::pair<std::size_t, long long>> pooled;
  for (const auto& run : desk_runs()) {
    pooled[run.cls].first += run.calls;
    pooled[run.cls].second += run.inner;
  }
  r.passed = true;
  std::ostringstream detail;
  for (const auto& [cls, acc] : pooled) {
    const double mean = acc.first ? static_cast<double>(acc.second) / acc.first : 0.0;
    const bool quadratic = cls != ProblemClass::Port && cls != ProblemClass::OD;
    const double bound = quadratic ? kQuadraticBound : kNonQuadraticBound;
    if (!(acc.first > 0 && mean <= bound)) r.passed = false;
    detail << problems::to_string(cls) << " " << fmt(mean) << " ";
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.detail = "mean inner: " + detail.str();
  return r;
}

CriterionResult lmo_equivalence() {
  constexpr int kGradients = 50;
  constexpr int kMatrices = 20;
  constexpr double kSpectralTol = 1e-8;
  constexpr double kRuntime = 5.0;

  CriterionResult r;
  const auto start = Clock::now();
  std::mt19937_64 rng(707);
  int assignment_mismatch = 0;
  for (int n = 1; n <= 6; ++n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int k = 0; k < kGradients; ++k) {
      const RowMajorMatrix G = gaussian(n, n, rng);
      const RowMajorMatrix P = lmo::lmo_birkhoff(G);
      auto cost_of = [&](const std::vector<int>& p) {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += G(i, p[static_cast<std::size_t>(i)]);
        return c;
      };
      std::vector<int> chosen(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) P.row(i).maxCoeff(&chosen[static_cast<std::size_t>(i)]);
      std::iota(perm.begin(), perm.end(), 0);
      double best = std::numeric_limits<double>::infinity();
      do {
        best = std::min(best, cost_of(perm));
      } while (std::next_permutation(perm.begin(), perm.end()));
      if (cost_of(chosen) != best) ++assignment_mismatch;
    }
  }

  double spectral_err = 0.0;
  double nuclear_err = 0.0;
  for (int k = 0; k < kMatrices; ++k) {
    const RowMajorMatrix G = gaussian(20, 20, rng);
    const RowMajorMatrix S = 0.5 * (G + G.transpose());
    const double lam_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues()[0];
    const double spec_val = (lmo::lmo_spectraplex(G).array() * G.array()).sum();
    spectral_err = std::max(spectral_err, std::abs(spec_val - lam_min));

    const double radius = 3.0;
    const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(G).singularValues()[0];
    const double nuc_val = (lmo::lmo_nuclear(G, radius).array() * G.array()).sum();
    nuclear_err = std::max(nuclear_err, std::abs(nuc_val + radius * sigma));
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.passed = assignment_mismatch == 0 && spectral_err <= kSpectralTol &&
             nuclear_err <= kSpectralTol && r.seconds < kRuntime;
  r.detail = "assignment mismatches " + std::to_string(assignment_mismatch) +
             ", spectraplex err " + fmt(spectral_err) + ", nuclear err " + fmt(nuclear_err);
  return r;
}

CriterionResult rootbench_harness() {
  constexpr double kTol = 1e-8;
  CriterionResult r;
  const auto start = Clock::now();
  const auto rows = bench::rootbench(kTol, 3, 5, 0);
  r.passed = true;
  int scalar = 0, quadratic = 0, portfolio = 0;
  std::ostringstream failures;
  for (const auto& row : rows) {
    bool ok = row.secant_converged && row.newton_converged && row.secant_residual < kTol &&
              row.newton_residual < kTol;
    if (row.family == "affine" || row.family == "quadratic-ls") ok = ok && row.secant_iters <= 1;
    if (row.family == "scalar") ++scalar;
    if (row.family == "quadratic-ls") ++quadratic;
    if (row.family == "portfolio-ls") ++portfolio;
    if (!ok) {
      r.passed = false;
      failures << " " << row.name;
    }
  }
  r.passed = r.passed && scalar == 8 && quadratic > 0 && portfolio > 0;
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.detail = std::to_string(rows.size()) + " rows";
  if (!r.passed) r.detail += ", failed:" + failures.str();
  return r;
}

CriterionResult gradient_checks() {
  constexpr int kPoints = 20;
  constexpr double kRelTol = 1e-5;
  constexpr double kStep = 1e-6;
  constexpr double kRuntime = 10.0;

  CriterionResult r;
  const auto start = Clock::now();
  const std::vector<std::pair<ProblemClass, std::size_t>> grid = {
      {ProblemClass::QuadProb, 100}, {ProblemClass::Ill, 100}, {ProblemClass::Birkhoff, 10},
      {ProblemClass::Nuclear, 20},   {ProblemClass::Spec, 20}, {ProblemClass::OD, 100},
      {ProblemClass::OA, 100},       {ProblemClass::Port, 50}};
  std::mt19937_64 rng(909);
  r.passed = true;
  std::ostringstream detail;
  for (const auto& [cls, size] : grid) {
    const auto inst = problems::generate_instance(cls, size, 0, {std::nullopt, false});
    double worst = 0.0;
    for (int p = 0; p < kPoints; ++p) {
      const Vector x = problems::sample_feasible_point(inst, rng);
      const Vector fd = finite_difference_gradient(*inst.objective, x, kStep);
      worst = std::max(worst, relative_error(inst.objective->gradient(x), fd));
    }
    if (!(worst <= kRelTol)) r.passed = false;
    detail << problems::to_string(cls) << " " << fmt(worst) << " ";
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.passed = r.passed && r.seconds < kRuntime;
  r.detail = "max rel err: " + detail.str();
  return r;
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "quadratic one-shot line search", quadratic_one_shot},
      {2, "secant convergence order", secant_order},
      {3, "secant contraction toward the root", contraction},
      {4, "FW budget with scheduled tolerances", fw_budget},
      {5, "desk-scale BPCG + secant solves", desk_solves},
      {6, "secant inner-iteration economy", inner_economy},
      {7, "LMO oracle equivalence", lmo_equivalence},
      {8, "root-finding comparison harness", rootbench_harness},
      {9, "finite-difference gradient checks", gradient_checks},
  };
  return list;
}

CriterionResult run_criterion(const Criterion& c) {
  CriterionResult r;
  try {
    r = c.run();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.id = c.id;
  r.title = c.title;
  return r;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << ": " << r.detail << " ("
     << std::fixed << std::setprecision(3) << r.seconds << " s)";
  return os.str();
}

}  // namespace secantfw::selftest
