#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "secantfw/linesearch.hpp"
#include "secantfw/objectives.hpp"
#include "secantfw/problems.hpp"

using namespace secantfw;
using namespace secantfw::linesearch;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

FunctionObjective shifted_half_norm(Vector b) {
  return FunctionObjective(
      static_cast<std::size_t>(b.size()),
      [b](const Vector& x) { return 0.5 * (x - b).squaredNorm(); },
      [b](const Vector& x) { return Vector(x - b); }, 1.0);
}

FunctionObjective scalar(std::function<double(double)> f, std::function<double(double)> df) {
  return FunctionObjective(
      1, [f](const Vector& x) { return f(x[0]); },
      [df](const Vector& x) { return Vector::Constant(1, df(x[0])); });
}

Vector dirichlet(Eigen::Index n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = e(rng);
  return w / w.sum();
}

// Bisection on a non-increasing slope; independent of the secant code.
double bisect_root(const DirectionalSlope& phi, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("directional slope examples") {
  const auto f = shifted_half_norm(Vector::Zero(2));
  const Vector x = vec({1, 1}), d = vec({1, 1});
  const auto phi = directional_slope(f, x, d);
  CHECK(phi(0.0) == 2.0);
  CHECK(phi(1.0) == 0.0);
  CHECK(phi(0.25) == doctest::Approx(1.5));
  CHECK(phi(0.0) == f.gradient(x).dot(d));

  const auto lg = scalar([](double y) { return -std::log(y); }, [](double y) { return -1.0 / y; });
  const Vector one = vec({1});
  const auto phi_log = directional_slope(lg, one, one);
  CHECK(phi_log(0.5) == doctest::Approx(-2.0));
  CHECK_FALSE(std::isfinite(phi_log(1.0)));
  CHECK_THROWS_AS(directional_slope(lg, one, vec({1, 2})), DimensionError);
}

TEST_CASE("sls examples") {
  SUBCASE("affine slope is solved in one step") {
    const auto f = shifted_half_norm(Vector::Zero(2));
    SlsState st;
    const auto r = sls(f, vec({1, 0}), vec({1, -1}), 1.0, st);
    CHECK(r.gamma == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r.inner_iters == 1);
    CHECK_FALSE(r.clipped);
    CHECK(st.last_gamma == r.gamma);
  }
  SUBCASE("upper clip") {
    const auto f = scalar([](double y) { return 0.5 * (y + 1) * (y + 1); },
                          [](double y) { return y + 1; });
    SlsState st;
    const auto r = sls(f, vec({1}), vec({1}), 1.0, st);
    CHECK(r.gamma == 1.0);
    CHECK(r.clipped);
    CHECK(r.inner_iters <= 1);
  }
  SUBCASE("ascent direction gives zero") {
    const auto f = shifted_half_norm(vec({2, 0}));
    SlsState st;
    st.last_gamma = 0.7;
    const auto r = sls(f, vec({1, 0}), vec({1, 0}), 1.0, st);
    CHECK(r.gamma == 0.0);
    CHECK(r.clipped);
    CHECK(r.inner_iters == 0);
    CHECK(st.last_gamma == 0.0);
  }
  SUBCASE("invalid arguments") {
    const auto f = shifted_half_norm(Vector::Zero(1));
    SlsState st;
    CHECK_THROWS_AS(sls(f, vec({1}), vec({1}), 0.0, st), DomainError);
    st.rho = 0.0;
    CHECK_THROWS_AS(sls(f, vec({1}), vec({1}), 1.0, st), ConfigError);
  }
}

TEST_CASE("sls recovers from domain violations") {
  // f(y) = a y - log y along y = 1 - gamma; minimiser at gamma = 1 - 1/a,
  // with the domain ending at gamma = 1.
  const double a = 1000.0;
  const auto f = scalar([a](double y) { return y > 0 ? a * y - std::log(y) : INFINITY; },
                        [a](double y) { return y > 0 ? a - 1.0 / y : NAN; });
  SlsState st;
  const auto r = sls(f, vec({1}), vec({1}), 1.0, st);
  CHECK(std::isfinite(r.gamma));
  CHECK(r.gamma == doctest::Approx(1.0 - 1.0 / a).epsilon(1e-9));
}

TEST_CASE("sls falls back on degenerate secants") {
  const auto f = FunctionObjective(
      1, [](const Vector& x) { return x[0]; }, [](const Vector&) { return Vector::Constant(1, 1.0); });
  SlsState st;
  const auto r = sls(f, vec({1}), vec({1}), 1.0, st);
  CHECK(r.used_fallback);
  CHECK(r.gamma == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("absolute tolerance overrides the relative one") {
  const auto inst = problems::generate_instance(problems::ProblemClass::Port, 20, 1);
  std::mt19937_64 rng(1);
  const Vector x = problems::sample_feasible_point(inst, rng);
  const Vector d = x - Vector::Unit(20, 3);
  SlsState loose, tight;
  const auto rl = sls(*inst.objective, x, d, 1.0, loose, std::nullopt, 1e-2);
  const auto rt = sls(*inst.objective, x, d, 1.0, tight, std::nullopt, 1e-12);
  if (!rl.clipped) CHECK(rl.residual < 1e-2);
  if (!rt.clipped) CHECK(rt.residual < 1e-12);
  CHECK(rl.inner_iters <= rt.inner_iters);
}

TEST_CASE("golden section examples") {
  const auto bowl = scalar([](double y) { return 0.5 * (y - 0.7) * (y - 0.7); },
                           [](double y) { return y - 0.7; });
  const auto r = golden_section(bowl, vec({1}), vec({1}), 1.0, 1e-6);
  CHECK(std::abs(r.gamma - 0.3) <= 1e-6);
  CHECK(r.inner_iters > 0);

  const auto down = scalar([](double y) { return y; }, [](double) { return 1.0; });
  CHECK(golden_section(down, vec({1}), vec({1}), 1.0, 1e-6).gamma == 1.0);
  CHECK(golden_section(down, vec({1}), vec({1}), 0.4, 1e-6).gamma == 0.4);
  const auto up = scalar([](double y) { return -y; }, [](double) { return -1.0; });
  CHECK(std::abs(golden_section(up, vec({1}), vec({1}), 1.0, 1e-6).gamma) <= 1e-6);
  CHECK_THROWS_AS(golden_section(up, vec({1}), vec({1}), 1.0, 0.0), DomainError);
}

TEST_CASE("exact quadratic step") {
  CHECK(exact_quadratic_step(1.0, 2.0, 1.0) == 0.5);
  CHECK(exact_quadratic_step(3.0, 1.0, 1.0) == 1.0);
  CHECK(exact_quadratic_step(-1.0, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(exact_quadratic_step(1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("quadratic one-shot and line-search contracts on random quadratics") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 19);
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = normal(rng);
    const Eigen::MatrixXd Q = M.transpose() * M / double(n) + 0.05 * Eigen::MatrixXd::Identity(n, n);
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = normal(rng);
    const problems::DenseQuadratic f(Q, b, 1.0);

    const Vector x = dirichlet(n, rng);
    const Vector g = f.gradient(x);
    Eigen::Index v = 0;
    g.minCoeff(&v);
    const Vector d = x - Vector::Unit(n, v);
    const double gdd = g.dot(d);
    if (!(gdd > 0.0)) continue;

    SlsState st;
    if (k % 2) st.last_gamma = unif(rng);
    const auto r = sls(f, x, d, 1.0, st, gdd);
    const double exact = exact_quadratic_step(gdd, d.dot(Q * d), 1.0);
    CHECK(r.inner_iters <= 1);
    if (!r.clipped) {
      CHECK(std::abs(r.gamma - exact) <= 1e-10);
      CHECK(r.residual < std::max(1e-8 * gdd, 1e-12) + kSlopeRoundoff * (g.cwiseAbs().dot(d.cwiseAbs()) + 1.0));
    }
    if (!r.used_fallback && !r.clipped) {
      const double fx = f.value(x);
      CHECK(f.value(x - r.gamma * d) <= fx + 1e-12 * std::max(1.0, std::abs(fx)));
    }

    // A second call on the same segment is answered by the warm start.
    const auto again = sls(f, x, d, 1.0, st, gdd);
    CHECK(again.gamma == r.gamma);
    CHECK(again.inner_iters <= r.inner_iters);
  }
}

TEST_CASE("portfolio line searches approach the root monotonically") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = problems::generate_instance(problems::ProblemClass::Port, 30, seed);
    std::mt19937_64 rng(seed + 100);
    for (int k = 0; k < 20; ++k) {
      const Vector x = problems::sample_feasible_point(inst, rng);
      const Vector d = x - Vector::Unit(30, static_cast<Eigen::Index>(rng() % 30));
      const auto phi = directional_slope(*inst.objective, x, d);
      if (!(phi(0.0) > 0.0) || !(phi(1.0) < 0.0)) continue;
      const double root = bisect_root(phi, 0.0, 1.0);

      SlsState st;
      const auto r = sls(*inst.objective, x, d, 1.0, st);
      REQUIRE_FALSE(r.used_fallback);
      CHECK(std::abs(r.gamma - root) < 1e-6);
      const auto& h = r.history;
      // Both seeds lie below the root; from there the distance shrinks.
      if (h.size() < 3 || phi(h[0]) <= 0.0 || phi(h[1]) <= 0.0) continue;
      for (std::size_t i = 1; i + 1 < h.size(); ++i) {
        const double before = std::abs(h[i] - root), after = std::abs(h[i + 1] - root);
        if (before < 1e-12) break;
        CHECK(after < before);
      }
      ++checked;
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("residual contract and monotone progress on generated problems") {
  using problems::ProblemClass;
  for (auto [cls, size] : std::vector<std::pair<ProblemClass, std::size_t>>{
           {ProblemClass::OD, 20}, {ProblemClass::OA, 20}, {ProblemClass::Port, 20}}) {
    const auto inst = problems::generate_instance(cls, size, 3);
    std::mt19937_64 rng(8);
    for (int k = 0; k < 30; ++k) {
      const Vector x = problems::sample_feasible_point(inst, rng);
      const Vector g = inst.objective->gradient(x);
      const Vector v = inst.lmo->minimize(g);
      const Vector d = x - v;
      SlsState st;
      const auto r = sls(*inst.objective, x, d, 1.0, st);
      if (r.used_fallback || r.clipped) continue;
      const double phi0 = g.dot(d);
      const auto sample = directional_slope(*inst.objective, x, d).sample(r.gamma);
      CHECK(r.residual < std::max(std::max(1e-8 * phi0, 1e-12), kSlopeRoundoff * sample.magnitude));
      const double fx = inst.objective->value(x);
      CHECK(inst.objective->value(x - r.gamma * d) <= fx + 1e-12 * std::max(1.0, std::abs(fx)));
    }
  }
}
