#include <doctest.h>

#include <cmath>
#include <random>

#include "secantfw/rootfind.hpp"

using namespace secantfw;
using namespace secantfw::rootfind;

namespace {

// Plain textbook secant loop, written independently of the library.
std::pair<double, int> reference_secant(double (*f)(double), double a, double b, double tol) {
  double fa = f(a), fb = f(b);
  int it = 0;
  while (std::abs(fb) >= tol && it < 100) {
    const double c = b - fb * (b - a) / (fb - fa);
    a = b;
    fa = fb;
    b = c;
    fb = f(b);
    ++it;
  }
  return {b, it};
}

double square_minus_two(double x) { return x * x - 2.0; }

}  // namespace

TEST_CASE("secant step arithmetic") {
  CHECK(secant_step(1.0, 2.0, -1.0, 2.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  auto affine = [](double x) { return 3.0 * x - 6.0; };
  CHECK(secant_step(0.0, 5.0, affine(0.0), affine(5.0)) == 2.0);
  CHECK(secant_step(-1.0, 0.25, affine(-1.0), affine(0.25)) == 2.0);
  CHECK(secant_step(2.0, 1.0, 2.0, -1.0) == secant_step(1.0, 2.0, -1.0, 2.0));
  CHECK_THROWS_AS(secant_step(0.0, 1.0, 3.0, 3.0), DegenerateSecant);
}

TEST_CASE("secant symmetry on random pairs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 200; ++k) {
    const double x = u(rng), y = u(rng), fx = u(rng), fy = u(rng);
    if (fx == fy) continue;
    CHECK(secant_step(x, y, fx, fy) == doctest::Approx(secant_step(y, x, fy, fx)).epsilon(1e-12));
  }
}

TEST_CASE("secant on x^2 - 2 matches an independent loop") {
  const auto res = solve_secant(square_minus_two, 1.0, 2.0, 1e-12, 50);
  const auto [ref_root, ref_iters] = reference_secant(square_minus_two, 1.0, 2.0, 1e-12);
  CHECK(res.converged);
  CHECK(res.iterations <= 10);
  CHECK(res.iterations == ref_iters);
  CHECK(res.root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(res.root == doctest::Approx(ref_root).epsilon(1e-15));
  CHECK(res.history.size() == static_cast<std::size_t>(res.iterations) + 2);
  CHECK(res.history.front() == 1.0);
  CHECK(res.history[1] == 2.0);
}

TEST_CASE("secant on affine functions takes one step") {
  const auto res = solve_secant([](double x) { return x - 1.0; }, 0.0, 2.0, 1e-12, 10);
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  CHECK(res.root == 1.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 100; ++k) {
    const double a = u(rng), b = u(rng);
    if (std::abs(a) < 1e-3) continue;
    const double x0 = u(rng), x1 = x0 + 0.5 + std::abs(u(rng));
    const auto r = solve_secant([&](double x) { return a * x + b; }, x0, x1, 1e-9, 10);
    CHECK(r.converged);
    CHECK(r.iterations <= 1);
  }
}

TEST_CASE("secant on x e^x - 7") {
  const auto res = solve_secant([](double x) { return x * std::exp(x) - 7.0; }, 1.0, 2.0, 1e-8, 100);
  CHECK(res.converged);
  CHECK(res.residual < 1e-8);
}

TEST_CASE("secant reports degenerate and non-convergent runs") {
  const auto flat = solve_secant([](double) { return 1.0; }, 0.0, 1.0, 1e-8, 10);
  CHECK_FALSE(flat.converged);
  const auto capped = solve_secant([](double x) { return x * x * x - 2.0; }, 1.0, 1.1, 1e-300, 3);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 3);
  const auto seeded = solve_secant([](double x) { return x - 1.0; }, 0.0, 1.0, 1e-12, 10);
  CHECK(seeded.converged);
  CHECK(seeded.iterations == 0);
}

TEST_CASE("newton examples") {
  const auto sq = solve_newton(square_minus_two, [](double x) { return 2.0 * x; }, 2.0, 1e-12, 50);
  CHECK(sq.history.size() == static_cast<std::size_t>(sq.iterations) + 1);
  CHECK(sq.history[1] == 1.5);
  CHECK(sq.converged);
  CHECK(sq.root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  const auto aff = solve_newton([](double x) { return 4.0 * x - 1.0; }, [](double) { return 4.0; },
                                10.0, 1e-12, 10);
  CHECK(aff.iterations == 1);
  CHECK(aff.root == 0.25);

  const auto cosine = solve_newton([](double x) { return x - std::cos(x); },
                                   [](double x) { return 1.0 + std::sin(x); }, 1.0, 1e-8, 50);
  CHECK(cosine.converged);
  CHECK(cosine.residual < 1e-8);

  const auto flat = solve_newton([](double x) { return x * x + 1.0; },
                                 [](double x) { return 2.0 * x; }, 0.0, 1e-8, 10);
  CHECK_FALSE(flat.converged);
}

TEST_CASE("order estimates") {
  const auto cubic = solve_secant([](double x) { return x * x * x - 2.0; }, 1.0, 1.1, 1e-15, 100);
  const double order = estimate_order(cubic.history, std::cbrt(2.0));
  CHECK(order >= 1.4);
  CHECK(order <= 1.8);

  std::vector<double> quad{0.5};
  for (int i = 0; i < 5; ++i) quad.push_back(quad.back() * quad.back());
  CHECK(estimate_order(quad, 0.0) == doctest::Approx(2.0).epsilon(1e-9));

  std::vector<double> geo{1.0};
  for (int i = 0; i < 20; ++i) geo.push_back(0.5 * geo.back());
  CHECK(estimate_order(geo, 0.0) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(estimate_order({1.0, 0.5}, 0.0), Error);
}

TEST_CASE("distance to the root contracts for e^x - 1") {
  const auto res = solve_secant([](double x) { return std::expm1(x); }, 2.0, 1.5, 1e-12, 100);
  REQUIRE(res.converged);
  for (std::size_t i = 0; i + 1 < res.history.size(); ++i) {
    const double q = res.history[i + 1] / res.history[i];
    CHECK(q > 0.0);
    CHECK(q < 1.0);
  }
}

TEST_CASE("double root rate approaches the golden ratio conjugate") {
  const auto res =
      solve_secant([](double x) { return (x - 1.0) * (x - 1.0); }, 2.0, 1.5, 1e-20, 200);
  REQUIRE(res.converged);
  const auto& h = res.history;
  const double lambda = 0.5 * (std::sqrt(5.0) - 1.0);  // lambda^2 + lambda = 1
  CHECK(lambda * lambda + lambda == doctest::Approx(1.0));
  const double ratio = std::abs(h.back() - 1.0) / std::abs(h[h.size() - 2] - 1.0);
  CHECK(std::abs(ratio - lambda) <= 0.05);
}
