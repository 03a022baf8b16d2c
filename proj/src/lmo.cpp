#include "secantfw/lmo.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

namespace secantfw::lmo {
namespace {

constexpr std::uint64_t kStartSeed = 0x5eedu;
constexpr Eigen::Index kMinLanczosSteps = 32;

Vector flatten(const RowMajorMatrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

RowMajorMatrix unflatten(const Vector& flat, Shape shape) { return as_matrix(flat, shape); }

void require_finite(const Vector& g, const char* who) {
  if (!g.allFinite()) throw DomainError(std::string(who) + ": gradient is not finite");
}

// Gershgorin bound on the spectral radius of a square matrix.
double gershgorin(const RowMajorMatrix& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

Vector lmo_simplex(const Vector& g) {
  if (g.size() == 0) throw DimensionError("lmo_simplex: empty gradient");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < g.size(); ++i) {
    if (g[i] < g[best]) best = i;
  }
  Vector v = Vector::Zero(g.size());
  v[best] = 1.0;
  return v;
}

Assignment solve_assignment(const RowMajorMatrix& cost) {
  if (cost.rows() != cost.cols()) throw DimensionError("solve_assignment: cost must be square");
  const int n = static_cast<int>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();

  // 1-based shortest augmenting path formulation; u, v are the row and
  // column potentials, p[j] the row matched to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.col_of_row.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.col_of_row[p[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) out.cost += cost(i, out.col_of_row[i]);
  return out;
}

RowMajorMatrix lmo_birkhoff(const RowMajorMatrix& G) {
  if (G.rows() != G.cols()) throw DimensionError("lmo_birkhoff: gradient must be square");
  if (!G.allFinite()) throw DomainError("lmo_birkhoff: gradient is not finite");
  const Assignment a = solve_assignment(G);
  RowMajorMatrix P = RowMajorMatrix::Zero(G.rows(), G.cols());
  for (Eigen::Index i = 0; i < G.rows(); ++i) P(i, a.col_of_row[i]) = 1.0;
  return P;
}

EigenPair extreme_eigenpair(const std::function<Vector(const Vector&)>& matvec, std::size_t n,
                            Extreme which, double scale, double tol, int max_iter) {
  if (n == 0) throw DimensionError("extreme_eigenpair: empty operator");
  const Eigen::Index N = static_cast<Eigen::Index>(n);
  const double threshold = tol * std::max(1.0, scale);

  std::mt19937_64 rng(kStartSeed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector q(N);
  for (Eigen::Index i = 0; i < N; ++i) q[i] = normal(rng);
  q.normalize();

  const int steps = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(max_iter)));
  Eigen::MatrixXd Q(N, steps);
  std::vector<double> alpha, beta;
  Q.col(0) = q;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  EigenPair out;
  for (int k = 0; k < steps; ++k) {
    Vector w = matvec(Q.col(k));
    const double a = Q.col(k).dot(w);
    alpha.push_back(a);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      const Vector coeff = Q.leftCols(k + 1).transpose() * w;
      w.noalias() -= Q.leftCols(k + 1) * coeff;
    }
    double b = w.norm();
    const int m = k + 1;
    // An invariant subspace was found early: continue from a fresh random
    // direction so eigenvalues outside it are not missed.
    const bool restart = b <= 1e-14 * std::max(1.0, scale) && m < N;
    if (restart) {
      for (Eigen::Index i = 0; i < N; ++i) w[i] = normal(rng);
      for (int pass = 0; pass < 2; ++pass) {
        const Vector coeff = Q.leftCols(m).transpose() * w;
        w.noalias() -= Q.leftCols(m) * coeff;
      }
      w.normalize();
    }
    const double b_tri = restart ? 0.0 : b;

    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max(m - 1, 0));
    for (int i = 0; i + 1 < m; ++i) sub[i] = beta[i];
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::Index pick = which == Extreme::smallest ? 0 : m - 1;
    const double theta = tri.eigenvalues()[pick];
    const double residual = b_tri * std::abs(tri.eigenvectors()(m - 1, pick));

    // Early Ritz values can sit on the second eigenvalue while the extreme
    // one is still invisible, so small operators run to the full basis.
    const bool settled = m >= std::min<Eigen::Index>(N, kMinLanczosSteps) && residual <= threshold;
    if (settled || m == N) {
      Vector y = Q.leftCols(m) * tri.eigenvectors().col(pick);
      y.normalize();
      out.vector = std::move(y);
      out.value = theta;
      out.iterations = m;
      return out;
    }
    beta.push_back(b_tri);
    if (k + 1 < steps) Q.col(k + 1) = restart ? w : Vector(w / b);
  }
  throw OracleError("extreme_eigenpair: no convergence within the iteration cap");
}

RowMajorMatrix lmo_spectraplex(const RowMajorMatrix& G) {
  if (G.rows() != G.cols()) throw DimensionError("lmo_spectraplex: gradient must be square");
  if (!G.allFinite()) throw DomainError("lmo_spectraplex: gradient is not finite");
  const RowMajorMatrix S = 0.5 * (G + G.transpose());
  const auto pair = extreme_eigenpair([&](const Vector& v) -> Vector { return S * v; },
                                      static_cast<std::size_t>(S.rows()), Extreme::smallest,
                                      gershgorin(S));
  return pair.vector * pair.vector.transpose();
}

RowMajorMatrix lmo_nuclear(const RowMajorMatrix& G, double radius) {
  if (!(radius > 0.0)) throw DomainError("lmo_nuclear: radius must be positive");
  if (!G.allFinite()) throw DomainError("lmo_nuclear: gradient is not finite");
  const Eigen::Index rows = G.rows();
  const Eigen::Index cols = G.cols();
  const double scale = gershgorin(G) * G.cwiseAbs().colwise().sum().maxCoeff();
  const auto pair = extreme_eigenpair(
      [&](const Vector& v) -> Vector { return G.transpose() * (G * v); },
      static_cast<std::size_t>(cols), Extreme::largest, scale);

  const Vector& right = pair.vector;
  Vector left = G * right;
  const double sigma = left.norm();
  if (sigma > 0.0) {
    left /= sigma;
  } else {
    left = Vector::Unit(rows, 0);
  }
  return -radius * left * right.transpose();
}

// ---------------------------------------------------------------------------

SimplexLmo::SimplexLmo(std::size_t n) : n_(n) {
  if (n == 0) throw DimensionError("SimplexLmo: dimension must be positive");
}

Vector SimplexLmo::minimize(const Vector& g) const {
  if (static_cast<std::size_t>(g.size()) != n_) throw DimensionError("SimplexLmo: wrong size");
  require_finite(g, "SimplexLmo");
  return lmo_simplex(g);
}

BirkhoffLmo::BirkhoffLmo(std::size_t n) : n_(n) {
  if (n == 0) throw DimensionError("BirkhoffLmo: dimension must be positive");
}

Vector BirkhoffLmo::minimize(const Vector& g) const {
  if (static_cast<std::size_t>(g.size()) != n_ * n_) throw DimensionError("BirkhoffLmo: wrong size");
  return flatten(lmo_birkhoff(unflatten(g, {n_, n_})));
}

SpectraplexLmo::SpectraplexLmo(std::size_t n) : n_(n) {
  if (n == 0) throw DimensionError("SpectraplexLmo: dimension must be positive");
}

Vector SpectraplexLmo::minimize(const Vector& g) const {
  if (static_cast<std::size_t>(g.size()) != n_ * n_) {
    throw DimensionError("SpectraplexLmo: wrong size");
  }
  return flatten(lmo_spectraplex(unflatten(g, {n_, n_})));
}

NuclearBallLmo::NuclearBallLmo(Shape shape, double radius) : shape_(shape), radius_(radius) {
  if (shape.size() == 0) throw DimensionError("NuclearBallLmo: empty shape");
  if (!(radius > 0.0)) throw ConfigError("NuclearBallLmo: radius must be positive");
}

Vector NuclearBallLmo::minimize(const Vector& g) const {
  if (static_cast<std::size_t>(g.size()) != shape_.size()) {
    throw DimensionError("NuclearBallLmo: wrong size");
  }
  return flatten(lmo_nuclear(unflatten(g, shape_), radius_));
}

}  // namespace secantfw::lmo
