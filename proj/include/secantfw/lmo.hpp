#pragma once

// Linear minimization oracles: v = argmin_{v in X} <g, v> over the probability
// simplex, the Birkhoff polytope, the spectraplex and the nuclear-norm ball.
// Matrix-valued sets exchange their iterates as flattened row-major vectors.

#include <functional>
#include <string>
#include <vector>

#include "secantfw/core.hpp"

namespace secantfw::lmo {

class LinearMinimizationOracle {
 public:
  virtual ~LinearMinimizationOracle() = default;
  virtual std::size_t dimension() const = 0;
  virtual Vector minimize(const Vector& g) const = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Free-standing oracles.

/// Vertex e_i with i the lowest index attaining min g_i.
Vector lmo_simplex(const Vector& g);

struct Assignment {
  std::vector<int> col_of_row;
  double cost = 0.0;
};

/// Minimum-cost perfect assignment (Hungarian method with dual potentials).
Assignment solve_assignment(const RowMajorMatrix& cost);

/// Permutation matrix minimising <G, P>.
RowMajorMatrix lmo_birkhoff(const RowMajorMatrix& G);

/// u u^T with u a unit eigenvector for the smallest eigenvalue of (G + G^T)/2.
RowMajorMatrix lmo_spectraplex(const RowMajorMatrix& G);

/// -radius u v^T for the top singular pair (u, v) of G.
RowMajorMatrix lmo_nuclear(const RowMajorMatrix& G, double radius);

// ---------------------------------------------------------------------------
// Extreme eigenpairs for the spectral oracles.

struct EigenPair {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
};

enum class Extreme { smallest, largest };

/**
 * Lanczos iteration with full reorthogonalisation for a symmetric operator
 * given through its matrix-vector product. Starts from a fixed-seed Gaussian
 * vector, so results are reproducible. Stops when the Ritz residual
 * ||A y - theta y|| drops below tol * max(1, scale) or the Krylov space is
 * exhausted; throws OracleError if neither happens within max_iter steps.
 */
EigenPair extreme_eigenpair(const std::function<Vector(const Vector&)>& matvec, std::size_t n,
                            Extreme which, double scale, double tol = 1e-9, int max_iter = 1000);

// ---------------------------------------------------------------------------
// Oracle objects.

class SimplexLmo final : public LinearMinimizationOracle {
 public:
  explicit SimplexLmo(std::size_t n);
  std::size_t dimension() const override { return n_; }
  Vector minimize(const Vector& g) const override;
  std::string name() const override { return "simplex"; }

 private:
  std::size_t n_;
};

class BirkhoffLmo final : public LinearMinimizationOracle {
 public:
  explicit BirkhoffLmo(std::size_t n);
  std::size_t dimension() const override { return n_ * n_; }
  Vector minimize(const Vector& g) const override;
  std::string name() const override { return "birkhoff"; }
  std::size_t side() const { return n_; }

 private:
  std::size_t n_;
};

class SpectraplexLmo final : public LinearMinimizationOracle {
 public:
  explicit SpectraplexLmo(std::size_t n);
  std::size_t dimension() const override { return n_ * n_; }
  Vector minimize(const Vector& g) const override;
  std::string name() const override { return "spectraplex"; }
  std::size_t side() const { return n_; }

 private:
  std::size_t n_;
};

class NuclearBallLmo final : public LinearMinimizationOracle {
 public:
  NuclearBallLmo(Shape shape, double radius);
  std::size_t dimension() const override { return shape_.size(); }
  Vector minimize(const Vector& g) const override;
  std::string name() const override { return "nuclear"; }
  Shape shape() const { return shape_; }
  double radius() const { return radius_; }

 private:
  Shape shape_;
  double radius_;
};

}  // namespace secantfw::lmo
