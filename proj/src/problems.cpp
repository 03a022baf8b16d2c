#include "secantfw/problems.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace secantfw::problems {
namespace {

constexpr std::size_t kMaxDimension = 10000;

std::mt19937_64 instance_rng(ProblemClass cls, std::size_t size, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cls), static_cast<std::uint32_t>(size)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

Vector uniform_vector(Eigen::Index n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = unif(rng);
  return v;
}

Vector dirichlet(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Vector w(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = expo(rng);
  return w / w.sum();
}

Vector flatten(const RowMajorMatrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

// Exactly round(fraction * count) distinct indices from [0, count), sorted.
std::vector<std::size_t> sample_indices(std::size_t count, double fraction, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(count))));
  idx.resize(std::min(keep, count));
  std::sort(idx.begin(), idx.end());
  return idx;
}

void require_size(bool ok, ProblemClass cls, std::size_t size) {
  if (!ok) {
    throw ConfigError(std::string("unsupported size ") + std::to_string(size) + " for class " +
                      to_string(cls));
  }
}

void set_single_start(ProblemInstance& inst, Vector atom) {
  inst.initial_atoms = {std::move(atom)};
  inst.initial_weights = {1.0};
}

// Start for matrix sets: the oracle's answer to a fixed seeded gradient.
void set_lmo_start(ProblemInstance& inst, std::mt19937_64& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(static_cast<Eigen::Index>(inst.dimension()), 1, rng);
  set_single_start(inst, inst.lmo->minimize(g.col(0)));
}

void build_quadprob(ProblemInstance& inst, std::mt19937_64& rng, const GeneratorOptions& opt) {
  const auto n = static_cast<Eigen::Index>(inst.size);
  Vector target = uniform_vector(n, 0.0, 2.0, rng);
  if (opt.quadprob_target) {
    if (opt.quadprob_target->size() != n) throw DimensionError("quadprob target has wrong size");
    target = *opt.quadprob_target;
  }
  inst.objective = std::make_shared<SquaredDistance>(target);
  inst.lmo = std::make_shared<lmo::SimplexLmo>(inst.size);
  inst.known_L = 1.0;
  set_single_start(inst, Vector::Unit(n, 0));
  if (opt.compute_known_opt) {
    const auto ref = projected_gradient_solve(*inst.objective, project_simplex, *inst.lmo,
                                              inst.x0(), 1.0, 1e-10, 1000);
    inst.known_opt = ref.value;
  }
}

void build_ill(ProblemInstance& inst, std::mt19937_64& rng, const GeneratorOptions& opt) {
  const auto n = static_cast<Eigen::Index>(inst.size);
  const Eigen::MatrixXd U = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian_matrix(n, n, rng))
                                .householderQ();
  Vector spectrum(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    spectrum[i] = std::pow(kIllCondition, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  Eigen::MatrixXd Q = U.transpose() * spectrum.asDiagonal() * U;
  Q = 0.5 * (Q + Q.transpose()).eval();
  const Vector target = uniform_vector(n, 0.0, 2.0, rng);
  inst.objective = std::make_shared<DenseQuadratic>(Q, target, kIllCondition);
  inst.lmo = std::make_shared<lmo::SimplexLmo>(inst.size);
  inst.known_L = kIllCondition;
  set_single_start(inst, Vector::Unit(n, 0));
  if (opt.compute_known_opt) {
    const auto ref = projected_gradient_solve(*inst.objective, project_simplex, *inst.lmo,
                                              inst.x0(), kIllCondition, 1e-10, 2000000);
    inst.known_opt = ref.value;
  }
}

void build_birkhoff(ProblemInstance& inst, std::mt19937_64& rng, const GeneratorOptions& opt) {
  const std::size_t n = inst.size;
  const auto N = static_cast<Eigen::Index>(n);
  // Doubly stochastic centre: a Dirichlet mixture of n random permutations.
  RowMajorMatrix M = RowMajorMatrix::Zero(N, N);
  const Vector mix = dirichlet(n, rng);
  std::vector<int> perm(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Eigen::Index i = 0; i < N; ++i) M(i, perm[static_cast<std::size_t>(i)]) += mix[static_cast<Eigen::Index>(k)];
  }
  std::normal_distribution<double> noise(0.0, 0.1);
  for (Eigen::Index i = 0; i < M.size(); ++i) {
    M.data()[i] = std::clamp(M.data()[i] + noise(rng), 0.0, 1.0);
  }
  inst.objective = std::make_shared<SquaredDistance>(flatten(M));
  inst.lmo = std::make_shared<lmo::BirkhoffLmo>(n);
  inst.known_L = 1.0;
  set_lmo_start(inst, rng);
  if (opt.compute_known_opt) {
    const auto proj = [n](const Vector& y) { return project_birkhoff(y, n); };
    const auto ref =
        projected_gradient_solve(*inst.objective, proj, *inst.lmo, inst.x0(), 1.0, 1e-10, 1000);
    inst.known_opt = ref.value;
  }
}

void build_spec(ProblemInstance& inst, std::mt19937_64& rng) {
  const std::size_t n = inst.size;
  const auto N = static_cast<Eigen::Index>(n);
  // Unit-norm factors with decaying strengths. The target trace exceeds the
  // unit trace of the feasible set, which keeps the constrained optimum low rank.
  Eigen::MatrixXd B = gaussian_matrix(N, 3, rng);
  B.colwise().normalize();
  const Eigen::Vector3d strength(kSpecStrength, 0.3 * kSpecStrength, 0.1 * kSpecStrength);
  const RowMajorMatrix A = B * strength.asDiagonal() * B.transpose();

  // Symmetric observation pattern: 30% of the upper triangle, mirrored.
  const std::size_t pairs = n * (n + 1) / 2;
  std::vector<std::pair<std::size_t, std::size_t>> upper;
  upper.reserve(pairs);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) upper.emplace_back(i, j);
  }
  std::vector<std::size_t> observed;
  for (std::size_t k : sample_indices(pairs, 0.3, rng)) {
    const auto [i, j] = upper[k];
    observed.push_back(i * n + j);
    if (i != j) observed.push_back(j * n + i);
  }
  std::sort(observed.begin(), observed.end());

  inst.objective = std::make_shared<MaskedLeastSquares>(inst.shape, flatten(A), observed);
  inst.lmo = std::make_shared<lmo::SpectraplexLmo>(n);
  inst.known_L = 1.0;
  set_lmo_start(inst, rng);
}

void build_nuclear(ProblemInstance& inst, std::mt19937_64& rng) {
  const auto N = static_cast<Eigen::Index>(inst.size);
  const Eigen::MatrixXd B = gaussian_matrix(N, 3, rng);
  const Eigen::MatrixXd C = gaussian_matrix(N, 3, rng);
  const RowMajorMatrix A = B * C.transpose();
  const double nuclear = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues().sum();
  const auto observed = sample_indices(inst.shape.size(), 0.3, rng);

  inst.objective = std::make_shared<MaskedLeastSquares>(inst.shape, flatten(A), observed);
  inst.lmo = std::make_shared<lmo::NuclearBallLmo>(inst.shape, 2.0 * nuclear);
  inst.known_L = 1.0;
  set_lmo_start(inst, rng);
}

void build_oed(ProblemInstance& inst, std::mt19937_64& rng, DesignCriterion criterion) {
  const std::size_t m = inst.size;
  const std::size_t k = (m + 3) / 4;
  const Eigen::MatrixXd A =
      gaussian_matrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k), rng);
  inst.objective = std::make_shared<OptimalDesign>(A, criterion);
  inst.lmo = std::make_shared<lmo::SimplexLmo>(m);
  // Single vertices give singular information matrices; start from the
  // uniform design over all vertices.
  inst.initial_atoms.clear();
  for (std::size_t i = 0; i < m; ++i) {
    inst.initial_atoms.push_back(Vector::Unit(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)));
  }
  inst.initial_weights.assign(m, 1.0 / static_cast<double>(m));
}

void build_port(ProblemInstance& inst, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(inst.size);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Eigen::MatrixXd R(2 * n, n);
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    for (Eigen::Index j = 0; j < n; ++j) R(i, j) = unif(rng);
  }
  inst.objective = std::make_shared<LogRevenue>(R);
  inst.lmo = std::make_shared<lmo::SimplexLmo>(inst.size);
  set_single_start(inst, Vector::Unit(n, 0));
}

}  // namespace

const std::vector<ProblemClass>& all_problem_classes() {
  static const std::vector<ProblemClass> classes = {
      ProblemClass::QuadProb, ProblemClass::Ill, ProblemClass::Birkhoff, ProblemClass::Nuclear,
      ProblemClass::Spec,     ProblemClass::OD,  ProblemClass::OA,       ProblemClass::Port};
  return classes;
}

const char* to_string(ProblemClass cls) {
  switch (cls) {
    case ProblemClass::QuadProb:
      return "QuadProb";
    case ProblemClass::Ill:
      return "Ill";
    case ProblemClass::Birkhoff:
      return "Birkhoff";
    case ProblemClass::Nuclear:
      return "Nuclear";
    case ProblemClass::Spec:
      return "Spec";
    case ProblemClass::OD:
      return "OD";
    case ProblemClass::OA:
      return "OA";
    case ProblemClass::Port:
      return "Port";
  }
  return "unknown";
}

ProblemClass parse_problem_class(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  const std::string key = lower(name);
  for (ProblemClass cls : all_problem_classes()) {
    if (lower(to_string(cls)) == key) return cls;
  }
  throw ConfigError("unknown problem class '" + std::string(name) + "'");
}

Vector ProblemInstance::x0() const { return initial_active_set().x(); }

fw::ActiveSet ProblemInstance::initial_active_set() const {
  return fw::ActiveSet(initial_atoms, initial_weights);
}

ProblemInstance generate_instance(ProblemClass cls, std::size_t size, std::uint64_t seed,
                                  const GeneratorOptions& options) {
  ProblemInstance inst;
  inst.cls = cls;
  inst.size = size;
  inst.seed = seed;
  auto rng = instance_rng(cls, size, seed);

  switch (cls) {
    case ProblemClass::QuadProb:
      require_size(size >= 1 && size <= kMaxDimension, cls, size);
      inst.shape = {size, 1};
      build_quadprob(inst, rng, options);
      break;
    case ProblemClass::Ill:
      require_size(size >= 2 && size <= 1000, cls, size);
      inst.shape = {size, 1};
      build_ill(inst, rng, options);
      break;
    case ProblemClass::Birkhoff:
      require_size(size >= 2 && size * size <= kMaxDimension, cls, size);
      inst.shape = {size, size};
      build_birkhoff(inst, rng, options);
      break;
    case ProblemClass::Nuclear:
      require_size(size >= 2 && size * size <= kMaxDimension, cls, size);
      inst.shape = {size, size};
      build_nuclear(inst, rng);
      break;
    case ProblemClass::Spec:
      require_size(size >= 2 && size * size <= kMaxDimension, cls, size);
      inst.shape = {size, size};
      build_spec(inst, rng);
      break;
    case ProblemClass::OD:
    case ProblemClass::OA:
      require_size(size >= 4 && size <= 2000, cls, size);
      inst.shape = {size, 1};
      build_oed(inst, rng, cls == ProblemClass::OD ? DesignCriterion::D : DesignCriterion::A);
      break;
    case ProblemClass::Port:
      require_size(size >= 1 && size <= 2000, cls, size);
      inst.shape = {size, 1};
      build_port(inst, rng);
      break;
  }
  return inst;
}

Vector sample_feasible_point(const ProblemInstance& instance, std::mt19937_64& rng) {
  const std::size_t n = instance.size;
  const auto N = static_cast<Eigen::Index>(n);
  switch (instance.cls) {
    case ProblemClass::QuadProb:
    case ProblemClass::Ill:
    case ProblemClass::OD:
    case ProblemClass::OA:
    case ProblemClass::Port:
      return dirichlet(n, rng);
    case ProblemClass::Birkhoff: {
      const Vector mix = dirichlet(n + 1, rng);
      Vector x = Vector::Constant(N * N, mix[N] / static_cast<double>(n));  // uniform matrix
      std::vector<int> perm(n);
      for (std::size_t k = 0; k < n; ++k) {
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < n; ++i) {
          x[static_cast<Eigen::Index>(i * n + static_cast<std::size_t>(perm[i]))] +=
              mix[static_cast<Eigen::Index>(k)];
        }
      }
      return x;
    }
    case ProblemClass::Spec: {
      const Vector mix = dirichlet(n, rng);
      RowMajorMatrix X = RowMajorMatrix::Zero(N, N);
      for (std::size_t k = 0; k < n; ++k) {
        const Vector u = gaussian_matrix(N, 1, rng).col(0).normalized();
        X += mix[static_cast<Eigen::Index>(k)] * u * u.transpose();
      }
      return flatten(X);
    }
    case ProblemClass::Nuclear: {
      const auto& ball = static_cast<const lmo::NuclearBallLmo&>(*instance.lmo);
      const Vector mix = 0.5 * dirichlet(n, rng);
      RowMajorMatrix X = RowMajorMatrix::Zero(N, N);
      for (std::size_t k = 0; k < n; ++k) {
        const Vector u = gaussian_matrix(N, 1, rng).col(0).normalized();
        const Vector v = gaussian_matrix(N, 1, rng).col(0).normalized();
        X += ball.radius() * mix[static_cast<Eigen::Index>(k)] * u * v.transpose();
      }
      return flatten(X);
    }
  }
  throw ConfigError("sample_feasible_point: unknown class");
}

Vector project_simplex(const Vector& y) {
  const Eigen::Index n = y.size();
  std::vector<double> sorted(y.data(), y.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumsum += sorted[static_cast<std::size_t>(k)];
    const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) theta = candidate;
  }
  return (y.array() - theta).max(0.0).matrix();
}

Vector project_birkhoff(const Vector& y, std::size_t n, double tol, int max_iter) {
  const auto N = static_cast<Eigen::Index>(n);
  if (y.size() != N * N) throw DimensionError("project_birkhoff: wrong size");
  const double nn = static_cast<double>(n);

  // Affine part {X 1 = 1, X^T 1 = 1}: closed-form orthogonal projection.
  auto project_affine = [&](const RowMajorMatrix& X) {
    const Vector r = X.rowwise().sum().array() - 1.0;
    const Vector c = X.colwise().sum().transpose().array() - 1.0;
    const double s = X.sum() - nn;
    RowMajorMatrix P = X;
    P.colwise() -= r / nn;
    P.rowwise() -= (c / nn).transpose();
    P.array() += s / (nn * nn);
    return P;
  };

  RowMajorMatrix X = as_matrix(y, {n, n});
  RowMajorMatrix corr_affine = RowMajorMatrix::Zero(N, N);
  RowMajorMatrix corr_pos = RowMajorMatrix::Zero(N, N);
  for (int it = 0; it < max_iter; ++it) {
    const RowMajorMatrix Z = project_affine(X + corr_affine);
    corr_affine = X + corr_affine - Z;
    const RowMajorMatrix next = (Z + corr_pos).cwiseMax(0.0);
    corr_pos = Z + corr_pos - next;
    const double change = (next - X).cwiseAbs().maxCoeff();
    X = next;
    if (change < tol) break;
  }
  return flatten(X);
}

ReferenceSolution projected_gradient_solve(const Objective& objective,
                                           const std::function<Vector(const Vector&)>& project,
                                           const lmo::LinearMinimizationOracle& lmo,
                                           const Vector& x0, double L, double gap_tol,
                                           int max_iter) {
  ReferenceSolution out;
  Vector x = project(x0);
  Vector y = x;
  double fx = objective.value(x);
  double momentum = 1.0;

  auto certificate = [&](const Vector& point) {
    const Vector g = objective.gradient(point);
    return g.dot(point - lmo.minimize(g));
  };

  for (int it = 1; it <= max_iter; ++it) {
    const Vector next = project(y - objective.gradient(y) / L);
    const double f_next = objective.value(next);
    if (f_next > fx) {
      // A plain gradient step that fails to decrease f means roundoff has
      // taken over; otherwise restart the momentum from the last point.
      if (momentum == 1.0) break;
      momentum = 1.0;
      y = x;
      continue;
    }
    const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = next + ((momentum - 1.0) / m_next) * (next - x);
    x = next;
    fx = f_next;
    momentum = m_next;
    out.iterations = it;
    if (it % 10 == 0 || it < 10) {
      out.gap = certificate(x);
      if (out.gap <= gap_tol * std::max(1.0, std::abs(fx))) break;
    }
  }
  out.gap = certificate(x);
  out.x = x;
  out.value = fx;
  return out;
}

nlohmann::json describe(const ProblemInstance& instance) {
  nlohmann::json j;
  j["class"] = to_string(instance.cls);
  j["size"] = instance.size;
  j["seed"] = instance.seed;
  j["shape"] = {instance.shape.rows, instance.shape.cols};
  j["dimension"] = instance.dimension();
  j["lmo"] = instance.lmo->name();
  j["known_L"] = instance.known_L ? nlohmann::json(*instance.known_L) : nlohmann::json(nullptr);
  j["known_opt"] =
      instance.known_opt ? nlohmann::json(*instance.known_opt) : nlohmann::json(nullptr);
  j["initial_atoms"] = instance.initial_atoms.size();
  return j;
}

ProblemInstance regenerate(const nlohmann::json& description) {
  try {
    return generate_instance(parse_problem_class(description.at("class").get<std::string>()),
                             description.at("size").get<std::size_t>(),
                             description.at("seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed instance description: ") + e.what());
  }
}

}  // namespace secantfw::problems
