#include <cmath>
#include <numeric>

#include "secantfw/fw.hpp"

namespace secantfw::fw {

ActiveSet::ActiveSet(Vector atom) {
  atoms_.push_back(std::move(atom));
  weights_.push_back(1.0);
  x_ = atoms_.front();
}

ActiveSet::ActiveSet(std::vector<Vector> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty() || atoms_.size() != weights_.size()) {
    throw DimensionError("ActiveSet: need matching, nonempty atoms and weights");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].size() != atoms_[0].size()) throw DimensionError("ActiveSet: ragged atoms");
    if (!(weights_[i] > 0.0)) throw DomainError("ActiveSet: weights must be positive");
  }
  renormalize();
}

std::optional<std::size_t> ActiveSet::find(const Vector& atom) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].size() == atom.size() && atoms_[i] == atom) return i;
  }
  return std::nullopt;
}

std::pair<std::size_t, std::size_t> ActiveSet::away_and_local(const Vector& grad) const {
  std::size_t away = 0;
  std::size_t local = 0;
  double hi = grad.dot(atoms_[0]);
  double lo = hi;
  for (std::size_t i = 1; i < atoms_.size(); ++i) {
    const double s = grad.dot(atoms_[i]);
    if (s > hi) {
      hi = s;
      away = i;
    }
    if (s < lo) {
      lo = s;
      local = i;
    }
  }
  return {away, local};
}

void ActiveSet::fw_update(const Vector& w, double gamma) {
  if (gamma <= 0.0) return;
  if (gamma >= 1.0) {
    atoms_.assign(1, w);
    weights_.assign(1, 1.0);
    x_ = w;
    return;
  }
  for (double& lambda : weights_) lambda *= (1.0 - gamma);
  if (auto idx = find(w)) {
    weights_[*idx] += gamma;
  } else {
    atoms_.push_back(w);
    weights_.push_back(gamma);
  }
  for (std::size_t i = atoms_.size(); i-- > 0;) {
    if (!(weights_[i] > 0.0)) remove(i);
  }
  recompute_iterate();
}

bool ActiveSet::pairwise_update(std::size_t away, std::size_t local, double gamma) {
  if (away >= atoms_.size() || local >= atoms_.size()) {
    throw DimensionError("ActiveSet: atom index out of range");
  }
  if (gamma <= 0.0 || away == local) return false;
  const bool drop = gamma >= weights_[away];
  const double moved = drop ? weights_[away] : gamma;
  weights_[local] += moved;
  weights_[away] -= moved;
  if (drop || !(weights_[away] > 0.0)) {
    remove(away);
    recompute_iterate();
    return true;
  }
  recompute_iterate();
  return false;
}

double ActiveSet::weight_sum() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double ActiveSet::renormalize() {
  const double sum = weight_sum();
  for (double& lambda : weights_) lambda /= sum;
  recompute_iterate();
  return sum - 1.0;
}

bool ActiveSet::invariants_hold(double weight_tol, double iterate_tol) const {
  for (double lambda : weights_) {
    if (!(lambda > 0.0)) return false;
  }
  if (std::abs(weight_sum() - 1.0) > weight_tol) return false;
  Vector sum = Vector::Zero(x_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) sum += weights_[i] * atoms_[i];
  if ((sum - x_).lpNorm<Eigen::Infinity>() > iterate_tol) return false;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
      if (atoms_[i] == atoms_[j]) return false;
    }
  }
  return true;
}

void ActiveSet::recompute_iterate() {
  x_ = Vector::Zero(atoms_.front().size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) x_.noalias() += weights_[i] * atoms_[i];
}

void ActiveSet::remove(std::size_t i) {
  atoms_.erase(atoms_.begin() + static_cast<std::ptrdiff_t>(i));
  weights_.erase(weights_.begin() + static_cast<std::ptrdiff_t>(i));
}

}  // namespace secantfw::fw
