#pragma once

// Gibbs-rescaled Lorenz curves, the thermomajorization preorder and the
// yield bound for a target energy level.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "thermoswitch/error.hpp"
#include "thermoswitch/quantum_core.hpp"

namespace thermoswitch {

namespace tolerance {
inline constexpr double population_sum = 1e-9;
inline constexpr double population_dust = 1e-12;
inline constexpr double curve_comparison = 1e-12;
inline constexpr double partition_match = 1e-9;
inline constexpr double yield_bisection = 1e-10;
}  // namespace tolerance

template <typename Scalar>
struct Level {
  std::string label;
  Scalar energy;
};

/// Energy levels with an inverse temperature. Energies are in units of 1/beta
/// unless the caller says otherwise.
template <typename Scalar>
class LevelSystem {
 public:
  LevelSystem(std::vector<Level<Scalar>> levels, Scalar beta) : levels_(std::move(levels)), beta_(beta) {
    if (levels_.empty()) throw Error(ErrorCode::InvalidArgument, "LevelSystem needs at least one level");
    if (!(beta_ > Scalar(0)) || !std::isfinite(double(beta_)))
      throw Error(ErrorCode::InvalidArgument, "LevelSystem beta must be positive");
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      if (!std::isfinite(double(levels_[i].energy)))
        throw Error(ErrorCode::InvalidArgument, "non-finite energy for level " + levels_[i].label);
      for (std::size_t j = 0; j < i; ++j)
        if (levels_[i].label == levels_[j].label)
          throw Error(ErrorCode::InvalidArgument, "duplicate level label " + levels_[i].label);
    }
    weights_.resize(Index(levels_.size()));
    for (std::size_t i = 0; i < levels_.size(); ++i) weights_(Index(i)) = std::exp(-beta_ * levels_[i].energy);
    z_ = weights_.sum();
    if (!(z_ > Scalar(0)) || !std::isfinite(double(z_)))
      throw Error(ErrorCode::InvalidArgument, "partition function is not positive and finite");
  }

  Index size() const noexcept { return Index(levels_.size()); }
  Scalar beta() const noexcept { return beta_; }
  const std::vector<Level<Scalar>>& levels() const noexcept { return levels_; }
  const std::string& label(Index i) const { return levels_.at(std::size_t(i)).label; }
  Scalar energy(Index i) const { return levels_.at(std::size_t(i)).energy; }

  /// e^{-beta E_j}, aligned with levels().
  const RealVector<Scalar>& boltzmann_weights() const noexcept { return weights_; }
  Scalar partition_function() const noexcept { return z_; }

  Index index_of(const std::string& label) const {
    for (std::size_t i = 0; i < levels_.size(); ++i)
      if (levels_[i].label == label) return Index(i);
    throw Error(ErrorCode::UnknownLabel, "no level labelled " + label);
  }

  HamiltonianOperator<Scalar> hamiltonian() const {
    RealVector<Scalar> e(size());
    for (Index i = 0; i < size(); ++i) e(i) = energy(i);
    return HamiltonianOperator<Scalar>::diagonal(e);
  }

 private:
  std::vector<Level<Scalar>> levels_;
  Scalar beta_;
  RealVector<Scalar> weights_;
  Scalar z_;
};

/// Probabilities aligned with a LevelSystem. Floating-point dust is clamped on
/// construction.
template <typename Scalar>
class PopulationVector {
 public:
  explicit PopulationVector(RealVector<Scalar> probs) : p_(std::move(probs)) {
    if (p_.size() < 1) throw Error(ErrorCode::InvalidPopulation, "empty population vector");
    for (Index i = 0; i < p_.size(); ++i) {
      const Scalar v = p_(i);
      if (!std::isfinite(double(v)) || v < -Scalar(tolerance::population_dust) ||
          v > Scalar(1) + Scalar(tolerance::population_dust))
        throw Error(ErrorCode::InvalidPopulation, "population entry out of [0,1]: " + std::to_string(double(v)));
      p_(i) = std::clamp(v, Scalar(0), Scalar(1));
    }
    const Scalar total = p_.sum();
    if (std::abs(total - Scalar(1)) > Scalar(tolerance::population_sum))
      throw Error(ErrorCode::InvalidPopulation, "populations sum to " + std::to_string(double(total)));
  }

  explicit PopulationVector(const std::vector<Scalar>& probs)
      : PopulationVector(RealVector<Scalar>(Eigen::Map<const RealVector<Scalar>>(probs.data(), Index(probs.size())))) {}

  static PopulationVector gibbs(const LevelSystem<Scalar>& sys) {
    return PopulationVector(RealVector<Scalar>(sys.boltzmann_weights() / sys.partition_function()));
  }

  static PopulationVector from_state(const DensityOperator<Scalar>& rho) { return PopulationVector(rho.populations()); }

  Index size() const noexcept { return p_.size(); }
  Scalar operator[](Index i) const { return p_(i); }
  const RealVector<Scalar>& probs() const noexcept { return p_; }

 private:
  RealVector<Scalar> p_;
};

template <typename Scalar>
struct Elbow {
  Scalar x;
  Scalar y;
};

/// Concave piecewise-linear curve on [0, Z] through its elbows.
template <typename Scalar>
class LorenzCurve {
 public:
  explicit LorenzCurve(std::vector<Elbow<Scalar>> elbows) : elbows_(std::move(elbows)) {
    if (elbows_.size() < 2) throw Error(ErrorCode::InvalidArgument, "Lorenz curve needs two elbows");
  }

  const std::vector<Elbow<Scalar>>& elbows() const noexcept { return elbows_; }
  Scalar partition_function() const noexcept { return elbows_.back().x; }

  /// Linear interpolation between elbows; clamps outside [0, Z].
  Scalar operator()(Scalar x) const {
    if (x <= elbows_.front().x) return elbows_.front().y;
    if (x >= elbows_.back().x) return elbows_.back().y;
    auto it = std::upper_bound(elbows_.begin(), elbows_.end(), x,
                               [](Scalar value, const Elbow<Scalar>& e) { return value < e.x; });
    const Elbow<Scalar>& hi = *it;
    const Elbow<Scalar>& lo = *(it - 1);
    const Scalar w = (x - lo.x) / (hi.x - lo.x);
    return lo.y + w * (hi.y - lo.y);
  }

 private:
  std::vector<Elbow<Scalar>> elbows_;
};

/// Orders levels by r_j e^{beta E_j}, largest first. Zero-population levels
/// sort last; ties keep ascending level index.
template <typename Scalar>
std::vector<Index> rescaled_order(const PopulationVector<Scalar>& p, const LevelSystem<Scalar>& sys) {
  std::vector<Index> order(std::size_t(sys.size()));
  std::iota(order.begin(), order.end(), Index(0));
  const auto& g = sys.boltzmann_weights();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Scalar ra = p[a] > Scalar(0) ? p[a] / g(a) : Scalar(0);
    const Scalar rb = p[b] > Scalar(0) ? p[b] / g(b) : Scalar(0);
    return ra > rb;
  });
  return order;
}

template <typename Scalar>
LorenzCurve<Scalar> lorenz_curve(const PopulationVector<Scalar>& p, const LevelSystem<Scalar>& sys) {
  if (p.size() != sys.size())
    throw Error(ErrorCode::InvalidPopulation, "population vector does not match the level system");
  const auto& g = sys.boltzmann_weights();
  std::vector<Index> order = rescaled_order(p, sys);

  // Zero populations sort last, so the curve reaches 1 at the last populated level.
  std::size_t last_populated = 0;
  for (std::size_t k = 0; k < order.size(); ++k)
    if (p[order[k]] > Scalar(0)) last_populated = k;

  std::vector<Elbow<Scalar>> elbows;
  elbows.reserve(order.size() + 1);
  elbows.push_back({Scalar(0), Scalar(0)});
  Scalar x = 0, y = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    x += g(order[k]);
    y += p[order[k]];
    elbows.push_back({x, k >= last_populated ? Scalar(1) : std::min(y, Scalar(1))});
  }
  // Pin the end point to (Z, 1) exactly; the partial sums differ from Z only by rounding.
  elbows.back() = {sys.partition_function(), Scalar(1)};
  for (std::size_t k = elbows.size() - 1; k-- > 1;) elbows[k].x = std::min(elbows[k].x, elbows[k + 1].x);
  return LorenzCurve<Scalar>(std::move(elbows));
}

/// True iff curve a lies on or above curve b on [0, Z].
template <typename Scalar>
bool thermomajorizes(const LorenzCurve<Scalar>& a, const LorenzCurve<Scalar>& b) {
  if (std::abs(a.partition_function() - b.partition_function()) > Scalar(tolerance::partition_match))
    throw Error(ErrorCode::MismatchedPartitionFunction, "curves have different partition functions");
  const Scalar slack = Scalar(tolerance::curve_comparison);
  for (const auto& e : a.elbows())
    if (a(e.x) < b(e.x) - slack) return false;
  for (const auto& e : b.elbows())
    if (a(e.x) < e.y - slack) return false;
  return true;
}

template <typename Scalar>
Scalar equilibrium_yield(const LevelSystem<Scalar>& sys, const std::string& target_label) {
  const Index t = sys.index_of(target_label);
  return sys.boltzmann_weights()(t) / sys.partition_function();
}

/// Target population y with the remaining 1 - y spread over the other levels
/// in proportion to their Boltzmann weights. For fixed y this is the lowest
/// Lorenz curve over all final distributions.
template <typename Scalar>
PopulationVector<Scalar> conditional_gibbs_fill(const LevelSystem<Scalar>& sys, Index target, Scalar y) {
  const auto& g = sys.boltzmann_weights();
  RealVector<Scalar> q(sys.size());
  if (sys.size() == 1) {
    q(0) = Scalar(1);
    return PopulationVector<Scalar>(q);
  }
  const Scalar rest = sys.partition_function() - g(target);
  for (Index i = 0; i < sys.size(); ++i) q(i) = i == target ? y : (Scalar(1) - y) * g(i) / rest;
  return PopulationVector<Scalar>(q);
}

template <typename Scalar>
struct YieldBoundResult {
  Scalar bound;
  Scalar equilibrium_yield;
  std::string target_label;
};

/// Largest target population reachable from `initial` by a transformation it
/// thermomajorizes. Bisection on the target population; feasibility at each
/// trial value uses conditional_gibbs_fill.
template <typename Scalar>
YieldBoundResult<Scalar> max_yield_bound(const PopulationVector<Scalar>& initial, const LevelSystem<Scalar>& sys,
                                         const std::string& target_label) {
  const Index t = sys.index_of(target_label);
  const LorenzCurve<Scalar> start = lorenz_curve(initial, sys);
  const Scalar eq = equilibrium_yield(sys, target_label);
  auto feasible = [&](Scalar y) { return thermomajorizes(start, lorenz_curve(conditional_gibbs_fill(sys, t, y), sys)); };

  YieldBoundResult<Scalar> out{eq, eq, target_label};
  if (sys.size() == 1 || feasible(Scalar(1))) {
    out.bound = Scalar(1);
    return out;
  }
  // The feasible set is an interval containing the equilibrium value.
  Scalar lo = eq, hi = Scalar(1);
  while (hi - lo > Scalar(tolerance::yield_bisection)) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  out.bound = lo;
  return out;
}

/// Partial thermalization of levels i and j: moves (p_i, p_j) a fraction
/// `strength` of the way to their two-level Gibbs conditional.
template <typename Scalar>
PopulationVector<Scalar> beta_swap_channel(const PopulationVector<Scalar>& p, const LevelSystem<Scalar>& sys, Index i,
                                           Index j, Scalar strength) {
  if (p.size() != sys.size()) throw Error(ErrorCode::InvalidPopulation, "population vector does not match the level system");
  if (i < 0 || j < 0 || i >= sys.size() || j >= sys.size())
    throw Error(ErrorCode::IndexOutOfRange, "beta swap level index out of range");
  if (i == j) throw Error(ErrorCode::InvalidArgument, "beta swap needs two distinct levels");
  if (!(strength >= Scalar(0) && strength <= Scalar(1)))
    throw Error(ErrorCode::InvalidArgument, "beta swap strength must lie in [0, 1]");
  const auto& g = sys.boltzmann_weights();
  // Net flow from j into i that brings the pair to p_i / g_i = p_j / g_j.
  const Scalar flow = (g(i) * p[j] - g(j) * p[i]) / (g(i) + g(j));
  RealVector<Scalar> q = p.probs();
  q(i) = std::clamp(p[i] + strength * flow, Scalar(0), Scalar(1));
  q(j) = std::clamp(p[j] - strength * flow, Scalar(0), Scalar(1));
  return PopulationVector<Scalar>(q);
}

using Leveld = Level<double>;
using LevelSystemd = LevelSystem<double>;
using PopulationVectord = PopulationVector<double>;
using LorenzCurved = LorenzCurve<double>;
using YieldBoundResultd = YieldBoundResult<double>;

}  // namespace thermoswitch
