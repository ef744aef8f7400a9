#pragma once

// Coherence and athermality monotones: quantum Fisher information, the mode
// decomposition with trace norms, max relative entropy and one-shot work.

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "thermoswitch/error.hpp"
#include "thermoswitch/lz_params.hpp"
#include "thermoswitch/quantum_core.hpp"
#include "thermoswitch/thermomaj.hpp"

namespace thermoswitch {

namespace tolerance {
// Pairs with r_j + r_k at or below this contribute nothing to the Fisher sum.
inline constexpr double fisher_pair_weight = 1e-14;
inline constexpr double mode_gap = 1e-9;
inline constexpr double support_cutoff = 1e-12;
inline constexpr double support_weight = 1e-10;
}  // namespace tolerance

/// 2 sum_{j,k} (r_j - r_k)^2 / (r_j + r_k) |<j|H|k>|^2 over the eigenbasis of rho.
template <typename Scalar>
Scalar fisher_information(const DensityOperator<Scalar>& rho, const HamiltonianOperator<Scalar>& h) {
  if (rho.dim() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "fisher_information: rho and h differ in dimension");
  const auto es = eig_hermitian(rho.matrix());
  const RealVector<Scalar> r = es.eigenvalues.cwiseMax(Scalar(0));
  const ComplexMatrix<Scalar> hk = es.eigenvectors.adjoint() * h.matrix() * es.eigenvectors;
  Scalar sum = 0;
  for (Index j = 0; j < r.size(); ++j)
    for (Index k = 0; k < r.size(); ++k) {
      const Scalar w = r(j) + r(k);
      if (w <= Scalar(tolerance::fisher_pair_weight)) continue;
      const Scalar diff = r(j) - r(k);
      sum += diff * diff / w * std::norm(hk(j, k));
    }
  return Scalar(2) * sum;
}

/// Closed-form qubit Fisher information against H_LZ(t_final), with a = vt_final:
/// (lambda (1 - 2 rho00) + 4 a Re rho01)^2 + (16 a^2 + 4 lambda^2) (Im rho01)^2.
/// Equals 4 |h x r|^2 for Bloch vectors h of H and r of rho.
template <typename Scalar>
Scalar fisher_lz_formula(const DensityOperator<Scalar>& rho_elec, const LzParams<Scalar>& p) {
  if (rho_elec.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "fisher_lz_formula needs a 2x2 state");
  const Scalar a = p.v * p.t_final;
  const Scalar rho00 = rho_elec.matrix()(0, 0).real();
  const Complex<Scalar> rho01 = rho_elec.matrix()(0, 1);
  const Scalar real_part = p.lambda * (Scalar(1) - Scalar(2) * rho00) + Scalar(4) * a * rho01.real();
  const Scalar imag_weight = Scalar(16) * a * a + Scalar(4) * p.lambda * p.lambda;
  return real_part * real_part + imag_weight * rho01.imag() * rho01.imag();
}

/// 16 v^2 t_final^2 P (1 - P) with P = lz_closed_probability(p).
template <typename Scalar>
Scalar fisher_bound(const LzParams<Scalar>& p) {
  const Scalar prob = lz_closed_probability(p);
  return Scalar(16) * p.v * p.v * p.t_final * p.t_final * prob * (Scalar(1) - prob);
}

/// fisher_bound / (4 v^2 t_final^2) = 4 P (1 - P).
template <typename Scalar>
Scalar fisher_bound_scaled(const LzParams<Scalar>& p) {
  const Scalar prob = lz_closed_probability(p);
  return Scalar(4) * prob * (Scalar(1) - prob);
}

/// Sweep rate pi lambda^2 / (2 hbar ln 2) at which lz_closed_probability is 1/2.
template <typename Scalar>
Scalar fisher_bound_peak_rate(Scalar lambda, Scalar hbar = 1) {
  return std::numbers::pi_v<Scalar> * lambda * lambda / (Scalar(2) * hbar * std::log(Scalar(2)));
}

template <typename Scalar>
struct Mode {
  Scalar omega;                     // gap E_n - E_m
  ComplexMatrix<Scalar> component;  // in the original basis
};

/// Components of an operator grouped by energy gap; modes sorted by omega.
template <typename Scalar>
class ModeDecomposition {
 public:
  ModeDecomposition(std::vector<Mode<Scalar>> modes, Scalar gap_tol, EigenSystem<Scalar> energy_basis)
      : modes_(std::move(modes)), gap_tol_(gap_tol), basis_(std::move(energy_basis)) {}

  const std::vector<Mode<Scalar>>& modes() const noexcept { return modes_; }
  Scalar gap_tolerance() const noexcept { return gap_tol_; }
  const EigenSystem<Scalar>& energy_basis() const noexcept { return basis_; }

  bool contains(Scalar omega) const { return find(omega) != nullptr; }

  const Mode<Scalar>& at(Scalar omega) const {
    const Mode<Scalar>* m = find(omega);
    if (!m) throw Error(ErrorCode::UnknownMode, "no mode at gap " + std::to_string(double(omega)));
    return *m;
  }

  ComplexMatrix<Scalar> reconstruct() const {
    const Index d = basis_.eigenvalues.size();
    ComplexMatrix<Scalar> sum = ComplexMatrix<Scalar>::Zero(d, d);
    for (const auto& m : modes_) sum += m.component;
    return sum;
  }

 private:
  const Mode<Scalar>* find(Scalar omega) const {
    for (const auto& m : modes_)
      if (std::abs(m.omega - omega) <= gap_tol_) return &m;
    return nullptr;
  }

  std::vector<Mode<Scalar>> modes_;
  Scalar gap_tol_;
  EigenSystem<Scalar> basis_;
};

/// Decomposes any square operator x by the gaps of h. Gaps within gap_tol of
/// a neighbour share a mode; the zero-gap mode is exactly omega = 0.
template <typename Scalar>
ModeDecomposition<Scalar> mode_decompose(const ComplexMatrix<Scalar>& x, const HamiltonianOperator<Scalar>& h,
                                         Scalar gap_tol = Scalar(tolerance::mode_gap)) {
  if (x.rows() != h.dim() || x.cols() != h.dim())
    throw Error(ErrorCode::DimensionMismatch, "mode_decompose: operator and h differ in dimension");
  if (!(gap_tol >= Scalar(0))) throw Error(ErrorCode::InvalidArgument, "gap tolerance must be nonnegative");
  EigenSystem<Scalar> es = eig_hermitian(h);
  if (has_degeneracy(es, gap_tol)) throw Error(ErrorCode::DegenerateSpectrum, "mode_decompose: degenerate Hamiltonian");
  const Index d = h.dim();
  const ComplexMatrix<Scalar> xe = es.eigenvectors.adjoint() * x * es.eigenvectors;

  struct Pair {
    Scalar gap;
    Index n, m;
  };
  std::vector<Pair> pairs;
  for (Index n = 0; n < d; ++n)
    for (Index m = 0; m < d; ++m) pairs.push_back({n == m ? Scalar(0) : es.eigenvalues(n) - es.eigenvalues(m), n, m});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.gap < b.gap; });

  std::vector<Mode<Scalar>> modes;
  std::size_t start = 0;
  while (start < pairs.size()) {
    std::size_t end = start + 1;
    while (end < pairs.size() && pairs[end].gap - pairs[end - 1].gap <= gap_tol) ++end;
    ComplexMatrix<Scalar> in_basis = ComplexMatrix<Scalar>::Zero(d, d);
    Scalar total = 0;
    bool has_zero = false;
    for (std::size_t k = start; k < end; ++k) {
      in_basis(pairs[k].n, pairs[k].m) = xe(pairs[k].n, pairs[k].m);
      total += pairs[k].gap;
      has_zero = has_zero || pairs[k].n == pairs[k].m;
    }
    const Scalar omega = has_zero ? Scalar(0) : total / Scalar(end - start);
    modes.push_back({omega, es.eigenvectors * in_basis * es.eigenvectors.adjoint()});
    start = end;
  }
  return ModeDecomposition<Scalar>(std::move(modes), gap_tol, std::move(es));
}

template <typename Scalar>
ModeDecomposition<Scalar> mode_decompose(const DensityOperator<Scalar>& rho, const HamiltonianOperator<Scalar>& h,
                                         Scalar gap_tol = Scalar(tolerance::mode_gap)) {
  return mode_decompose<Scalar>(rho.matrix(), h, gap_tol);
}

/// Tr sqrt(A A^dagger), from singular values.
template <typename Scalar>
Scalar trace_norm(const ComplexMatrix<Scalar>& a) {
  if (a.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<ComplexMatrix<Scalar>> svd(a);
  return svd.singularValues().sum();
}

template <typename Scalar>
Scalar mode_one_norm(const ModeDecomposition<Scalar>& md, Scalar omega) {
  return trace_norm<Scalar>(md.at(omega).component);
}

/// ||rho^(w) + rho^(-w)||_1 for w = |omega|; the Hermitian part of the
/// coherence at that frequency.
template <typename Scalar>
Scalar mode_pair_one_norm(const ModeDecomposition<Scalar>& md, Scalar omega) {
  const Scalar w = std::abs(omega);
  ComplexMatrix<Scalar> sum = md.at(w).component;
  if (w > md.gap_tolerance()) sum += md.at(-w).component;
  return trace_norm<Scalar>(sum);
}

/// Sum of ||rho^(omega)||_1 over omega != 0.
template <typename Scalar>
Scalar total_coherence_one_norm(const ModeDecomposition<Scalar>& md) {
  Scalar sum = 0;
  for (const auto& m : md.modes())
    if (m.omega != Scalar(0)) sum += trace_norm<Scalar>(m.component);
  return sum;
}

/// log lambda_max(sigma^{-1/2} rho sigma^{-1/2}) on the support of sigma,
/// the span of eigenvectors with eigenvalue above support_cutoff.
template <typename Scalar>
Scalar d_max(const DensityOperator<Scalar>& rho, const DensityOperator<Scalar>& sigma,
             Scalar support_cutoff = Scalar(tolerance::support_cutoff)) {
  if (rho.dim() != sigma.dim()) throw Error(ErrorCode::DimensionMismatch, "d_max: rho and sigma differ in dimension");
  const auto es = eig_hermitian(sigma.matrix());
  std::vector<Index> support;
  for (Index i = 0; i < es.eigenvalues.size(); ++i)
    if (es.eigenvalues(i) > support_cutoff) support.push_back(i);
  const Index k = Index(support.size());
  const Index d = rho.dim();
  ComplexMatrix<Scalar> vs(d, k);
  RealVector<Scalar> s(k);
  for (Index c = 0; c < k; ++c) {
    vs.col(c) = es.eigenvectors.col(support[std::size_t(c)]);
    s(c) = es.eigenvalues(support[std::size_t(c)]);
  }
  const ComplexMatrix<Scalar> reduced = vs.adjoint() * rho.matrix() * vs;
  const Scalar outside = Scalar(1) - reduced.trace().real();
  if (outside > Scalar(tolerance::support_weight))
    throw Error(ErrorCode::SupportViolation, "rho has weight " + std::to_string(double(outside)) + " outside supp(sigma)");
  // Dividing by sqrt(s_a s_b) keeps the diagonal ratio r_a / s_a exact, so rho = sigma gives exactly 0.
  ComplexMatrix<Scalar> scaled(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) scaled(a, b) = reduced(a, b) / std::sqrt(s(a) * s(b));
  const Scalar top = eig_hermitian<Scalar>(hermitian_part<Scalar>(scaled)).eigenvalues.maxCoeff();
  return std::log(top);
}

template <typename Scalar>
struct WorkResult {
  Scalar w_min;                         // energy units
  Scalar d_max;                         // natural log
  RealVector<Scalar> per_level_rescaled; // r_j e^{beta E_j} Z
};

/// r_j e^{beta E_j} Z for every level.
template <typename Scalar>
RealVector<Scalar> rescaled_populations(const PopulationVector<Scalar>& p, const LevelSystem<Scalar>& sys) {
  if (p.size() != sys.size()) throw Error(ErrorCode::InvalidPopulation, "population vector does not match the level system");
  RealVector<Scalar> out(sys.size());
  for (Index j = 0; j < sys.size(); ++j) out(j) = p[j] / sys.boltzmann_weights()(j) * sys.partition_function();
  return out;
}

/// max_j [E_j - (1/beta) log(1/r_j)] + (1/beta) log Z over levels with r_j > 0.
template <typename Scalar>
Scalar w_min_level_formula(const PopulationVector<Scalar>& p, const LevelSystem<Scalar>& sys) {
  if (p.size() != sys.size()) throw Error(ErrorCode::InvalidPopulation, "population vector does not match the level system");
  const Scalar inv_beta = Scalar(1) / sys.beta();
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (Index j = 0; j < sys.size(); ++j)
    if (p[j] > Scalar(0)) best = std::max(best, sys.energy(j) - inv_beta * std::log(Scalar(1) / p[j]));
  return best + inv_beta * std::log(sys.partition_function());
}

/// One-shot work of formation (1/beta) D_max(diag(p) || Gibbs), computed
/// through d_max on the corresponding density operators. Gibbs weights are
/// strictly positive and exact on the diagonal, so the support cutoff is 0:
/// e^{-30} / Z lies below the generic cutoff but is still support.
template <typename Scalar>
WorkResult<Scalar> w_min(const PopulationVector<Scalar>& p, const LevelSystem<Scalar>& sys) {
  if (p.size() != sys.size()) throw Error(ErrorCode::InvalidPopulation, "population vector does not match the level system");
  const auto rho = DensityOperator<Scalar>::diagonal(p.probs());
  const auto gibbs = DensityOperator<Scalar>::diagonal(PopulationVector<Scalar>::gibbs(sys).probs());
  WorkResult<Scalar> out;
  out.d_max = d_max(rho, gibbs, Scalar(0));
  out.w_min = out.d_max / sys.beta();
  out.per_level_rescaled = rescaled_populations(p, sys);
  return out;
}

using ModeDecompositiond = ModeDecomposition<double>;
using WorkResultd = WorkResult<double>;

}  // namespace thermoswitch
