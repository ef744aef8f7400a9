#pragma once

// Dense complex linear algebra and quantum-state primitives.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "thermoswitch/error.hpp"

namespace thermoswitch {

using Eigen::Index;

template <typename Scalar>
using Complex = std::complex<Scalar>;
template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace tolerance {
inline constexpr double hermitian = 1e-10;
inline constexpr double trace = 1e-9;
inline constexpr double eigenvalue_floor = 1e-9;
inline constexpr double reconstruction = 1e-9;
// Adjacent eigenvalues closer than this are a degenerate pair.
inline constexpr double degeneracy_gap = 1e-12;
inline constexpr double energy_grouping = 1e-9;
}  // namespace tolerance

template <typename Scalar>
Scalar max_abs(const ComplexMatrix<Scalar>& m) {
  return m.size() == 0 ? Scalar(0) : m.cwiseAbs().maxCoeff();
}

/// max |m - m^dagger| over entries.
template <typename Scalar>
Scalar hermiticity_defect(const ComplexMatrix<Scalar>& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<Scalar>::infinity();
  return max_abs<Scalar>(m - m.adjoint());
}

// Hermiticity is checked relative to the matrix scale so that large sweep
// energies do not trip the absolute tolerance through rounding alone.
template <typename Scalar>
bool is_hermitian(const ComplexMatrix<Scalar>& m, Scalar tol = Scalar(tolerance::hermitian)) {
  return hermiticity_defect<Scalar>(m) <= tol * std::max(Scalar(1), max_abs<Scalar>(m));
}

template <typename Scalar>
ComplexMatrix<Scalar> hermitian_part(const ComplexMatrix<Scalar>& m) {
  return (m + m.adjoint()) * Scalar(0.5);
}

template <typename Scalar>
ComplexMatrix<Scalar> commutator(const ComplexMatrix<Scalar>& a, const ComplexMatrix<Scalar>& b) {
  return a * b - b * a;
}

template <typename Scalar>
class HamiltonianOperator {
 public:
  explicit HamiltonianOperator(ComplexMatrix<Scalar> m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      throw Error(ErrorCode::DimensionMismatch, "Hamiltonian must be square and non-empty");
    if (!is_hermitian<Scalar>(m_))
      throw Error(ErrorCode::NotHermitian, "Hamiltonian defect " + std::to_string(double(hermiticity_defect<Scalar>(m_))));
  }

  static HamiltonianOperator diagonal(const RealVector<Scalar>& energies) {
    return HamiltonianOperator(energies.template cast<Complex<Scalar>>().asDiagonal().toDenseMatrix());
  }

  const ComplexMatrix<Scalar>& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

  Scalar expectation(const ComplexMatrix<Scalar>& rho) const { return (rho * m_).trace().real(); }

 private:
  ComplexMatrix<Scalar> m_;
};

template <typename Scalar>
struct EigenSystem {
  RealVector<Scalar> eigenvalues;       // ascending
  ComplexMatrix<Scalar> eigenvectors;   // columns

  ComplexMatrix<Scalar> reconstruct() const {
    return eigenvectors * eigenvalues.template cast<Complex<Scalar>>().asDiagonal() * eigenvectors.adjoint();
  }
};

namespace detail {

// One two-sided complex Jacobi rotation zeroing a(p, q).
template <typename Scalar>
void jacobi_rotate(ComplexMatrix<Scalar>& a, ComplexMatrix<Scalar>& v, Index p, Index q) {
  using C = Complex<Scalar>;
  const C apq = a(p, q);
  const Scalar mag = std::abs(apq);
  if (mag == Scalar(0)) return;
  const C phase = apq / mag;  // e^{i phi}
  const Scalar app = a(p, p).real();
  const Scalar aqq = a(q, q).real();
  const Scalar tau = (aqq - app) / (Scalar(2) * mag);
  const Scalar t = (tau >= Scalar(0) ? Scalar(1) : Scalar(-1)) / (std::abs(tau) + std::sqrt(Scalar(1) + tau * tau));
  const Scalar c = Scalar(1) / std::sqrt(Scalar(1) + t * t);
  const Scalar s = t * c;

  // G restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
  const C g_pp(c), g_pq(s);
  const C g_qp = -s * std::conj(phase);
  const C g_qq = c * std::conj(phase);

  const Index n = a.rows();
  // A <- A G (columns p, q)
  for (Index k = 0; k < n; ++k) {
    const C akp = a(k, p), akq = a(k, q);
    a(k, p) = akp * g_pp + akq * g_qp;
    a(k, q) = akp * g_pq + akq * g_qq;
  }
  // A <- G^dagger A (rows p, q)
  for (Index k = 0; k < n; ++k) {
    const C apk = a(p, k), aqk = a(q, k);
    a(p, k) = std::conj(g_pp) * apk + std::conj(g_qp) * aqk;
    a(q, k) = std::conj(g_pq) * apk + std::conj(g_qq) * aqk;
  }
  a(p, q) = C(0);
  a(q, p) = C(0);
  a(p, p) = C(a(p, p).real());
  a(q, q) = C(a(q, q).real());
  for (Index k = 0; k < n; ++k) {
    const C vkp = v(k, p), vkq = v(k, q);
    v(k, p) = vkp * g_pp + vkq * g_qp;
    v(k, q) = vkp * g_pq + vkq * g_qq;
  }
}

}  // namespace detail

inline constexpr int jacobi_max_sweeps = 100;

/// Cyclic Jacobi diagonalization of a Hermitian matrix. Sweeps visit (p, q)
/// in row-major order so results are bit-reproducible; a sweep with no
/// rotation ends the iteration.
template <typename Scalar>
EigenSystem<Scalar> eig_hermitian(const ComplexMatrix<Scalar>& h) {
  if (h.rows() != h.cols() || h.rows() < 1)
    throw Error(ErrorCode::DimensionMismatch, "eig_hermitian needs a square non-empty matrix");
  if (!is_hermitian<Scalar>(h))
    throw Error(ErrorCode::NotHermitian, "eig_hermitian input defect " + std::to_string(double(hermiticity_defect<Scalar>(h))));

  const Index n = h.rows();
  ComplexMatrix<Scalar> a = hermitian_part<Scalar>(h);
  ComplexMatrix<Scalar> v = ComplexMatrix<Scalar>::Identity(n, n);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar floor = eps * eps * std::max(max_abs<Scalar>(a), std::numeric_limits<Scalar>::min());
  // Relative test: a(p, q) is negligible against the geometric mean of its
  // diagonal pair, which keeps small eigenvalues of graded matrices accurate.
  auto negligible = [&](Index p, Index q) {
    const Scalar apq = std::abs(a(p, q));
    return apq <= floor || apq <= eps * std::sqrt(std::abs(a(p, p).real()) * std::abs(a(q, q).real()));
  };

  bool converged = false;
  for (int sweep = 0; sweep < jacobi_max_sweeps; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q)
        if (!negligible(p, q)) {
          detail::jacobi_rotate<Scalar>(a, v, p, q);
          rotated = true;
        }
    if (!rotated) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "Jacobi sweeps exhausted");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem<Scalar> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]).real();
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

template <typename Scalar>
EigenSystem<Scalar> eig_hermitian(const HamiltonianOperator<Scalar>& h) {
  return eig_hermitian<Scalar>(h.matrix());
}

/// Complex Hermitian PSD unit-trace matrix.
template <typename Scalar>
class DensityOperator {
 public:
  /// Validates Hermiticity, unit trace and the eigenvalue floor.
  explicit DensityOperator(ComplexMatrix<Scalar> m, Scalar eigenvalue_floor = Scalar(tolerance::eigenvalue_floor))
      : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      throw Error(ErrorCode::DimensionMismatch, "density operator must be square and non-empty");
    if (!m_.allFinite()) throw Error(ErrorCode::InvalidState, "non-finite density matrix entries");
    if (hermiticity_defect<Scalar>(m_) > Scalar(tolerance::hermitian))
      throw Error(ErrorCode::NotHermitian, "density operator is not Hermitian");
    const Scalar tr = m_.trace().real();
    if (std::abs(tr - Scalar(1)) > Scalar(tolerance::trace))
      throw Error(ErrorCode::InvalidState, "density operator trace " + std::to_string(double(tr)));
    const Scalar lo = eig_hermitian<Scalar>(m_).eigenvalues.minCoeff();
    if (lo < -eigenvalue_floor)
      throw Error(ErrorCode::InvalidState, "density operator eigenvalue " + std::to_string(double(lo)));
  }

  static DensityOperator pure(const ComplexVector<Scalar>& psi) {
    const Scalar norm = psi.norm();
    if (!(norm > Scalar(0))) throw Error(ErrorCode::InvalidState, "zero state vector");
    const ComplexVector<Scalar> u = psi / norm;
    ComplexMatrix<Scalar> m = u * u.adjoint();
    return DensityOperator(hermitian_part<Scalar>(m));
  }

  static DensityOperator diagonal(const RealVector<Scalar>& probs) {
    return DensityOperator(probs.template cast<Complex<Scalar>>().asDiagonal().toDenseMatrix());
  }

  static DensityOperator maximally_mixed(Index dim) {
    return diagonal(RealVector<Scalar>::Constant(dim, Scalar(1) / Scalar(dim)));
  }

  const ComplexMatrix<Scalar>& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  Scalar purity() const { return (m_ * m_).trace().real(); }
  Scalar population(Index i) const { return m_(i, i).real(); }
  RealVector<Scalar> populations() const { return m_.diagonal().real(); }

  /// Populations after rotating into the columns of `basis`.
  RealVector<Scalar> populations_in(const ComplexMatrix<Scalar>& basis) const {
    return (basis.adjoint() * m_ * basis).diagonal().real();
  }

 private:
  ComplexMatrix<Scalar> m_;
};

/// exp(-beta h) / Tr exp(-beta h), evaluated in the eigenbasis of h.
template <typename Scalar>
DensityOperator<Scalar> gibbs_state(const HamiltonianOperator<Scalar>& h, Scalar beta) {
  if (!(beta >= Scalar(0))) throw Error(ErrorCode::InvalidArgument, "beta must be nonnegative");
  const auto es = eig_hermitian(h);
  const Scalar e0 = es.eigenvalues.minCoeff();
  RealVector<Scalar> w = (-(beta) * (es.eigenvalues.array() - e0)).exp().matrix();
  w /= w.sum();
  ComplexMatrix<Scalar> g = es.eigenvectors * w.template cast<Complex<Scalar>>().asDiagonal() * es.eigenvectors.adjoint();
  return DensityOperator<Scalar>(hermitian_part<Scalar>(g));
}

enum class DegeneracyPolicy {
  Reject,          // the default: degenerate spectra raise DegenerateSpectrum
  GroupByEnergy,   // project onto eigenspaces clustered within tolerance::energy_grouping
};

/// Eigenspaces of h as lists of eigenvector column indices, ascending energy.
template <typename Scalar>
std::vector<std::vector<Index>> energy_groups(const EigenSystem<Scalar>& es, Scalar tol) {
  std::vector<std::vector<Index>> groups;
  for (Index k = 0; k < es.eigenvalues.size(); ++k) {
    if (!groups.empty() && es.eigenvalues(k) - es.eigenvalues(groups.back().back()) <= tol)
      groups.back().push_back(k);
    else
      groups.push_back({k});
  }
  return groups;
}

template <typename Scalar>
bool has_degeneracy(const EigenSystem<Scalar>& es, Scalar gap = Scalar(tolerance::degeneracy_gap)) {
  for (Index k = 1; k < es.eigenvalues.size(); ++k)
    if (es.eigenvalues(k) - es.eigenvalues(k - 1) <= gap) return true;
  return false;
}

/// Projection of rho onto the energy diagonal of h: sum_j P_j rho P_j.
template <typename Scalar>
DensityOperator<Scalar> decohere(const DensityOperator<Scalar>& rho, const HamiltonianOperator<Scalar>& h,
                                 DegeneracyPolicy policy = DegeneracyPolicy::Reject) {
  if (rho.dim() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "decohere: rho and h differ in dimension");
  const auto es = eig_hermitian(h);
  const ComplexMatrix<Scalar>& v = es.eigenvectors;
  const ComplexMatrix<Scalar> in_basis = v.adjoint() * rho.matrix() * v;
  ComplexMatrix<Scalar> projected = ComplexMatrix<Scalar>::Zero(rho.dim(), rho.dim());

  if (policy == DegeneracyPolicy::Reject) {
    if (has_degeneracy(es)) throw Error(ErrorCode::DegenerateSpectrum, "decohere: degenerate Hamiltonian");
    projected.diagonal() = in_basis.diagonal();
  } else {
    for (const auto& group : energy_groups(es, Scalar(tolerance::energy_grouping)))
      for (Index a : group)
        for (Index b : group) projected(a, b) = in_basis(a, b);
  }
  return DensityOperator<Scalar>(hermitian_part<Scalar>(ComplexMatrix<Scalar>(v * projected * v.adjoint())));
}

using ComplexMatrixd = ComplexMatrix<double>;
using ComplexVectord = ComplexVector<double>;
using RealVectord = RealVector<double>;
using DensityOperatord = DensityOperator<double>;
using HamiltonianOperatord = HamiltonianOperator<double>;
using EigenSystemd = EigenSystem<double>;

}  // namespace thermoswitch
