#pragma once

// The two-surface photoisomer: electronic Hamiltonian along the torsion angle,
// its four-level kinetic spectrum, and the discrete clock model that
// alternates a dissipative tick with unitary evolution.

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "thermoswitch/error.hpp"
#include "thermoswitch/levels.hpp"
#include "thermoswitch/lz_params.hpp"
#include "thermoswitch/monotones.hpp"
#include "thermoswitch/open_system.hpp"
#include "thermoswitch/quantum_core.hpp"
#include "thermoswitch/thermomaj.hpp"

namespace thermoswitch {

template <typename Scalar>
struct MoleculeParams {
  Scalar w0 = 1;      // cis-surface rise over a half turn
  Scalar w1 = 1;      // trans-surface drop over a half turn
  Scalar e1 = 30;     // vertical excitation energy at phi = 0
  Scalar lambda = 1;  // diabatic coupling
  Scalar beta = 1;

  void validate() const {
    if (!(w0 >= 0) || !(w1 >= 0) || !(e1 >= 0) || !(lambda > 0) || !(beta > 0) || !std::isfinite(double(w0)) ||
        !std::isfinite(double(w1)) || !std::isfinite(double(e1)) || !std::isfinite(double(lambda)) ||
        !std::isfinite(double(beta)))
      throw Error(ErrorCode::InvalidArgument, "molecule needs w0, w1, e1 >= 0, lambda > 0 and beta > 0");
  }

  Scalar delta_e() const { return e1 - w1; }

  /// lambda <= 0.1 min(e1, w0); outside this the two-surface picture is only qualitative.
  bool weak_coupling() const { return lambda <= Scalar(0.1) * std::min(e1, w0); }
};

/// Diabatic-basis matrix diag((W0/2)(1 - cos phi), E1 - (W1/2)(1 - cos phi)) + (lambda/2) sigma_x.
/// 2 pi periodic in phi.
template <typename Scalar>
HamiltonianOperator<Scalar> h_elec(Scalar phi, const MoleculeParams<Scalar>& mp) {
  const Scalar bend = Scalar(1) - std::cos(phi);
  ComplexMatrix<Scalar> h(2, 2);
  h << mp.w0 / Scalar(2) * bend, mp.lambda / Scalar(2), mp.lambda / Scalar(2), mp.e1 - mp.w1 / Scalar(2) * bend;
  return HamiltonianOperator<Scalar>(h);
}

/// H00 - H11 of h_elec.
template <typename Scalar>
Scalar diabatic_gap(Scalar phi, const MoleculeParams<Scalar>& mp) {
  const Scalar bend = Scalar(1) - std::cos(phi);
  return mp.w0 / Scalar(2) * bend - (mp.e1 - mp.w1 / Scalar(2) * bend);
}

template <typename Scalar>
struct AdiabaticLevels {
  Scalar e_minus;
  Scalar e_plus;
  EigenSystem<Scalar> basis;  // column 0 is |E-(phi)>, column 1 is |E+(phi)>
};

template <typename Scalar>
AdiabaticLevels<Scalar> adiabatic_levels(Scalar phi, const MoleculeParams<Scalar>& mp) {
  EigenSystem<Scalar> es = eig_hermitian(h_elec(phi, mp));
  return {es.eigenvalues(0), es.eigenvalues(1), std::move(es)};
}

/// Levels E-(0), E-(pi), E+(0), E+(pi) at energies 0, dE, E1, E1 + dE.
template <typename Scalar>
LevelSystem<Scalar> four_level_system(const MoleculeParams<Scalar>& mp) {
  const Scalar de = mp.delta_e();
  return LevelSystem<Scalar>({{labels::e_minus_0, Scalar(0)},
                              {labels::e_minus_pi, de},
                              {labels::e_plus_0, mp.e1},
                              {labels::e_plus_pi, mp.e1 + de}},
                             mp.beta);
}

/// Downhill rates of the kinetic model, in units of 1/(beta hbar).
template <typename Scalar>
struct KineticRates {
  Scalar trans = 1;     // E+(0) -> E-(pi)
  Scalar cis = 0.01;    // E+(0) -> E-(0)
  Scalar upper = 0.01;  // E+(pi) -> E+(0)

  std::vector<BaseRate<Scalar>> base_rates() const {
    return {{labels::e_plus_0, labels::e_minus_pi, trans},
            {labels::e_plus_0, labels::e_minus_0, cis},
            {labels::e_plus_pi, labels::e_plus_0, upper}};
  }
  EarlyTimeRates<Scalar> early_time() const { return {trans, cis}; }
};

/// Lindblad spec on the four-level system: diagonal H and detailed-balance jumps.
template <typename Scalar>
LindbladSpec<Scalar> kinetic_spec(const LevelSystem<Scalar>& sys, const KineticRates<Scalar>& rates, Scalar hbar = 1) {
  return LindbladSpec<Scalar>(sys.hamiltonian(), detailed_balance_jumps(sys, rates.base_rates()), hbar);
}

template <typename Scalar>
struct ClockSimSpec {
  int f = 256;  // half the number of angular sites; the run covers sites 0..f
  Scalar delta_t = 1;
  Scalar p_dissipate = 1;
  MoleculeParams<Scalar> molecule;
  DensityOperator<Scalar> initial_elec = DensityOperator<Scalar>::maximally_mixed(2);
  Scalar hbar = 1;

  void validate() const {
    if (f < 2) throw Error(ErrorCode::InvalidArgument, "clock needs f >= 2");
    if (!(delta_t > Scalar(0)) || !std::isfinite(double(delta_t)))
      throw Error(ErrorCode::InvalidArgument, "clock step must be positive");
    if (!(p_dissipate >= Scalar(0) && p_dissipate <= Scalar(1)))
      throw Error(ErrorCode::InvalidArgument, "p_dissipate must lie in [0, 1]");
    if (!(hbar > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "hbar must be positive");
    if (initial_elec.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "electronic state must be 2x2");
    molecule.validate();
  }

  /// phi_j = j pi / f.
  Scalar phi(int j) const { return Scalar(j) * std::numbers::pi_v<Scalar> / Scalar(f); }
};

template <typename Scalar>
struct TickResult {
  DensityOperator<Scalar> elec;
  Scalar dissipated;
};

/// Convex mix of the identity (weight 1 - p) and dephasing in the adiabatic
/// basis of h_elec(phi_j) (weight p). The bath receives
/// p sum_mu p_mu (E_mu(phi_j) - <E_mu(phi_j)| h_elec(phi_{j+1}) |E_mu(phi_j)>).
template <typename Scalar>
TickResult<Scalar> clock_tick_channel(const DensityOperator<Scalar>& elec, int j, const ClockSimSpec<Scalar>& spec) {
  if (j < 0 || j > 2 * spec.f - 1) throw Error(ErrorCode::IndexOutOfRange, "clock site index out of range");
  if (elec.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "electronic state must be 2x2");
  const Scalar p = spec.p_dissipate;
  if (p == Scalar(0)) return {elec, Scalar(0)};
  const ComplexMatrix<Scalar> v = adiabatic_levels(spec.phi(j), spec.molecule).basis.eigenvectors;
  const ComplexMatrix<Scalar> here = v.adjoint() * h_elec(spec.phi(j), spec.molecule).matrix() * v;
  const ComplexMatrix<Scalar> next = v.adjoint() * h_elec(spec.phi(j + 1), spec.molecule).matrix() * v;
  const ComplexMatrix<Scalar> in_basis = v.adjoint() * elec.matrix() * v;

  ComplexMatrix<Scalar> dephased = ComplexMatrix<Scalar>::Zero(2, 2);
  Scalar dissipated = 0;
  for (Index mu = 0; mu < 2; ++mu) {
    const Scalar pop = in_basis(mu, mu).real();
    dephased(mu, mu) = pop;
    dissipated += pop * (here(mu, mu).real() - next(mu, mu).real());
  }
  const ComplexMatrix<Scalar> out = (Scalar(1) - p) * elec.matrix() + p * (v * dephased * v.adjoint());
  return {DensityOperator<Scalar>(hermitian_part<Scalar>(out)), p * dissipated};
}

/// exp(-i h dt / hbar) through the eigenbasis of h.
template <typename Scalar>
ComplexMatrix<Scalar> unitary_step(const HamiltonianOperator<Scalar>& h, Scalar dt, Scalar hbar) {
  const auto es = eig_hermitian(h);
  ComplexVector<Scalar> phases(es.eigenvalues.size());
  for (Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(Scalar(1), -es.eigenvalues(k) * dt / hbar);
  return es.eigenvectors * phases.asDiagonal() * es.eigenvectors.adjoint();
}

template <typename Scalar>
struct ClockTrajectory {
  std::vector<int> site_index;                         // 0..f
  std::vector<DensityOperator<Scalar>> states;         // after the unitary step into each site
  std::vector<DensityOperator<Scalar>> post_tick;      // entry k: right after the tick leaving site k
  std::vector<Scalar> post_tick_coherence;             // off-diagonal trace norm in the tick basis
  std::vector<Scalar> cumulative_dissipated;           // per site, starts at 0
};

/// Coherence of rho in the adiabatic basis of h_elec(phi): the trace norm of
/// its off-diagonal part there.
template <typename Scalar>
Scalar adiabatic_coherence(const DensityOperator<Scalar>& rho, Scalar phi, const MoleculeParams<Scalar>& mp) {
  const ComplexMatrix<Scalar> v = adiabatic_levels(phi, mp).basis.eigenvectors;
  ComplexMatrix<Scalar> in_basis = v.adjoint() * rho.matrix() * v;
  in_basis.diagonal().setZero();
  return trace_norm<Scalar>(in_basis);
}

/// Site 0 holds initial_elec; each of the f steps applies the tick at site j
/// and then exp(-i h_elec(phi_{j+1}) delta_t / hbar).
template <typename Scalar>
ClockTrajectory<Scalar> clock_simulate(const ClockSimSpec<Scalar>& spec) {
  spec.validate();
  ClockTrajectory<Scalar> out;
  out.site_index.push_back(0);
  out.states.push_back(spec.initial_elec);
  out.cumulative_dissipated.push_back(Scalar(0));
  for (int j = 0; j < spec.f; ++j) {
    TickResult<Scalar> tick = clock_tick_channel(out.states.back(), j, spec);
    out.post_tick_coherence.push_back(adiabatic_coherence(tick.elec, spec.phi(j), spec.molecule));
    const ComplexMatrix<Scalar> u = unitary_step(h_elec(spec.phi(j + 1), spec.molecule), spec.delta_t, spec.hbar);
    const ComplexMatrix<Scalar> evolved = u * tick.elec.matrix() * u.adjoint();
    out.post_tick.push_back(tick.elec);
    out.states.emplace_back(hermitian_part<Scalar>(evolved));
    out.site_index.push_back(j + 1);
    out.cumulative_dissipated.push_back(out.cumulative_dissipated.back() + tick.dissipated);
  }
  return out;
}

/// LZ parameters matching the clock at its diabatic crossing:
/// v = |D(phi_{j+1}) - D(phi_j)| / (2 delta_t) for the site pair where the
/// diabatic gap D changes sign.
template <typename Scalar>
LzParams<Scalar> clock_matched_lz(const ClockSimSpec<Scalar>& spec) {
  spec.validate();
  for (int j = 0; j < spec.f; ++j) {
    const Scalar a = diabatic_gap(spec.phi(j), spec.molecule);
    const Scalar b = diabatic_gap(spec.phi(j + 1), spec.molecule);
    if ((a <= Scalar(0) && b > Scalar(0)) || (a >= Scalar(0) && b < Scalar(0))) {
      LzParams<Scalar> p;
      p.v = std::abs(b - a) / (Scalar(2) * spec.delta_t);
      p.lambda = spec.molecule.lambda;
      p.hbar = spec.hbar;
      p.t_final = Scalar(spec.f) * spec.delta_t / Scalar(2);
      return p;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "the diabatic surfaces do not cross on [0, pi]");
}

using MoleculeParamsd = MoleculeParams<double>;
using ClockSimSpecd = ClockSimSpec<double>;
using ClockTrajectoryd = ClockTrajectory<double>;
using KineticRatesd = KineticRates<double>;

}  // namespace thermoswitch
