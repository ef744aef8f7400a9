#pragma once

// Landau-Zener sweep parameters and the closed-form pieces that only need
// them. Shared by the open-system integrator and the Fisher-information
// monotones.

#include <cmath>
#include <numbers>

#include "thermoswitch/error.hpp"
#include "thermoswitch/quantum_core.hpp"

namespace thermoswitch {

template <typename Scalar>
struct LzParams {
  Scalar v = 1;        // energy / time
  Scalar lambda = 1;   // energy
  Scalar hbar = 1;     // energy * time
  Scalar t_final = 50; // time; the sweep runs over [-t_final, t_final]
  Scalar gamma = 0;    // dephasing rate

  void validate() const {
    if (!(v > 0) || !(lambda > 0) || !(hbar > 0) || !(t_final > 0) || !(gamma >= 0) ||
        !std::isfinite(double(v)) || !std::isfinite(double(t_final)))
      throw Error(ErrorCode::InvalidArgument, "LZ parameters need v, lambda, hbar, t_final > 0 and gamma >= 0");
  }

  /// t_final >= 10 lambda / v; below this the asymptotic formulas are unreliable.
  bool long_sweep() const { return t_final >= Scalar(10) * lambda / v; }
};

/// [[vt, lambda/2], [lambda/2, -vt]] in the diabatic basis (|psi0>, |psi1>).
template <typename Scalar>
HamiltonianOperator<Scalar> lz_hamiltonian(const LzParams<Scalar>& p, Scalar t) {
  ComplexMatrix<Scalar> h(2, 2);
  h << p.v * t, p.lambda / Scalar(2), p.lambda / Scalar(2), -p.v * t;
  return HamiltonianOperator<Scalar>(h);
}

/// exp(-pi lambda^2 / (2 hbar v)).
template <typename Scalar>
Scalar lz_closed_probability(const LzParams<Scalar>& p) {
  if (!(p.v > 0)) throw Error(ErrorCode::InvalidArgument, "LZ sweep rate must be positive");
  return std::exp(-std::numbers::pi_v<Scalar> * p.lambda * p.lambda / (Scalar(2) * p.hbar * p.v));
}

/// Asymptotic diabatic survival probability of the Hamiltonian built by
/// lz_hamiltonian: exp(-2 pi |lambda/2|^2 / (hbar |d(2vt)/dt|)) =
/// exp(-pi lambda^2 / (4 hbar v)). Differs from lz_closed_probability by a
/// factor of two in the exponent.
template <typename Scalar>
Scalar lz_exact_asymptotic_probability(const LzParams<Scalar>& p) {
  if (!(p.v > 0)) throw Error(ErrorCode::InvalidArgument, "LZ sweep rate must be positive");
  return std::exp(-std::numbers::pi_v<Scalar> * p.lambda * p.lambda / (Scalar(4) * p.hbar * p.v));
}

using LzParamsd = LzParams<double>;

}  // namespace thermoswitch
