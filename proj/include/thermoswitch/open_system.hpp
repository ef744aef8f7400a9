#pragma once

// Lindblad master-equation integration: the vectorized generator, a
// fixed-step RK4 propagator, detailed-balance jump construction, an exact
// population propagator for long times, and the dissipative Landau-Zener run.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "thermoswitch/error.hpp"
#include "thermoswitch/levels.hpp"
#include "thermoswitch/lz_params.hpp"
#include "thermoswitch/monotones.hpp"
#include "thermoswitch/quantum_core.hpp"
#include "thermoswitch/thermomaj.hpp"

namespace thermoswitch {

namespace tolerance {
// A sampled state needing a larger trace/Hermiticity repair than this means dt is too coarse.
inline constexpr double step_correction = 1e-4;
inline constexpr double detailed_balance_symmetry = 1e-9;
}  // namespace tolerance

template <typename Scalar>
struct JumpOperator {
  ComplexMatrix<Scalar> matrix;
  Scalar rate;

  JumpOperator(ComplexMatrix<Scalar> b, Scalar gamma) : matrix(std::move(b)), rate(gamma) {
    if (!(rate >= Scalar(0)) || !std::isfinite(double(rate)))
      throw Error(ErrorCode::NegativeRate, "jump rate must be nonnegative and finite");
    if (matrix.rows() != matrix.cols()) throw Error(ErrorCode::DimensionMismatch, "jump operator must be square");
  }
};

/// Hamiltonian (fixed, affine in t, or a general function of t), jump
/// operators and hbar. All operators share one dimension.
template <typename Scalar>
class LindbladSpec {
 public:
  using Generator = std::function<HamiltonianOperator<Scalar>(Scalar)>;

  LindbladSpec(HamiltonianOperator<Scalar> h, std::vector<JumpOperator<Scalar>> jumps, Scalar hbar = 1)
      : dim_(h.dim()), h0_(h.matrix()), jumps_(std::move(jumps)), hbar_(hbar) {
    validate();
  }

  LindbladSpec(Index dim, Generator h_of_t, std::vector<JumpOperator<Scalar>> jumps, Scalar hbar = 1)
      : dim_(dim), generator_(std::move(h_of_t)), jumps_(std::move(jumps)), hbar_(hbar) {
    if (!generator_) throw Error(ErrorCode::InvalidArgument, "empty Hamiltonian generator");
    if (generator_(Scalar(0)).dim() != dim_)
      throw Error(ErrorCode::DimensionMismatch, "generator dimension differs from the declared one");
    validate();
  }

  /// H(t) = h0 + t h1.
  static LindbladSpec affine(HamiltonianOperator<Scalar> h0, HamiltonianOperator<Scalar> h1,
                             std::vector<JumpOperator<Scalar>> jumps, Scalar hbar = 1) {
    if (h0.dim() != h1.dim()) throw Error(ErrorCode::DimensionMismatch, "affine Hamiltonian parts differ in dimension");
    LindbladSpec s(std::move(h0), std::move(jumps), hbar);
    s.h1_ = h1.matrix();
    return s;
  }

  Index dim() const noexcept { return dim_; }
  Scalar hbar() const noexcept { return hbar_; }
  const std::vector<JumpOperator<Scalar>>& jumps() const noexcept { return jumps_; }
  bool time_dependent() const noexcept { return bool(generator_) || h1_.has_value(); }
  bool is_affine() const noexcept { return !generator_; }

  ComplexMatrix<Scalar> hamiltonian_at(Scalar t) const {
    if (generator_) return generator_(t).matrix();
    if (h1_) return h0_ + t * *h1_;
    return h0_;
  }
  /// Constant and linear parts; only meaningful when is_affine().
  const ComplexMatrix<Scalar>& constant_part() const noexcept { return h0_; }
  ComplexMatrix<Scalar> linear_part() const {
    return h1_ ? *h1_ : ComplexMatrix<Scalar>(ComplexMatrix<Scalar>::Zero(dim_, dim_));
  }

 private:
  void validate() const {
    if (!(hbar_ > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "hbar must be positive");
    for (const auto& j : jumps_)
      if (j.matrix.rows() != dim_) throw Error(ErrorCode::DimensionMismatch, "jump operator dimension mismatch");
  }

  Index dim_;
  ComplexMatrix<Scalar> h0_;
  std::optional<ComplexMatrix<Scalar>> h1_;
  Generator generator_;
  std::vector<JumpOperator<Scalar>> jumps_;
  Scalar hbar_;
};

/// -(i/hbar)[H(t), x] + sum_i G_i (B_i x B_i^dag - {B_i^dag B_i, x}/2), for any square x.
template <typename Scalar>
ComplexMatrix<Scalar> lindblad_apply(const ComplexMatrix<Scalar>& x, const LindbladSpec<Scalar>& spec, Scalar t) {
  if (x.rows() != spec.dim() || x.cols() != spec.dim())
    throw Error(ErrorCode::DimensionMismatch, "operator and Lindblad spec differ in dimension");
  const Complex<Scalar> minus_i_over_hbar(Scalar(0), -Scalar(1) / spec.hbar());
  const ComplexMatrix<Scalar> h = spec.hamiltonian_at(t);
  ComplexMatrix<Scalar> out = minus_i_over_hbar * (h * x - x * h);
  for (const auto& j : spec.jumps()) {
    if (j.rate == Scalar(0)) continue;
    const ComplexMatrix<Scalar> bdb = j.matrix.adjoint() * j.matrix;
    out += j.rate * (j.matrix * x * j.matrix.adjoint() - Scalar(0.5) * (bdb * x + x * bdb));
  }
  return out;
}

template <typename Scalar>
ComplexMatrix<Scalar> lindblad_rhs(const DensityOperator<Scalar>& rho, const LindbladSpec<Scalar>& spec, Scalar t) {
  return lindblad_apply<Scalar>(rho.matrix(), spec, t);
}

namespace detail {

template <typename Scalar>
ComplexMatrix<Scalar> kron(const ComplexMatrix<Scalar>& a, const ComplexMatrix<Scalar>& b) {
  ComplexMatrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Column-stacking vec: vec(A X B) = (B^T (x) A) vec(X).
template <typename Scalar>
ComplexMatrix<Scalar> hamiltonian_superoperator(const ComplexMatrix<Scalar>& h, Scalar hbar) {
  const Index d = h.rows();
  const ComplexMatrix<Scalar> id = ComplexMatrix<Scalar>::Identity(d, d);
  const Complex<Scalar> minus_i_over_hbar(Scalar(0), -Scalar(1) / hbar);
  return minus_i_over_hbar * (kron<Scalar>(id, h) - kron<Scalar>(h.transpose(), id));
}

template <typename Scalar>
ComplexMatrix<Scalar> dissipator_superoperator(const std::vector<JumpOperator<Scalar>>& jumps, Index d) {
  const ComplexMatrix<Scalar> id = ComplexMatrix<Scalar>::Identity(d, d);
  ComplexMatrix<Scalar> out = ComplexMatrix<Scalar>::Zero(d * d, d * d);
  for (const auto& j : jumps) {
    if (j.rate == Scalar(0)) continue;
    const ComplexMatrix<Scalar> bdb = j.matrix.adjoint() * j.matrix;
    out += j.rate * (kron<Scalar>(j.matrix.conjugate(), j.matrix) -
                     Scalar(0.5) * (kron<Scalar>(id, bdb) + kron<Scalar>(bdb.transpose(), id)));
  }
  return out;
}

}  // namespace detail

/// Fixed-step classical RK4 on vec(x). Works for any square operator, not only
/// density matrices.
template <typename Scalar>
class LindbladPropagator {
 public:
  explicit LindbladPropagator(const LindbladSpec<Scalar>& spec)
      : spec_(spec), d_(spec.dim()), dissipator_(detail::dissipator_superoperator<Scalar>(spec.jumps(), spec.dim())) {
    if (spec_.is_affine()) {
      l0_ = detail::hamiltonian_superoperator<Scalar>(spec_.constant_part(), spec_.hbar()) + dissipator_;
      l1_ = detail::hamiltonian_superoperator<Scalar>(spec_.linear_part(), spec_.hbar());
    }
    const Index n = d_ * d_;
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->resize(n);
  }

  /// Generator superoperator at time t.
  ComplexMatrix<Scalar> generator(Scalar t) const {
    if (spec_.is_affine()) return l0_ + t * l1_;
    return detail::hamiltonian_superoperator<Scalar>(spec_.hamiltonian_at(t), spec_.hbar()) + dissipator_;
  }

  /// One RK4 step of length h from time t, in place on vec(x).
  void step(ComplexVector<Scalar>& x, Scalar t, Scalar h) {
    const bool moving = spec_.time_dependent();
    const ComplexMatrix<Scalar>& la = stage(t, 0, moving);
    k1_.noalias() = la * x;
    const ComplexMatrix<Scalar>& lb = stage(t + h / Scalar(2), 1, moving);
    tmp_ = x + (h / Scalar(2)) * k1_;
    k2_.noalias() = lb * tmp_;
    tmp_ = x + (h / Scalar(2)) * k2_;
    k3_.noalias() = lb * tmp_;
    const ComplexMatrix<Scalar>& lc = stage(t + h, 2, moving);
    tmp_ = x + h * k3_;
    k4_.noalias() = lc * tmp_;
    x += (h / Scalar(6)) * (k1_ + Scalar(2) * k2_ + Scalar(2) * k3_ + k4_);
  }

  Index dim() const noexcept { return d_; }

 private:
  const ComplexMatrix<Scalar>& stage(Scalar t, int slot, bool moving) {
    if (!moving) {
      if (cache_[0].size() == 0) cache_[0] = generator(Scalar(0));
      return cache_[0];
    }
    cache_[slot] = generator(t);
    return cache_[slot];
  }

  LindbladSpec<Scalar> spec_;
  Index d_;
  ComplexMatrix<Scalar> dissipator_;
  ComplexMatrix<Scalar> l0_, l1_;
  ComplexMatrix<Scalar> cache_[3];
  ComplexVector<Scalar> k1_, k2_, k3_, k4_, tmp_;
};

namespace detail {

// Number of equal steps covering [t0, t1] with step at most dt.
template <typename Scalar>
long long step_count(Scalar t0, Scalar t1, Scalar dt) {
  if (!(t1 > t0)) throw Error(ErrorCode::InvalidArgument, "integration needs t1 > t0");
  if (!(dt > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "integration needs dt > 0");
  const Scalar ratio = (t1 - t0) / dt;
  const long long rounded = std::llround(ratio);
  if (rounded >= 1 && std::abs(Scalar(rounded) - ratio) <= Scalar(1e-9) * ratio) return rounded;
  return std::max<long long>(1, static_cast<long long>(std::ceil(ratio)));
}

template <typename Scalar>
ComplexVector<Scalar> vec(const ComplexMatrix<Scalar>& m) {
  return Eigen::Map<const ComplexVector<Scalar>>(m.data(), m.size());
}

template <typename Scalar>
ComplexMatrix<Scalar> unvec(const ComplexVector<Scalar>& v, Index d) {
  return Eigen::Map<const ComplexMatrix<Scalar>>(v.data(), d, d);
}

}  // namespace detail

/// Propagates an arbitrary operator (e.g. a single coherence mode) with no
/// projection onto the state space.
template <typename Scalar>
ComplexMatrix<Scalar> propagate(const ComplexMatrix<Scalar>& x0, const LindbladSpec<Scalar>& spec, Scalar t0, Scalar t1,
                                Scalar dt) {
  if (x0.rows() != spec.dim() || x0.cols() != spec.dim())
    throw Error(ErrorCode::DimensionMismatch, "operator and Lindblad spec differ in dimension");
  const long long n = detail::step_count(t0, t1, dt);
  const Scalar h = (t1 - t0) / Scalar(n);
  LindbladPropagator<Scalar> prop(spec);
  ComplexVector<Scalar> x = detail::vec<Scalar>(x0);
  for (long long k = 0; k < n; ++k) prop.step(x, t0 + Scalar(k) * h, h);
  return detail::unvec<Scalar>(x, spec.dim());
}

template <typename Scalar>
struct Trajectory {
  std::vector<Scalar> times;
  std::vector<DensityOperator<Scalar>> states;
  std::vector<RealVector<Scalar>> populations;  // in the columns of `basis`
  std::vector<Scalar> corrections;              // trace/Hermiticity repair applied at each sample
  ComplexMatrix<Scalar> basis;

  std::size_t size() const noexcept { return times.size(); }
  const DensityOperator<Scalar>& final_state() const { return states.back(); }
};

/// RK4 from t0 to t1 with equal steps no longer than dt. The state is sampled
/// at step 0, every sample_every steps and at t1; each sample is
/// re-Hermitized and trace-renormalized in place.
template <typename Scalar>
Trajectory<Scalar> evolve(const DensityOperator<Scalar>& rho0, const LindbladSpec<Scalar>& spec, Scalar t0, Scalar t1,
                          Scalar dt, long long sample_every,
                          const std::optional<ComplexMatrix<Scalar>>& basis = std::nullopt) {
  if (rho0.dim() != spec.dim()) throw Error(ErrorCode::DimensionMismatch, "initial state and spec differ in dimension");
  if (sample_every < 1) throw Error(ErrorCode::InvalidArgument, "sample_every must be positive");
  const Index d = spec.dim();
  const long long n = detail::step_count(t0, t1, dt);
  const Scalar h = (t1 - t0) / Scalar(n);

  Trajectory<Scalar> traj;
  traj.basis = basis ? *basis : ComplexMatrix<Scalar>(ComplexMatrix<Scalar>::Identity(d, d));
  if (traj.basis.rows() != d || traj.basis.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, "population basis has the wrong dimension");

  auto record = [&](Scalar t, ComplexVector<Scalar>& x) {
    const ComplexMatrix<Scalar> raw = detail::unvec<Scalar>(x, d);
    if (!raw.allFinite()) throw Error(ErrorCode::StepTooLarge, "integrator produced non-finite entries");
    ComplexMatrix<Scalar> m = hermitian_part<Scalar>(raw);
    const Scalar tr = m.trace().real();
    const Scalar correction = std::max(std::abs(tr - Scalar(1)), max_abs<Scalar>(ComplexMatrix<Scalar>(raw - m)));
    if (!(correction <= Scalar(tolerance::step_correction)))
      throw Error(ErrorCode::StepTooLarge, "sample correction " + std::to_string(double(correction)) + " at t=" +
                                               std::to_string(double(t)));
    m /= tr;
    try {
      traj.states.emplace_back(m, Scalar(tolerance::step_correction));
    } catch (const Error& e) {
      throw Error(ErrorCode::StepTooLarge, std::string("sampled state left the state space: ") + e.what());
    }
    traj.times.push_back(t);
    traj.corrections.push_back(correction);
    traj.populations.push_back(traj.states.back().populations_in(traj.basis));
    x = detail::vec<Scalar>(m);
  };

  LindbladPropagator<Scalar> prop(spec);
  ComplexVector<Scalar> x = detail::vec<Scalar>(rho0.matrix());
  record(t0, x);
  for (long long k = 1; k <= n; ++k) {
    prop.step(x, t0 + Scalar(k - 1) * h, h);
    if (k % sample_every == 0 || k == n) record(k == n ? t1 : t0 + Scalar(k) * h, x);
  }
  return traj;
}

template <typename Scalar>
struct BaseRate {
  std::string from;
  std::string to;
  Scalar gamma;
};

/// For each listed downhill pair: |to><from| at rate gamma and |from><to| at
/// gamma e^{-beta (E_from - E_to)}.
template <typename Scalar>
std::vector<JumpOperator<Scalar>> detailed_balance_jumps(const LevelSystem<Scalar>& sys,
                                                         const std::vector<BaseRate<Scalar>>& base_rates) {
  std::vector<JumpOperator<Scalar>> out;
  const Index n = sys.size();
  for (const auto& r : base_rates) {
    const Index from = sys.index_of(r.from);
    const Index to = sys.index_of(r.to);
    if (!(r.gamma >= Scalar(0))) throw Error(ErrorCode::NegativeRate, "rate for " + r.from + " -> " + r.to);
    if (from == to) throw Error(ErrorCode::InvalidArgument, "transition needs two distinct levels");
    ComplexMatrix<Scalar> down = ComplexMatrix<Scalar>::Zero(n, n);
    down(to, from) = Scalar(1);
    ComplexMatrix<Scalar> up = down.transpose();
    const Scalar reverse = r.gamma * std::exp(-sys.beta() * (sys.energy(from) - sys.energy(to)));
    out.emplace_back(std::move(down), r.gamma);
    out.emplace_back(std::move(up), reverse);
  }
  return out;
}

/// Classical rate matrix K with dp/dt = K p, for jumps that are each a single
/// transition |a><b| (a != b).
template <typename Scalar>
RealMatrix<Scalar> pauli_rate_matrix(const std::vector<JumpOperator<Scalar>>& jumps, Index n) {
  RealMatrix<Scalar> k = RealMatrix<Scalar>::Zero(n, n);
  for (const auto& j : jumps) {
    if (j.matrix.rows() != n) throw Error(ErrorCode::DimensionMismatch, "jump operator dimension mismatch");
    Index a = -1, b = -1, nonzero = 0;
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c)
        if (j.matrix(r, c) != Complex<Scalar>(0)) {
          a = r;
          b = c;
          ++nonzero;
        }
    if (nonzero == 0 || j.rate == Scalar(0)) continue;
    if (nonzero != 1 || a == b)
      throw Error(ErrorCode::InvalidArgument, "population propagation needs single-transition jump operators");
    const Scalar w = j.rate * std::norm(j.matrix(a, b));
    k(a, b) += w;
    k(b, b) -= w;
  }
  return k;
}

/// Exact solution of dp/dt = K p for detailed-balance rates. K is symmetrized
/// with the Boltzmann weights and diagonalized once, so any t costs the same;
/// this reaches the very long times that uphill rates of order e^{-beta E1}
/// need.
template <typename Scalar>
class PopulationPropagator {
 public:
  PopulationPropagator(const LevelSystem<Scalar>& sys, const std::vector<JumpOperator<Scalar>>& jumps)
      : n_(sys.size()), sqrt_g_(sys.boltzmann_weights().array().sqrt().matrix()) {
    const RealMatrix<Scalar> k = pauli_rate_matrix<Scalar>(jumps, n_);
    RealMatrix<Scalar> s(n_, n_);
    for (Index a = 0; a < n_; ++a)
      for (Index b = 0; b < n_; ++b) s(a, b) = k(a, b) * sqrt_g_(b) / sqrt_g_(a);
    const Scalar scale = std::max(Scalar(1), s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > Scalar(tolerance::detailed_balance_symmetry) * scale)
      throw Error(ErrorCode::InvalidArgument, "rates violate detailed balance");
    s = (s + s.transpose()) / Scalar(2);
    const auto es = eig_hermitian<Scalar>(s.template cast<Complex<Scalar>>());
    rates_ = es.eigenvalues.cwiseMin(Scalar(0));
    modes_ = es.eigenvectors.real();
  }

  PopulationVector<Scalar> at(const PopulationVector<Scalar>& p0, Scalar t) const {
    if (p0.size() != n_) throw Error(ErrorCode::InvalidPopulation, "population vector does not match the level system");
    if (!(t >= Scalar(0))) throw Error(ErrorCode::InvalidArgument, "propagation time must be nonnegative");
    const RealVector<Scalar> u = (p0.probs().array() / sqrt_g_.array()).matrix();
    const RealVector<Scalar> c = modes_.transpose() * u;
    const RealVector<Scalar> ct = (c.array() * (rates_.array() * t).exp()).matrix();
    RealVector<Scalar> p = ((modes_ * ct).array() * sqrt_g_.array()).matrix();
    p = p.cwiseMax(Scalar(0));
    return PopulationVector<Scalar>(RealVector<Scalar>(p / p.sum()));
  }

  /// Eigenvalues of K, all <= 0, ascending.
  const RealVector<Scalar>& rates() const noexcept { return rates_; }

  /// Smallest nonzero relaxation rate |lambda| above `floor`.
  Scalar slowest_rate(Scalar floor = Scalar(1e-300)) const {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < rates_.size(); ++i)
      if (-rates_(i) > floor) best = std::min(best, -rates_(i));
    return best;
  }

 private:
  Index n_;
  RealVector<Scalar> sqrt_g_;
  RealVector<Scalar> rates_;
  RealMatrix<Scalar> modes_;
};

/// Gibbs weights restricted to each connected component of the rate graph,
/// each component keeping the initial probability mass it started with.
template <typename Scalar>
PopulationVector<Scalar> connected_gibbs(const LevelSystem<Scalar>& sys, const std::vector<JumpOperator<Scalar>>& jumps,
                                         const PopulationVector<Scalar>& p0) {
  const Index n = sys.size();
  const RealMatrix<Scalar> k = pauli_rate_matrix<Scalar>(jumps, n);
  std::vector<Index> component(std::size_t(n), -1);
  Index count = 0;
  for (Index s = 0; s < n; ++s) {
    if (component[std::size_t(s)] >= 0) continue;
    std::vector<Index> stack{s};
    component[std::size_t(s)] = count;
    while (!stack.empty()) {
      const Index a = stack.back();
      stack.pop_back();
      for (Index b = 0; b < n; ++b)
        if (component[std::size_t(b)] < 0 && (k(a, b) > Scalar(0) || k(b, a) > Scalar(0))) {
          component[std::size_t(b)] = count;
          stack.push_back(b);
        }
    }
    ++count;
  }
  const auto& g = sys.boltzmann_weights();
  RealVector<Scalar> mass = RealVector<Scalar>::Zero(count), weight = RealVector<Scalar>::Zero(count);
  for (Index i = 0; i < n; ++i) {
    mass(component[std::size_t(i)]) += p0[i];
    weight(component[std::size_t(i)]) += g(i);
  }
  RealVector<Scalar> q(n);
  for (Index i = 0; i < n; ++i) q(i) = mass(component[std::size_t(i)]) * g(i) / weight(component[std::size_t(i)]);
  return PopulationVector<Scalar>(q);
}

template <typename Scalar>
struct EarlyTimeRates {
  Scalar trans;  // E+(0) -> E-(pi)
  Scalar cis;    // E+(0) -> E-(0)

  Scalar regime_ratio() const { return trans / cis; }
  /// The closed form assumes trans >> cis; ratios below 10 are outside it.
  bool in_regime() const { return regime_ratio() >= Scalar(10); }
};

/// rho_{-(pi)}(t) = (1 - e^{-kt}) / (1 + e^{beta (E_{-(pi)} - E_{+(0)})}) with
/// k the sum of the forward and detailed-balance reverse E+(0) <-> E-(pi)
/// rates.
template <typename Scalar>
Scalar early_time_yield(Scalar t, const LevelSystem<Scalar>& sys, const EarlyTimeRates<Scalar>& rates) {
  const Scalar e_trans = sys.energy(sys.index_of(labels::e_minus_pi));
  const Scalar e_upper = sys.energy(sys.index_of(labels::e_plus_0));
  const Scalar k = rates.trans * (Scalar(1) + std::exp(-sys.beta() * (e_upper - e_trans)));
  return (Scalar(1) - std::exp(-t * k)) / (Scalar(1) + std::exp(sys.beta() * (e_trans - e_upper)));
}

/// Each RK4 step advances the fastest phase of H(t) by at most this many radians.
inline constexpr double lz_phase_step = 0.02;

/// Default LZ step: min(1e-3 hbar/lambda, lz_phase_step hbar / ||H(t_final)||).
template <typename Scalar>
Scalar lz_default_dt(const LzParams<Scalar>& p) {
  const Scalar base = Scalar(1e-3) * p.hbar / p.lambda;
  const Scalar energy = std::hypot(p.v * p.t_final, p.lambda / Scalar(2));
  return std::min(base, Scalar(lz_phase_step) * p.hbar / energy);
}

template <typename Scalar>
LindbladSpec<Scalar> lz_lindblad_spec(const LzParams<Scalar>& p) {
  p.validate();
  ComplexMatrix<Scalar> coupling(2, 2), sweep(2, 2), dephase(2, 2);
  coupling << 0, p.lambda / Scalar(2), p.lambda / Scalar(2), 0;
  sweep << p.v, 0, 0, -p.v;
  dephase << -1, 0, 0, 1;  // |psi1><psi1| - |psi0><psi0|
  std::vector<JumpOperator<Scalar>> jumps;
  if (p.gamma > Scalar(0)) jumps.emplace_back(dephase, p.gamma);
  return LindbladSpec<Scalar>::affine(HamiltonianOperator<Scalar>(coupling), HamiltonianOperator<Scalar>(sweep),
                                      std::move(jumps), p.hbar);
}

template <typename Scalar>
struct LzRunResult {
  DensityOperator<Scalar> final_state;
  Scalar yield;   // <psi1| rho(t_final) |psi1>
  Scalar fisher;  // against H_LZ(t_final)
  std::optional<Trajectory<Scalar>> trajectory;
};

struct LzRunOptions {
  double dt = 0;              // 0 selects lz_default_dt
  long long sample_every = 0; // 0 keeps only the end points
};

/// Evolves |psi1><psi1| from -t_final to t_final under lz_hamiltonian with
/// dephasing B = |psi1><psi1| - |psi0><psi0| at rate gamma.
template <typename Scalar>
LzRunResult<Scalar> lz_dissipative_run(const LzParams<Scalar>& p, const LzRunOptions& opt = {}) {
  p.validate();
  const LindbladSpec<Scalar> spec = lz_lindblad_spec(p);
  const Scalar dt = opt.dt > 0 ? Scalar(opt.dt) : lz_default_dt(p);
  ComplexVector<Scalar> psi1(2);
  psi1 << 0, 1;
  const long long every = opt.sample_every > 0 ? opt.sample_every : std::numeric_limits<long long>::max();
  Trajectory<Scalar> traj = evolve(DensityOperator<Scalar>::pure(psi1), spec, -p.t_final, p.t_final, dt, every);
  const DensityOperator<Scalar> final_state = traj.final_state();
  const Scalar yield = final_state.population(1);
  const Scalar fisher = fisher_information(final_state, lz_hamiltonian(p, p.t_final));
  LzRunResult<Scalar> out{final_state, yield, fisher, std::nullopt};
  if (opt.sample_every > 0) out.trajectory = std::move(traj);
  return out;
}

using JumpOperatord = JumpOperator<double>;
using LindbladSpecd = LindbladSpec<double>;
using Trajectoryd = Trajectory<double>;
using BaseRated = BaseRate<double>;

}  // namespace thermoswitch
