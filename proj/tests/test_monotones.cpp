#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_support.hpp"

using namespace thermoswitch;
using namespace thermoswitch::testing;

namespace {

MoleculeParamsd kinetic_molecule() {
  MoleculeParamsd mp;
  mp.e1 = 30.0;
  mp.w1 = 30.0 - 1.5;
  return mp;
}

ComplexVectord ket(std::initializer_list<std::complex<double>> amps) {
  ComplexVectord v(Index(amps.size()));
  Index i = 0;
  for (auto a : amps) v(i++) = a;
  return v / v.norm();
}

}  // namespace

TEST_CASE("Fisher information vanishes on states commuting with H") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const HamiltonianOperatord h(random_hermitian(rng, 3));
    const auto dec = decohere(random_density(rng, 3), h);
    CHECK(fisher_information(dec, h) < 1e-10);
  }
  CHECK(fisher_information(DensityOperatord::maximally_mixed(2), HamiltonianOperatord(sigma_z())) == 0.0);
}

TEST_CASE("Fisher information of a pure state is four times the energy variance") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 2 + trial % 4;
    const HamiltonianOperatord h(random_hermitian(rng, d));
    const ComplexVectord psi = random_ket(rng, d);
    const double mean = (psi.adjoint() * h.matrix() * psi)(0, 0).real();
    const double second = (psi.adjoint() * h.matrix() * h.matrix() * psi)(0, 0).real();
    const double f = fisher_information(DensityOperatord::pure(psi), h);
    CHECK(std::abs(f - 4.0 * (second - mean * mean)) < 1e-10 * std::max(1.0, f));
  }
}

TEST_CASE("Fisher information of 0.7|+><+| + 0.3|-><-| against sigma_z") {
  // In the |+-> basis <+|sigma_z|-> = 1, so the sum is 2 * 2 * (0.7 - 0.3)^2 / 1 = 0.64.
  ComplexMatrixd m(2, 2);
  m << 0.5, 0.2, 0.2, 0.5;
  CHECK(fisher_information(DensityOperatord(m), HamiltonianOperatord(sigma_z())) ==
        doctest::Approx(0.64).epsilon(1e-13));
}

TEST_CASE("Fisher information is nonnegative and blind to energy shifts") {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 2 + trial % 3;
    const ComplexMatrixd hm = random_hermitian(rng, d);
    const auto rho = random_density(rng, d);
    const double c = uniform(rng, -50, 50);
    const double f = fisher_information(rho, HamiltonianOperatord(hm));
    const double g = fisher_information(rho, HamiltonianOperatord(ComplexMatrixd(hm + c * ComplexMatrixd::Identity(d, d))));
    CHECK(f >= 0.0);
    CHECK(std::abs(f - g) < 1e-9 * std::max(1.0, f));
  }
}

TEST_CASE("Fisher information rejects mismatched dimensions") {
  try {
    fisher_information(DensityOperatord::maximally_mixed(3), HamiltonianOperatord(sigma_z()));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("closed-form LZ Fisher information agrees with the general sum") {
  Rng rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    LzParamsd p;
    p.v = uniform(rng, 0.05, 10);
    p.lambda = uniform(rng, 0.2, 3);
    p.t_final = uniform(rng, 1, 60);
    const auto rho = random_density(rng, 2);
    const double general = fisher_information(rho, lz_hamiltonian(p, p.t_final));
    const double closed = fisher_lz_formula(rho, p);
    CHECK(std::abs(general - closed) < 1e-9 * std::max(1.0, general));
  }
  LzParamsd p;
  ComplexVectord psi1(2);
  psi1 << 0, 1;
  CHECK(fisher_lz_formula(DensityOperatord::pure(psi1), p) == doctest::Approx(p.lambda * p.lambda).epsilon(1e-15));
  CHECK(fisher_lz_formula(DensityOperatord::maximally_mixed(2), p) == 0.0);
  CHECK_THROWS_AS(fisher_lz_formula(DensityOperatord::maximally_mixed(3), p), Error);
}

TEST_CASE("scaled Fisher bound peaks at exactly 1") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    LzParamsd p;
    p.lambda = lambda;
    p.v = fisher_bound_peak_rate(lambda);
    CHECK(lz_closed_probability(p) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fisher_bound_scaled(p) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fisher_bound(p) == doctest::Approx(4 * p.v * p.v * p.t_final * p.t_final).epsilon(1e-14));
    for (double s : {0.5, 0.9, 1.1, 2.0}) {
      LzParamsd q = p;
      q.v = p.v * s;
      CHECK(fisher_bound_scaled(q) < 1.0);
    }
  }
  LzParamsd slow;
  slow.v = 1e-3;
  CHECK(fisher_bound(slow) < 1e-300);
}

TEST_CASE("a state diagonal in the energy basis is a single zero mode") {
  Rng rng(45);
  const HamiltonianOperatord h(random_hermitian(rng, 3));
  const auto dec = decohere(random_density(rng, 3), h);
  const auto md = mode_decompose(dec, h);
  REQUIRE(md.contains(0.0));
  CHECK(max_abs<double>(ComplexMatrixd(md.at(0.0).component - dec.matrix())) < 1e-12);
  CHECK(total_coherence_one_norm(md) < 1e-12);
}

TEST_CASE("an even superposition across the gap carries unit coherence") {
  RealVectord e(2);
  e << 0.0, 30.0;
  const auto h = HamiltonianOperatord::diagonal(e);
  const auto md = mode_decompose(DensityOperatord::pure(ket({1.0, 1.0})), h);
  CHECK(md.modes().size() == 3);
  CHECK(mode_one_norm(md, 30.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mode_one_norm(md, -30.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mode_pair_one_norm(md, 30.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(total_coherence_one_norm(md) == doctest::Approx(1.0).epsilon(1e-14));
  try {
    md.at(1.0);
    FAIL("expected UnknownMode");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::UnknownMode);
  }
}

TEST_CASE("mode components sum to the state and pair up as adjoints") {
  Rng rng(46);
  const auto sys = four_level_system(kinetic_molecule());
  const auto h = sys.hamiltonian();
  for (int trial = 0; trial < 50; ++trial) {
    const auto rho = random_density(rng, 4);
    const auto md = mode_decompose(rho, h);
    CHECK(max_abs<double>(ComplexMatrixd(md.reconstruct() - rho.matrix())) < 1e-12);
    for (const auto& m : md.modes()) {
      REQUIRE(md.contains(-m.omega));
      CHECK(max_abs<double>(ComplexMatrixd(md.at(-m.omega).component - m.component.adjoint())) < 1e-14);
    }
    // Equal gaps 1.5 (E-(pi) - E-(0), E+(pi) - E+(0)) and 30 share a mode.
    CHECK(md.modes().size() == 9);
  }
}

TEST_CASE("mode_decompose handles rotated bases and rejects degenerate Hamiltonians") {
  Rng rng(47);
  const HamiltonianOperatord h(random_hermitian(rng, 3));
  const auto rho = random_density(rng, 3);
  const auto md = mode_decompose(rho, h);
  CHECK(md.modes().size() == 7);
  CHECK(max_abs<double>(ComplexMatrixd(md.reconstruct() - rho.matrix())) < 1e-12);
  CHECK(max_abs<double>(ComplexMatrixd(md.at(0.0).component - decohere(rho, h).matrix())) < 1e-12);

  RealVectord e(3);
  e << 0.0, 1.0, 1.0;
  try {
    mode_decompose(rho, HamiltonianOperatord::diagonal(e));
    FAIL("expected DegenerateSpectrum");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DegenerateSpectrum);
  }
}

TEST_CASE("trace norm of simple operators") {
  CHECK(trace_norm<double>(ComplexMatrixd::Zero(3, 3)) == 0.0);
  ComplexMatrixd r = ComplexMatrixd::Zero(3, 3);
  r(0, 2) = std::complex<double>(0.3, -0.4);
  CHECK(trace_norm<double>(r) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(trace_norm<double>(sigma_z()) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("Fisher information and mode norms never grow along detailed-balance trajectories") {
  Rng rng(48);
  const auto sys = four_level_system(kinetic_molecule());
  const auto h = sys.hamiltonian();
  const auto spec = kinetic_spec(sys, KineticRatesd{});
  std::vector<DensityOperatord> starts;
  starts.push_back(DensityOperatord::pure(ket({1.0, 0.0, 1.0, 0.0})));
  starts.push_back(DensityOperatord::pure(ket({1.0, 1.0, 1.0, 1.0})));
  for (int k = 0; k < 3; ++k) starts.push_back(random_density(rng, 4));
  for (const auto& rho0 : starts) {
    const auto traj = evolve(rho0, spec, 0.0, 10.0, 1e-3, 20);
    double prev_f = fisher_information(traj.states.front(), h);
    auto prev_md = mode_decompose(traj.states.front(), h);
    int violations = 0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
      const double f = fisher_information(traj.states[i], h);
      if (f > prev_f + 1e-8) ++violations;
      const auto md = mode_decompose(traj.states[i], h);
      for (const auto& m : md.modes()) {
        if (m.omega == 0.0) continue;
        if (trace_norm<double>(m.component) > trace_norm<double>(prev_md.at(m.omega).component) + 1e-9) ++violations;
      }
      prev_f = f;
      prev_md = md;
    }
    CHECK(violations == 0);
    CHECK(fisher_information(traj.final_state(), h) < fisher_information(traj.states.front(), h));
  }
}

TEST_CASE("a single coherence mode evolves without leaking into other modes") {
  Rng rng(49);
  const auto sys = four_level_system(kinetic_molecule());
  const auto h = sys.hamiltonian();
  const auto spec = kinetic_spec(sys, KineticRatesd{});
  const auto md = mode_decompose(random_density(rng, 4), h);
  for (const auto& m : md.modes()) {
    const ComplexMatrixd out = propagate<double>(m.component, spec, 0.0, 2.0, 1e-3);
    const auto after = mode_decompose<double>(out, h);
    double leak = 0;
    for (const auto& n : after.modes())
      if (std::abs(n.omega - m.omega) > after.gap_tolerance()) leak = std::max(leak, trace_norm<double>(n.component));
    CHECK(leak <= 1e-10);
  }
}

TEST_CASE("d_max basic values") {
  Rng rng(50);
  const auto sigma = random_density(rng, 3);
  CHECK(std::abs(d_max(sigma, sigma)) < 1e-12);
  RealVectord diag(3);
  diag << 0.5, 0.2, 0.3;
  CHECK(d_max(DensityOperatord::diagonal(diag), DensityOperatord::diagonal(diag)) == 0.0);

  RealVectord s(3);
  s << 0.6, 0.3, 0.1;
  CHECK(d_max(DensityOperatord::maximally_mixed(3), DensityOperatord::diagonal(s)) ==
        doctest::Approx(std::log(1.0 / (3 * 0.1))).epsilon(1e-13));

  // Two levels 0 and E at beta = 1: pure excited state against Gibbs gives E + log Z.
  const double e = 2.5, z = 1 + std::exp(-e);
  RealVectord g(2), ex(2);
  g << 1 / z, std::exp(-e) / z;
  ex << 0, 1;
  CHECK(d_max(DensityOperatord::diagonal(ex), DensityOperatord::diagonal(g)) == doctest::Approx(e + std::log(z)).epsilon(1e-13));
}

TEST_CASE("d_max is nonnegative, zero only at equality and unitarily invariant") {
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 2 + trial % 3;
    const auto rho = random_density(rng, d);
    const auto sigma = random_density(rng, d);
    const double dm = d_max(rho, sigma);
    CHECK(dm > 0.0);
    const ComplexMatrixd u = unitary_step(HamiltonianOperatord(random_hermitian(rng, d)), 1.0, 1.0);
    const DensityOperatord rr(hermitian_part<double>(ComplexMatrixd(u * rho.matrix() * u.adjoint())));
    const DensityOperatord ss(hermitian_part<double>(ComplexMatrixd(u * sigma.matrix() * u.adjoint())));
    CHECK(std::abs(d_max(rr, ss) - dm) < 1e-9 * std::max(1.0, dm));
  }
}

TEST_CASE("d_max rejects weight outside the support of sigma") {
  RealVectord s(2), r(2);
  s << 1, 0;
  r << 0.5, 0.5;
  try {
    d_max(DensityOperatord::diagonal(r), DensityOperatord::diagonal(s));
    FAIL("expected SupportViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SupportViolation);
  }
  // Inside the support the reduced problem is well defined.
  r << 1, 0;
  CHECK(d_max(DensityOperatord::diagonal(r), DensityOperatord::diagonal(s)) == doctest::Approx(0.0));
}

TEST_CASE("w_min agrees with the level formula on random populations") {
  Rng rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    MoleculeParamsd mp;
    mp.e1 = uniform(rng, 1, 40);
    mp.w1 = mp.e1 - uniform(rng, 0.01, 5);
    mp.beta = uniform(rng, 0.2, 3);
    const auto sys = four_level_system(mp);
    const auto p = trial % 2 ? random_populations(rng, 4) : random_sparse_populations(rng, 4);
    const auto w = w_min(p, sys);
    CHECK(std::abs(w.w_min - w_min_level_formula(p, sys)) <= 1e-12 * std::max(1.0, std::abs(w.w_min)));
    CHECK(w.w_min == doctest::Approx(w.d_max / sys.beta()).epsilon(1e-15));
    CHECK(std::abs(std::log(w.per_level_rescaled.maxCoeff()) - w.d_max) < 1e-12 * std::max(1.0, w.d_max));
  }
}

TEST_CASE("w_min of the Gibbs state is exactly zero and of the pure upper level is E1 + log Z") {
  const auto sys = four_level_system(kinetic_molecule());
  const auto gibbs = w_min(PopulationVectord::gibbs(sys), sys);
  CHECK(gibbs.w_min == 0.0);
  CHECK(gibbs.d_max == 0.0);
  const auto pure = w_min(PopulationVectord(std::vector<double>{0, 0, 1, 0}), sys);
  CHECK(pure.w_min == doctest::Approx(30.0 + std::log(sys.partition_function())).epsilon(1e-14));

  // Half on each of E+(0) and E-(0): the D_max route and the level formula coincide.
  const PopulationVectord half(std::vector<double>{0.5, 0, 0.5, 0});
  CHECK(std::abs(w_min(half, sys).w_min - w_min_level_formula(half, sys)) < 1e-12);
  CHECK_THROWS_AS(w_min(PopulationVectord(std::vector<double>{0.5, 0.5}), sys), Error);
}
