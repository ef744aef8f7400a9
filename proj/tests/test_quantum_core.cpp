#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "test_support.hpp"

using namespace thermoswitch;
using namespace thermoswitch::testing;

TEST_CASE("HamiltonianOperator rejects non-square and non-Hermitian input") {
  CHECK_THROWS_AS(HamiltonianOperatord(ComplexMatrixd::Zero(2, 3)), Error);
  ComplexMatrixd m(2, 2);
  m << 1, 2, 3, 4;
  try {
    HamiltonianOperatord h(m);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHermitian);
  }
}

TEST_CASE("eig_hermitian of a diagonal matrix returns sorted entries and a permutation basis") {
  RealVectord e(3);
  e << 2.0, -1.0, 0.5;
  const auto es = eig_hermitian(HamiltonianOperatord::diagonal(e));
  CHECK(es.eigenvalues(0) == -1.0);
  CHECK(es.eigenvalues(1) == 0.5);
  CHECK(es.eigenvalues(2) == 2.0);
  CHECK(std::abs(es.eigenvectors(1, 0)) == 1.0);
}

TEST_CASE("eig_hermitian of sigma_x gives +-1 with the symmetric and antisymmetric vectors") {
  const auto es = eig_hermitian<double>(sigma_x());
  CHECK(es.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(es.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-15));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(es.eigenvectors(0, 1)) - r) < 1e-14);
  CHECK(std::abs(es.eigenvectors(0, 1) - es.eigenvectors(1, 1)) < 1e-14);
}

TEST_CASE("eig_hermitian matches closed-form 2x2 eigenvalues") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = uniform(rng, -5, 5), d = uniform(rng, -5, 5);
    const std::complex<double> b(uniform(rng, -3, 3), uniform(rng, -3, 3));
    ComplexMatrixd h(2, 2);
    h << a, b, std::conj(b), d;
    const auto es = eig_hermitian<double>(h);
    const double mean = (a + d) / 2, half = std::sqrt((a - d) * (a - d) / 4 + std::norm(b));
    CHECK(std::abs(es.eigenvalues(0) - (mean - half)) < 1e-12);
    CHECK(std::abs(es.eigenvalues(1) - (mean + half)) < 1e-12);
  }
}

TEST_CASE("eig_hermitian agrees with Eigen's SelfAdjointEigenSolver on random matrices") {
  Rng rng(7);
  for (Index d : {1, 2, 3, 4, 6, 8}) {
    for (int trial = 0; trial < 25; ++trial) {
      const ComplexMatrixd h = random_hermitian(rng, d, uniform(rng, 0.1, 10.0));
      const auto es = eig_hermitian<double>(h);
      Eigen::SelfAdjointEigenSolver<ComplexMatrixd> oracle(h);
      const double scale = std::max(1.0, max_abs<double>(h));
      CHECK((es.eigenvalues - oracle.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12 * scale);
      CHECK(max_abs<double>(ComplexMatrixd(es.reconstruct() - h)) < tolerance::reconstruction * scale);
      const ComplexMatrixd gram = es.eigenvectors.adjoint() * es.eigenvectors;
      CHECK(max_abs<double>(ComplexMatrixd(gram - ComplexMatrixd::Identity(d, d))) < 1e-12);
    }
  }
}

TEST_CASE("eig_hermitian resolves eigenvalues of a graded matrix to relative accuracy") {
  // A slow level weakly coupled to a fast one, as in a symmetrized rate matrix with an e^-30 barrier.
  const double w = std::exp(-30.0);
  ComplexMatrixd s(3, 3);
  s << -w, std::sqrt(w) * 1e-3, 0, std::sqrt(w) * 1e-3, -1.0, 0, 0, 0, -2.0;
  const auto es = eig_hermitian<double>(s);
  // Exact: the small eigenvalue of [[-w, c], [c, -1]] is -w + c^2 / (1 - w) + O(c^4).
  const double c2 = w * 1e-6;
  const double small = -w + c2 / (1.0 - w);
  CHECK(std::abs(es.eigenvalues(2) - small) < 1e-10 * std::abs(small));
}

TEST_CASE("eig_hermitian is bit-reproducible") {
  Rng rng(3);
  const ComplexMatrixd h = random_hermitian(rng, 5);
  const auto a = eig_hermitian<double>(h);
  const auto b = eig_hermitian<double>(h);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.eigenvectors == b.eigenvectors);
}

TEST_CASE("DensityOperator validation") {
  ComplexMatrixd m(2, 2);
  m << 0.5, 0.0, 0.0, 0.4;
  CHECK_THROWS_AS(DensityOperatord{m}, Error);
  m << 1.2, 0.0, 0.0, -0.2;
  try {
    DensityOperatord rho(m);
    FAIL("expected InvalidState");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidState);
  }
  m << 0.5, 0.7, 0.7, 0.5;  // eigenvalues 1.2 and -0.2
  CHECK_THROWS_AS(DensityOperatord{m}, Error);
  m << 0.5, 0.5, 0.5, 0.5;
  CHECK_NOTHROW(DensityOperatord{m});
}

TEST_CASE("pure states have purity 1 and the maximally mixed state has purity 1/d") {
  Rng rng(5);
  for (Index d : {2, 3, 5}) {
    CHECK(DensityOperatord::pure(random_ket(rng, d)).purity() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(DensityOperatord::maximally_mixed(d).purity() == doctest::Approx(1.0 / double(d)).epsilon(1e-15));
  }
}

TEST_CASE("populations_in rotates into the given basis") {
  const DensityOperatord rho = DensityOperatord::diagonal(RealVectord::Unit(2, 0));
  ComplexMatrixd hadamard(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  hadamard << r, r, r, -r;
  const RealVectord p = rho.populations_in(hadamard);
  CHECK(p(0) == doctest::Approx(0.5));
  CHECK(p(1) == doctest::Approx(0.5));
}

TEST_CASE("gibbs_state of a diagonal Hamiltonian is the Boltzmann distribution") {
  RealVectord e(3);
  e << 0.0, 1.0, 2.5;
  const double beta = 0.7;
  const auto g = gibbs_state(HamiltonianOperatord::diagonal(e), beta);
  const double z = 1.0 + std::exp(-0.7) + std::exp(-1.75);
  CHECK(g.population(0) == doctest::Approx(1.0 / z).epsilon(1e-14));
  CHECK(g.population(2) == doctest::Approx(std::exp(-1.75) / z).epsilon(1e-14));
}

TEST_CASE("gibbs_state at beta = 0 is maximally mixed and commutes with H") {
  Rng rng(9);
  const HamiltonianOperatord h(random_hermitian(rng, 4));
  const auto g0 = gibbs_state(h, 0.0);
  CHECK(max_abs<double>(ComplexMatrixd(g0.matrix() - DensityOperatord::maximally_mixed(4).matrix())) < 1e-14);
  const auto g = gibbs_state(h, 1.3);
  CHECK(max_abs<double>(commutator<double>(g.matrix(), h.matrix())) < 1e-13);
  CHECK_THROWS_AS(gibbs_state(h, -1.0), Error);
}

TEST_CASE("gibbs_state survives large energy offsets") {
  RealVectord e(2);
  e << 1000.0, 1001.0;
  const auto g = gibbs_state(HamiltonianOperatord::diagonal(e), 1.0);
  CHECK(g.population(0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-14));
}

TEST_CASE("decohere keeps populations in the energy basis and removes coherences") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const HamiltonianOperatord h(random_hermitian(rng, 3));
    const DensityOperatord rho = random_density(rng, 3);
    const auto dec = decohere(rho, h);
    const auto es = eig_hermitian(h);
    const ComplexMatrixd in_basis = es.eigenvectors.adjoint() * dec.matrix() * es.eigenvectors;
    const ComplexMatrixd orig = es.eigenvectors.adjoint() * rho.matrix() * es.eigenvectors;
    for (Index i = 0; i < 3; ++i) {
      CHECK(std::abs(in_basis(i, i) - orig(i, i)) < 1e-12);
      for (Index j = 0; j < 3; ++j)
        if (i != j) CHECK(std::abs(in_basis(i, j)) < 1e-12);
    }
    CHECK(max_abs<double>(commutator<double>(dec.matrix(), h.matrix())) < 1e-11);
    // Idempotent.
    CHECK(max_abs<double>(ComplexMatrixd(decohere(dec, h).matrix() - dec.matrix())) < 1e-12);
  }
}

TEST_CASE("decohere on a degenerate Hamiltonian follows the policy") {
  RealVectord e(3);
  e << 0.0, 1.0, 1.0;
  const auto h = HamiltonianOperatord::diagonal(e);
  ComplexMatrixd m = ComplexMatrixd::Constant(3, 3, 1.0 / 3.0);
  const DensityOperatord rho(m);
  try {
    decohere(rho, h);
    FAIL("expected DegenerateSpectrum");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DegenerateSpectrum);
  }
  const auto grouped = decohere(rho, h, DegeneracyPolicy::GroupByEnergy);
  CHECK(std::abs(grouped.matrix()(1, 2) - 1.0 / 3.0) < 1e-14);
  CHECK(std::abs(grouped.matrix()(0, 1)) < 1e-14);
  CHECK_THROWS_AS(decohere(DensityOperatord::maximally_mixed(2), h), Error);
}
