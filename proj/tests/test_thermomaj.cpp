#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "test_support.hpp"

using namespace thermoswitch;
using namespace thermoswitch::testing;

namespace {

LevelSystemd fig_system(double beta_de, double beta_e1 = 30.0) {
  return LevelSystemd({{labels::e_minus_0, 0.0},
                       {labels::e_minus_pi, beta_de},
                       {labels::e_plus_0, beta_e1},
                       {labels::e_plus_pi, beta_e1 + beta_de}},
                      1.0);
}

PopulationVectord excitation(double eps) { return PopulationVectord(std::vector<double>{1.0 - eps, 0.0, eps, 0.0}); }

// Curve of p taken in a fixed level order, with no sorting.
LorenzCurved curve_in_order(const PopulationVectord& p, const LevelSystemd& sys, const std::vector<Index>& order) {
  std::vector<Elbow<double>> elbows{{0.0, 0.0}};
  double x = 0, y = 0;
  for (Index i : order) {
    x += sys.boltzmann_weights()(i);
    y += p[i];
    elbows.push_back({x, y});
  }
  return LorenzCurved(elbows);
}

// Brute-force yield bound: the largest target population over all final
// distributions on a 1/steps grid that the initial state thermomajorizes.
double grid_bound(const PopulationVectord& initial, const LevelSystemd& sys, Index target, int steps) {
  const LorenzCurved start = lorenz_curve(initial, sys);
  const Index n = sys.size();
  std::vector<int> counts(std::size_t(n), 0);
  double best = 0.0;
  // Enumerate compositions of `steps` into n parts.
  std::function<void(Index, int)> rec = [&](Index k, int left) {
    if (k == n - 1) {
      counts[std::size_t(k)] = left;
      RealVectord q(n);
      for (Index i = 0; i < n; ++i) q(i) = double(counts[std::size_t(i)]) / steps;
      if (q(target) <= best) return;
      if (thermomajorizes(start, lorenz_curve(PopulationVectord(q), sys))) best = q(target);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[std::size_t(k)] = c;
      rec(k + 1, left - c);
    }
  };
  rec(0, steps);
  return best;
}

}  // namespace

TEST_CASE("LevelSystem validation and the four-term partition function") {
  const auto sys = fig_system(1.5);
  CHECK(sys.partition_function() ==
        doctest::Approx(1.0 + std::exp(-1.5) + std::exp(-30.0) + std::exp(-31.5)).epsilon(1e-15));
  CHECK(sys.index_of(labels::e_plus_0) == 2);
  CHECK_THROWS_AS(sys.index_of("nope"), Error);
  CHECK_THROWS_AS(LevelSystemd({}, 1.0), Error);
  CHECK_THROWS_AS(LevelSystemd({{"a", 0.0}, {"a", 1.0}}, 1.0), Error);
  CHECK_THROWS_AS(LevelSystemd({{"a", 0.0}}, 0.0), Error);
}

TEST_CASE("PopulationVector clamps dust and rejects invalid entries") {
  const PopulationVectord p(std::vector<double>{1.0 + 1e-13, -1e-13});
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  CHECK_THROWS_AS(PopulationVectord(std::vector<double>{0.5, 0.4}), Error);
  CHECK_THROWS_AS(PopulationVectord(std::vector<double>{1.1, -0.1}), Error);
  try {
    PopulationVectord(std::vector<double>{std::nan(""), 1.0});
    FAIL("expected InvalidPopulation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPopulation);
  }
}

TEST_CASE("Lorenz curve of the Gibbs state is the diagonal y = x / Z") {
  const auto sys = fig_system(0.7, 2.0);
  const auto curve = lorenz_curve(PopulationVectord::gibbs(sys), sys);
  for (const auto& e : curve.elbows()) CHECK(std::abs(e.y - e.x / sys.partition_function()) < 1e-15);
  CHECK(curve.partition_function() == sys.partition_function());
}

TEST_CASE("Lorenz curve elbows for a hand-worked three-level example") {
  // Energies 0, 1, 2 at beta = ln 2: weights 1, 1/2, 1/4, Z = 7/4.
  const LevelSystemd sys({{"a", 0.0}, {"b", 1.0}, {"c", 2.0}}, std::log(2.0));
  const PopulationVectord p(std::vector<double>{0.2, 0.3, 0.5});
  // Rescaled values p / g: 0.2, 0.6, 2.0, so the order is c, b, a.
  const auto curve = lorenz_curve(p, sys);
  REQUIRE(curve.elbows().size() == 4);
  CHECK(curve.elbows()[1].x == doctest::Approx(0.25));
  CHECK(curve.elbows()[1].y == doctest::Approx(0.5));
  CHECK(curve.elbows()[2].x == doctest::Approx(0.75));
  CHECK(curve.elbows()[2].y == doctest::Approx(0.8));
  CHECK(curve.elbows()[3].x == 1.75);
  CHECK(curve.elbows()[3].y == 1.0);
  CHECK(curve(0.5) == doctest::Approx(0.65));
}

TEST_CASE("sorted Lorenz curve is the upper envelope of all 4! level orderings") {
  Rng rng(21);
  const auto sys = fig_system(1.5, 3.0);
  std::vector<Index> perm{0, 1, 2, 3};
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = trial % 3 == 0 ? random_sparse_populations(rng, 4) : random_populations(rng, 4);
    const auto sorted = lorenz_curve(p, sys);
    std::sort(perm.begin(), perm.end());
    bool found_equal = false;
    do {
      const auto other = curve_in_order(p, sys, perm);
      bool equal = true;
      for (const auto& e : other.elbows()) {
        CHECK(e.y <= sorted(e.x) + 1e-12);
        equal = equal && std::abs(e.y - sorted(e.x)) < 1e-12;
      }
      found_equal = found_equal || equal;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(found_equal);
  }
}

TEST_CASE("Lorenz curves are concave and end at (Z, 1)") {
  Rng rng(22);
  const auto sys = fig_system(1.5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto curve = lorenz_curve(random_sparse_populations(rng, 4), sys);
    const auto& e = curve.elbows();
    CHECK(e.back().x == sys.partition_function());
    CHECK(e.back().y == 1.0);
    double previous_slope = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < e.size(); ++k) {
      if (e[k].x - e[k - 1].x < 1e-300) continue;
      const double slope = (e[k].y - e[k - 1].y) / (e[k].x - e[k - 1].x);
      CHECK(slope <= previous_slope * (1 + 1e-9) + 1e-9);
      previous_slope = slope;
    }
  }
}

TEST_CASE("thermomajorization is reflexive, has Gibbs at the bottom and is transitive") {
  Rng rng(23);
  const auto sys = fig_system(1.2, 4.0);
  const auto gibbs = lorenz_curve(PopulationVectord::gibbs(sys), sys);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = lorenz_curve(random_populations(rng, 4), sys);
    const auto b = lorenz_curve(random_populations(rng, 4), sys);
    const auto c = lorenz_curve(random_populations(rng, 4), sys);
    CHECK(thermomajorizes(a, a));
    CHECK(thermomajorizes(a, gibbs));
    if (thermomajorizes(a, b) && thermomajorizes(b, c)) CHECK(thermomajorizes(a, c));
  }
}

TEST_CASE("comparing curves over different partition functions fails") {
  const auto a = fig_system(1.0);
  const auto b = fig_system(2.0);
  try {
    thermomajorizes(lorenz_curve(PopulationVectord::gibbs(a), a), lorenz_curve(PopulationVectord::gibbs(b), b));
    FAIL("expected MismatchedPartitionFunction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MismatchedPartitionFunction);
  }
}

TEST_CASE("conditional Gibbs fill is the lowest curve at fixed target population") {
  Rng rng(24);
  const auto sys = fig_system(1.5, 3.0);
  const Index t = sys.index_of(labels::e_minus_pi);
  for (int trial = 0; trial < 200; ++trial) {
    const double y = uniform(rng, 0.0, 1.0);
    const auto fill = lorenz_curve(conditional_gibbs_fill(sys, t, y), sys);
    RealVectord q = random_populations(rng, 4).probs();
    q(t) = 0.0;
    q *= (1.0 - y) / q.sum();
    q(t) = y;
    CHECK(thermomajorizes(lorenz_curve(PopulationVectord(q), sys), fill));
  }
}

TEST_CASE("full excitation caps the trans yield at exactly 1") {
  for (double beta_de = 0.01; beta_de <= 3.0; beta_de += 0.01) {
    const auto sys = fig_system(beta_de);
    const auto r = max_yield_bound(excitation(1.0), sys, labels::e_minus_pi);
    CHECK(r.bound == 1.0);
    const double z = 1.0 + std::exp(-beta_de) + std::exp(-30.0) + std::exp(-30.0 - beta_de);
    CHECK(std::abs(r.equilibrium_yield - std::exp(-beta_de) / z) < 1e-12);
  }
}

TEST_CASE("half and weak excitation bounds follow the first-elbow closed form") {
  // With E+(0) first in the initial order and the target first in the fill,
  // the binding constraint is the initial curve at x = e^{-beta dE}:
  // bound = eps + (1 - eps)(e^{-beta dE} - e^{-beta E1}).
  for (double eps : {0.5, 0.01}) {
    for (double beta_de : {0.01, 0.3, 1.5, 3.0, 10.0, 14.0}) {
      const auto sys = fig_system(beta_de);
      const double expected = eps + (1.0 - eps) * (std::exp(-beta_de) - std::exp(-30.0));
      const auto r = max_yield_bound(excitation(eps), sys, labels::e_minus_pi);
      CHECK(std::abs(r.bound - expected) < 2e-10);
    }
  }
}

TEST_CASE("yield bound agrees with a 0.01-grid brute-force search") {
  Rng rng(25);
  const auto sys = fig_system(1.5, 2.0);
  const Index t = sys.index_of(labels::e_minus_pi);
  std::vector<PopulationVectord> starts{excitation(1.0), excitation(0.5), excitation(0.1)};
  for (int k = 0; k < 3; ++k) starts.push_back(random_populations(rng, 4));
  for (const auto& p : starts) {
    const double bound = max_yield_bound(p, sys, labels::e_minus_pi).bound;
    const double grid = grid_bound(p, sys, t, 100);
    CHECK(grid <= bound + 1e-9);
    CHECK(bound - grid <= 0.03);
  }
}

TEST_CASE("yield bound properties") {
  Rng rng(26);
  const auto sys = fig_system(1.5, 3.0);
  // Gibbs input: bound equals the equilibrium yield.
  const auto g = max_yield_bound(PopulationVectord::gibbs(sys), sys, labels::e_minus_pi);
  CHECK(std::abs(g.bound - g.equilibrium_yield) < 1e-9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_populations(rng, 4);
    const auto ra = max_yield_bound(a, sys, labels::e_minus_pi);
    CHECK(ra.bound >= ra.equilibrium_yield - 1e-12);
    CHECK(ra.bound <= 1.0);
    // Order preserving: a state reachable from a has no larger bound.
    const auto b = beta_swap_channel(a, sys, Index(trial % 4), Index((trial + 1) % 4), uniform(rng, 0, 1));
    CHECK(max_yield_bound(b, sys, labels::e_minus_pi).bound <= ra.bound + 1e-9);
  }
  CHECK_THROWS_AS(max_yield_bound(excitation(1.0), sys, "missing"), Error);
}

TEST_CASE("beta swap fixes the Gibbs state and conserves probability") {
  Rng rng(27);
  const auto sys = fig_system(1.5);
  const auto gibbs = PopulationVectord::gibbs(sys);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) {
      if (i == j) continue;
      const auto out = beta_swap_channel(gibbs, sys, i, j, 1.0);
      CHECK((out.probs() - gibbs.probs()).cwiseAbs().maxCoeff() < 1e-15);
    }
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_sparse_populations(rng, 4);
    const auto out = beta_swap_channel(p, sys, 0, 1, 1.0);
    CHECK(std::abs(out.probs().sum() - 1.0) < 1e-14);
    const double ratio_target = sys.boltzmann_weights()(0) / sys.boltzmann_weights()(1);
    if (out[1] > 1e-12) CHECK(out[0] / out[1] == doctest::Approx(ratio_target).epsilon(1e-12));
    const auto same = beta_swap_channel(p, sys, 2, 3, 0.0);
    CHECK(same.probs() == p.probs());
  }
}

TEST_CASE("beta swap output is always thermomajorized by its input") {
  Rng rng(28);
  const auto sys = fig_system(1.5, 3.0);
  std::uniform_int_distribution<Index> level(0, 3);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto p = random_sparse_populations(rng, 4);
    Index i = level(rng), j = level(rng);
    if (i == j) j = (i + 1) % 4;
    const auto q = beta_swap_channel(p, sys, i, j, uniform(rng, 0, 1));
    REQUIRE(thermomajorizes(lorenz_curve(p, sys), lorenz_curve(q, sys)));
  }
}

TEST_CASE("beta swap argument checks") {
  const auto sys = fig_system(1.5);
  const auto p = excitation(0.5);
  try {
    beta_swap_channel(p, sys, 0, 7, 0.5);
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexOutOfRange);
  }
  CHECK_THROWS_AS(beta_swap_channel(p, sys, 1, 1, 0.5), Error);
  CHECK_THROWS_AS(beta_swap_channel(p, sys, 0, 1, 1.5), Error);
}
