#include "doctest.h"

#include <cmath>
#include <random>

#include "corrwit/entwit.hpp"

using namespace corrwit;

TEST_CASE("negativity of known states") {
  std::mt19937_64 rng(2);
  const ComplexMatrix prod = tensor_product(random_density(2, rng), random_density(2, rng));
  CHECK(negativity(prod, {2, 2}) < 1e-12);
  CHECK(negativity(State(projector<double>(phi_plus<double>(2)), {2, 2})) == doctest::Approx(0.5).epsilon(1e-12));
  // Werner: entangled iff p > 1/3, negativity (3p - 1) / 4
  for (double p : {0.2, 1.0 / 3, 0.5, 0.8}) {
    const ComplexMatrix w = p * projector<double>(phi_plus<double>(2)) + (1 - p) * maximally_mixed(4);
    CHECK(negativity(w, {2, 2}) == doctest::Approx(std::max(0.0, (3 * p - 1) / 4)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(negativity(maximally_mixed(8), {2, 2, 2}), Error);
}

TEST_CASE("separable mixtures have zero negativity") {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 50; ++n) {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    std::vector<double> w(4);
    double total = 0;
    for (auto& x : w) total += x = std::uniform_real_distribution<double>(0.1, 1)(rng);
    for (double x : w) m += (x / total) * tensor_product(random_density(2, rng, 1), random_density(2, rng, 1));
    CHECK(negativity(m, {2, 2}) <= 1e-10);
  }
}

TEST_CASE("negativity does not increase under local channels") {
  std::mt19937_64 rng(6);
  for (int n = 0; n < 60; ++n) {
    const State rho(random_density(4, rng), {2, 2});
    const Side side = n % 2 ? Side::A : Side::B;
    const auto ch = random_local_cptp(2, 1000 + n);
    CHECK(negativity(ch.apply(rho, side)) <= negativity(rho) + 1e-9);
  }
}

TEST_CASE("probe states are not entangled") {
  const auto rep = detect_backflow(RateProfile::eternal(), 0.5, 0.5);
  CHECK(rep.backflow_detected);
  const auto v = decay_factors(RateProfile::eternal(), 0.5, 1.0);
  const auto dir = best_expansion_direction(v);
  const auto pair = pull_back_pair(dir.delta, dir.dims, RateProfile::eternal(), 0.5, 0.05, std::nullopt, {0.5, 1.0});
  const auto ps = build_probe_state(pair);
  CHECK(negativity(ps.matrix) <= 1e-10);
  CHECK(negativity(evolve_probe(ps, RateProfile::eternal(), 1.0).matrix) <= 1e-10);
}

TEST_CASE("entanglement breaking channels") {
  CHECK(is_entanglement_breaking({0, 0, 0}));
  CHECK_FALSE(is_entanglement_breaking(PauliChannelMap::identity()));
  // Pauli channel: entanglement breaking iff |dx| + |dy| + |dz| <= 1
  CHECK(is_entanglement_breaking({1.0 / 3, 1.0 / 3, 1.0 / 3}));
  CHECK_FALSE(is_entanglement_breaking({0.5, 0.5, 0.5}));
  CHECK(is_entanglement_breaking({0.5, -0.3, 0.15}));
  CHECK_FALSE(is_entanglement_breaking({0.5, 0.3, 0.25}));
  const auto pre = decay_factors(RateProfile::constant(2, 2, 2), 0, 1);
  CHECK(pre.factors()[0] == doctest::Approx(std::exp(-4.0)));
  CHECK(is_entanglement_breaking(pre));
}

TEST_CASE("switched profile") {
  const auto r = switched_profile(RateProfile::constant(2, 2, 2), RateProfile::eternal(), 1.0);
  CHECK(r.at(0.5)[2] == doctest::Approx(2));
  CHECK(r.at(1.5)[2] == doctest::Approx(-std::tanh(0.5)));
  const auto d = decay_factors(r, 0, 2.0).factors();
  const auto e = decay_factors(RateProfile::eternal(), 0, 1.0).factors();
  for (int k = 0; k < 3; ++k) CHECK(d[k] == doctest::Approx(std::exp(-4.0) * e[k]).epsilon(1e-12));
}

TEST_CASE("entanglement blind scenario") {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(1.0 + 0.1 * i);
  const auto rep = scenario_entanglement_blind(RateProfile::constant(2, 2, 2), RateProfile::eternal(), 1.0, grid);
  CHECK(rep.clause_a);
  CHECK(rep.clause_b);
  CHECK(rep.clause_c);
  CHECK(rep.clause_d);
  CHECK(rep.certified());
  CHECK(rep.backflow.consistent);
  CHECK(rep.rows.size() == grid.size());
  for (const auto& row : rep.rows) CHECK(row.negativity <= 1e-10);
  // c2 rises across the chosen interval
  double before = 0, after = 0;
  for (const auto& row : rep.rows) {
    if (std::abs(row.t - rep.probe_tau) < 1e-12) before = row.c2;
    if (std::abs(row.t - rep.probe_tau - rep.probe_delta_t) < 1e-12) after = row.c2;
  }
  CHECK(after > before);

  SUBCASE("preconditions") {
    CHECK_THROWS_AS(scenario_entanglement_blind(RateProfile::constant(0.1, 0.1, 0.1), RateProfile::eternal(), 1.0, grid),
                    Error);
    CHECK_THROWS_AS(scenario_entanglement_blind(RateProfile::constant(2, 2, 2), RateProfile::constant(1, 1, 1), 1.0, grid),
                    Error);
    CHECK_THROWS_AS(
        scenario_entanglement_blind(RateProfile::constant(2, 2, 2), RateProfile::constant(1, 1, -3), 1.0, grid), Error);
    CHECK_THROWS_AS(scenario_entanglement_blind(RateProfile::constant(2, 2, -1), RateProfile::eternal(), 1.0, grid),
                    Error);
  }
}
