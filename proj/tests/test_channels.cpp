#include "doctest.h"

#include <cmath>
#include <random>

#include "corrwit/channels.hpp"

using namespace corrwit;

namespace {

ComplexMatrix apply_direct(const PauliChannelMap& ch, const ComplexMatrix& rho) {
  // Pauli-twirl form: sum_k p_k sigma_k rho sigma_k
  const double p1 = (1 + ch.d_x - ch.d_y - ch.d_z) / 4, p2 = (1 - ch.d_x + ch.d_y - ch.d_z) / 4,
               p3 = (1 - ch.d_x - ch.d_y + ch.d_z) / 4, p0 = 1 - p1 - p2 - p3;
  return p0 * rho + p1 * pauli(1) * rho * pauli(1) + p2 * pauli(2) * rho * pauli(2) + p3 * pauli(3) * rho * pauli(3);
}

}  // namespace

TEST_CASE("eternal decay factors on [0, 1]") {
  const auto v = decay_factors(RateProfile::eternal(), 0, 1);
  CHECK(v.d_x == doctest::Approx(std::cosh(1.0) * std::exp(-1.0)).epsilon(1e-14));
  CHECK(v.d_x == doctest::Approx(0.5676676416183064).epsilon(1e-14));
  CHECK(v.d_y == doctest::Approx(v.d_x).epsilon(1e-15));
  CHECK(v.d_z == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("eternal intermediate map V_{1, 0.5} is not CP") {
  const auto v = decay_factors(RateProfile::eternal(), 0.5, 1.0);
  CHECK(v.d_z == doctest::Approx(std::exp(-1.0)));
  CHECK(v.d_x == doctest::Approx(0.8299965984314521).epsilon(1e-12));
  const auto choi = choi_matrix(v);
  CHECK(min_eigenvalue(choi) == doctest::Approx(-0.07302843892286548).epsilon(1e-10));
  CHECK_FALSE(is_cp(choi));
  // full map from 0 sits exactly on the CP boundary
  CHECK(std::abs(min_eigenvalue(choi_matrix(decay_factors(RateProfile::eternal(), 0, 1.0)))) < 1e-14);
}

TEST_CASE("time order and domain") {
  const auto p = RateProfile::eternal(5);
  CHECK_THROWS_AS(decay_factors(p, 1, 0.5), Error);
  CHECK_THROWS_AS(decay_factors(p, 1, 6), Error);
  const auto inv = decay_factors_unordered(p, 1, 0.5);
  const auto fwd = decay_factors(p, 0.5, 1);
  CHECK(inv.d_x * fwd.d_x == doctest::Approx(1.0));
}

TEST_CASE("composition law") {
  const auto p = RateProfile::constant(0.3, 1.1, -0.2);
  const auto a = decay_factors(p, 0, 0.4), b = decay_factors(p, 0.4, 1.3), ab = decay_factors(p, 0, 1.3);
  const auto c = compose(b, a);
  CHECK(c.d_x == doctest::Approx(ab.d_x).epsilon(1e-14));
  CHECK(c.d_z == doctest::Approx(ab.d_z).epsilon(1e-14));
}

TEST_CASE("channel action agrees with Pauli-twirl form and closed-form Choi spectrum") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const PauliChannelMap ch{u(rng), u(rng), u(rng)};
    const ComplexMatrix rho = random_density(2, rng);
    CHECK((apply_channel(ch, rho) - apply_direct(ch, rho)).norm() < 1e-14);
    auto closed = choi_eigenvalues_closed_form(ch);
    std::sort(closed.begin(), closed.end());
    const RealVector num = hermitian_eigenvalues(choi_matrix(ch).matrix);
    for (int k = 0; k < 4; ++k) CHECK(num(k) == doctest::Approx(closed[k]).epsilon(1e-12));
  }
}

TEST_CASE("extended channel acts only on the qubit factor") {
  std::mt19937_64 rng(7);
  const PauliChannelMap ch{0.3, -0.2, 0.6};
  const ComplexMatrix a = random_density(3, rng), q = random_density(2, rng);
  const ExtendedChannel ext(ch, {3});
  CHECK((ext(tensor_product(a, q)) - tensor_product(a, apply_channel(ch, q))).norm() < 1e-14);
  // qubit in the middle
  const ComplexMatrix mid = apply_on_factor(ch, tensor_product(tensor_product(a, q), a), {3, 2, 3}, 1);
  CHECK((mid - tensor_product(tensor_product(a, apply_channel(ch, q)), a)).norm() < 1e-14);
  CHECK_THROWS_AS(apply_on_factor(ch, tensor_product(a, q), {3, 2}, 0), Error);
}

TEST_CASE("divisibility predicates") {
  const auto e = RateProfile::eternal();
  CHECK(is_cp_divisible_at(e, 0));
  CHECK_FALSE(is_cp_divisible_at(e, 0.1));
  CHECK(is_p_divisible_at(e, 3.0));
  const auto bad = RateProfile::constant(1, 1, -3);
  CHECK_FALSE(is_p_divisible_at(bad, 1.0));
  CHECK(is_cp_divisible_at(RateProfile::constant(1, 1, 1), 2.0));
}

TEST_CASE("classify_interval") {
  const auto e = RateProfile::eternal();
  const auto v = classify_interval(e, {{0.5, 1.0}, {0.0, 0.0}, {2.0, 3.0}});
  REQUIRE(v.size() == 3);
  CHECK_FALSE(v[0].choi_cp);
  CHECK_FALSE(v[0].cp_divisible);
  CHECK(v[0].p_divisible);
  CHECK(v[1].choi_cp);
  CHECK_FALSE(v[2].choi_cp);
  CHECK_THROWS_AS(classify_interval(e, {{1.0, 0.5}}), Error);
  // a non-negative profile never produces a non-CP intermediate map
  for (const auto& r : classify_interval(RateProfile::constant(0.2, 0.0, 1.5), {{0, 1}, {1, 4}, {3, 9}}))
    CHECK(r.choi_cp);
}

TEST_CASE("GKSL generator reproduces decay factors") {
  const auto p = RateProfile::constant(0.4, 0.9, 1.7);
  const auto gen = GkslGenerator::random_unitary(p);
  for (int k = 1; k <= 3; ++k) {
    const ComplexMatrix out = gksl_apply(gen, pauli(k), 0.3);
    const auto g = p.at(0.3);
    const double expected = k == 1 ? -(g[1] + g[2]) : k == 2 ? -(g[0] + g[2]) : -(g[0] + g[1]);
    CHECK((out - expected * pauli(k)).norm() < 1e-14);
  }
  CHECK(gksl_apply(gen, pauli(0), 0.3).norm() < 1e-15);
}

TEST_CASE("GKSL Hamiltonian part matches the unitary derivative") {
  std::mt19937_64 rng(2);
  const ComplexMatrix h = random_hermitian(3, rng), rho = random_density(3, rng);
  GkslGenerator gen;
  gen.hamiltonian = [h](double) { return h; };
  // d/dt e^{iHt} rho e^{-iHt} at t = 0
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  auto rot = [&](double t) {
    const ComplexMatrix u = es.eigenvectors() * (Complex(0, 1) * t * es.eigenvalues().cast<Complex>()).array().exp().matrix().asDiagonal() *
                            es.eigenvectors().adjoint();
    return (u * rho * u.adjoint()).eval();
  };
  const double step = 1e-5;
  const ComplexMatrix fd = (rot(step) - rot(-step)) / (2 * step);
  CHECK((gksl_apply(gen, rho, 0) - fd).norm() < 1e-8);
}

TEST_CASE("tune_rates_shrink_image") {
  const auto e = RateProfile::eternal();
  const double eps = std::exp(-4.0);
  const auto tuned = tune_rates_shrink_image(e, eps, 1.0);
  const auto d = decay_factors(tuned, 0, 1.0);
  for (double f : d.factors()) CHECK(f <= eps);
  CHECK(tuned.at(0.5)[2] == doctest::Approx(4.0));
  CHECK(tuned.at(2.0)[2] == doctest::Approx(-std::tanh(2.0)));
  // intermediate maps after activation are unchanged
  const auto a = decay_factors(tuned, 1.5, 2.5), b = decay_factors(e, 1.5, 2.5);
  CHECK(a.d_x == doctest::Approx(b.d_x).epsilon(1e-14));
  const auto explicit_rate = tune_rates_shrink_image(e, eps, 1.0, 2.0);
  CHECK(decay_factors(explicit_rate, 0, 1.0).d_z == doctest::Approx(eps));
  CHECK_THROWS_AS(tune_rates_shrink_image(e, eps, 1.0, 1.0), Error);
  CHECK_THROWS_AS(tune_rates_shrink_image(e, 0.0, 1.0), Error);
  CHECK_THROWS_AS(tune_rates_shrink_image(e, 1.5, 1.0), Error);
  CHECK(tune_rates_shrink_image(e, 1.0, 1.0).name() == "eternal");
  // profiles without primitives still integrate across the switch
  const auto custom = RateProfile::custom(
      "c", [](double) { return 1.0; }, [](double) { return 1.0; }, [](double t) { return -std::tanh(t); }, 10);
  const auto tc = tune_rates_shrink_image(custom, eps, 1.0);
  CHECK(tc.integral(2, 0.5, 2.0) == doctest::Approx(tuned.integral(2, 0.5, 2.0)).epsilon(1e-9));
}
