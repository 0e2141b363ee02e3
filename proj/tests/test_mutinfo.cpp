#include "doctest.h"

#include <cmath>
#include <random>

#include "corrwit/mutinfo.hpp"

using namespace corrwit;

namespace {

const std::vector<RateProfile>& presets() {
  static const std::vector<RateProfile> p{RateProfile::constant(1, 1, 1), RateProfile::eternal(),
                                          RateProfile::constant(0.3, 0.7, 0.2)};
  return p;
}

ComplexMatrix werner(double p) {
  return p * projector<double>(phi_plus<double>(2)) + (1 - p) * maximally_mixed(4);
}

// finite-difference gradient/Hessian of F(A(a))
double eval_f(const HermitianFamily& fam, const SpectralFunction& f, const RealVector& a) {
  const RealVector l = hermitian_eigenvalues(fam.value(a));
  double s = 0;
  for (Eigen::Index k = 0; k < l.size(); ++k) s += f.g(l(k));
  return s;
}

void check_against_fd(const HermitianFamily& fam, const SpectralFunction& f, const RealVector& a) {
  const auto w = spectral_derivatives(fam, f, a);
  const int p = fam.num_params;
  const double h1 = 1e-4, h2 = 1e-3;
  for (int i = 0; i < p; ++i) {
    RealVector ap = a, am = a;
    ap(i) += h1;
    am(i) -= h1;
    const double g = (eval_f(fam, f, ap) - eval_f(fam, f, am)) / (2 * h1);
    CHECK(std::abs(w.gradient(i) - g) <= 1e-4 * std::max(1.0, std::abs(g)));
    for (int j = 0; j < p; ++j) {
      auto second = [&](double h) {
        auto shifted = [&](double si, double sj) {
          RealVector b = a;
          b(i) += si;
          b(j) += sj;
          return eval_f(fam, f, b);
        };
        return (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4 * h * h);
      };
      const double hij = second(h2);
      CHECK(std::abs(w.hessian(i, j) - hij) <= 1e-4 * std::max(1.0, std::abs(hij)));
    }
  }
}

}  // namespace

TEST_CASE("mutual information values") {
  std::mt19937_64 rng1(1);
  const ComplexMatrix prod = tensor_product(random_density(2, rng1), maximally_mixed(2));
  CHECK(std::abs(mutual_information(prod, {2, 2})) < 1e-12);
  CHECK(mutual_information(State(projector<double>(phi_plus<double>(2)), {2, 2})) ==
        doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));
  ComplexMatrix cl = ComplexMatrix::Zero(4, 4);
  cl(0, 0) = cl(3, 3) = 0.5;
  CHECK(mutual_information(cl, {2, 2}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(mutual_information(maximally_mixed(8), {2, 2, 2}), Error);
}

TEST_CASE("coordinate round trip") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 20; ++n) {
    const ComplexMatrix rho = random_density(4, rng);
    const auto c = coords_from_state(rho);
    CHECK(c[0] == doctest::Approx(0.25));
    CHECK((state_from_coords(c) - rho).norm() < 1e-12);
  }
}

TEST_CASE("spectral derivatives: simple functions") {
  SUBCASE("trace is linear") {
    std::mt19937_64 rng(5);
    std::vector<ComplexMatrix> dirs{random_hermitian(3, rng), random_hermitian(3, rng)};
    const auto fam = HermitianFamily::affine(random_hermitian(3, rng), dirs);
    RealVector a(2);
    a << 0.3, -0.2;
    const auto w = spectral_derivatives(fam, SpectralFunction::trace(), a);
    for (int i = 0; i < 2; ++i) CHECK(w.gradient(i) == doctest::Approx(dirs[i].trace().real()));
    CHECK(w.hessian.norm() < 1e-12);
  }
  SUBCASE("sum of squares on diag(a, -a)") {
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = -1;
    const auto fam = HermitianFamily::affine(ComplexMatrix::Zero(2, 2), {d});
    RealVector a(1);
    a << 0.37;
    const auto w = spectral_derivatives(fam, SpectralFunction::sum_of_squares(), a);
    CHECK(w.gradient(0) == doctest::Approx(4 * 0.37));
    CHECK(w.hessian(0, 0) == doctest::Approx(4.0));
  }
}

TEST_CASE("spectral derivatives match finite differences") {
  SUBCASE("entropy along e_12 from the maximally mixed state") {
    const auto fam = HermitianFamily::affine(0.25 * ComplexMatrix::Identity(4, 4), {basis_element(12), basis_element(3)});
    RealVector a(2);
    a << 0.05, 0.0;
    check_against_fd(fam, SpectralFunction::entropy(), a);
    a << 0.0, 0.0;
    check_against_fd(fam, SpectralFunction::entropy(), a);
  }
  SUBCASE("random interior families") {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 5; ++n) {
      std::vector<ComplexMatrix> dirs;
      for (int i = 0; i < 3; ++i) dirs.push_back(0.05 * random_hermitian(4, rng));
      const auto fam = HermitianFamily::affine(0.5 * random_density(4, rng) + 0.5 * maximally_mixed(4), dirs);
      check_against_fd(fam, SpectralFunction::entropy(), RealVector::Zero(3));
    }
  }
}

TEST_CASE("degenerate clusters: eigenvector choice does not matter") {
  PauliBasisCoordinates c;
  c[12] = 0.1;
  const auto d0 = mutual_information_derivatives(c, 0);
  const auto d1 = mutual_information_derivatives(c, 1);
  const auto d2 = mutual_information_derivatives(c, 2);
  CHECK((d0.hessian - d1.hessian).norm() < 1e-9);
  CHECK((d0.hessian - d2.hessian).norm() < 1e-9);
  CHECK(d0.gradient.norm() < 1e-12);
  CHECK((d0.hessian - d0.hessian.transpose()).norm() < 1e-8);
}

TEST_CASE("mutual information Hessian vs finite differences") {
  std::mt19937_64 rng(17);
  const ComplexMatrix rho = 0.5 * random_density(4, rng) + 0.5 * maximally_mixed(4);
  const auto c = coords_from_state(rho);
  const auto d = mutual_information_derivatives(c);
  CHECK(d.value == doctest::Approx(mutual_information(rho, {2, 2})).epsilon(1e-12));
  const double h = 1e-3;
  for (int i = 1; i < 16; i += 4)
    for (int j = 1; j < 16; j += 3) {
      auto at = [&](double si, double sj) {
        auto b = c;
        b[i] += si;
        b[j] += sj;
        return mutual_information(state_from_coords(b), {2, 2});
      };
      const double fd = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
      CHECK(std::abs(d.hessian(i - 1, j - 1) - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("didt evaluators agree") {
  std::mt19937_64 rng(23);
  for (const auto& r : presets())
    for (int n = 0; n < 10; ++n) {
      const State rho(0.8 * random_density(4, rng) + 0.2 * maximally_mixed(4), {2, 2});
      const double t = 0.3 + 0.1 * n;
      CHECK(std::abs(didt(rho, r, t) - didt_finite_difference(rho, r, t)) < 1e-6);
    }
}

TEST_CASE("didt special states") {
  std::mt19937_64 rng(29);
  for (const auto& r : presets()) {
    const State stationary(tensor_product(random_density(2, rng, 2), maximally_mixed(2)), {2, 2});
    CHECK(std::abs(didt(stationary, r, 0.7)) < 1e-12);
    const State prod(tensor_product(random_density(2, rng, 2), random_density(2, rng, 2)), {2, 2});
    CHECK(std::abs(didt(prod, r, 0.7)) < 1e-10);
  }
  const State w(werner(0.99), {2, 2});
  const auto cp = RateProfile::constant(1, 1, 1);
  CHECK(didt(w, cp, 0.5) < 0);
  CHECK(didt_finite_difference(w, cp, 0.5) < 0);
  CHECK_THROWS_AS(didt(State(projector<double>(phi_plus<double>(2)), {2, 2}), cp, 0.5), Error);
}

TEST_CASE("product states at the boundary stay uncorrelated") {
  for (double s : {1.0, -1.0}) {
    PauliBasisCoordinates c;
    c[12] = 0.25 * s;
    c[1] = 0.1;
    c[13] = 0.1 * s;  // (I + s sz) (x) 0.1 sx: still a product
    const ComplexMatrix rho = state_from_coords(c);
    CHECK(std::abs(mutual_information(rho, {2, 2})) < 1e-10);
    const auto v = decay_factors(RateProfile::eternal(), 0, 1.5);
    CHECK(std::abs(mutual_information(apply_on_factor(v, rho, {2, 2}, 1), {2, 2})) < 1e-10);
  }
}

TEST_CASE("Hessian at stationary states") {
  const auto eternal = RateProfile::eternal();
  for (double a : {0.0, 0.1, -0.1, 0.2, -0.2, 0.239}) {
    const auto rep = hessian_at_stationary(eternal, 1.0, a);
    CHECK(rep.matched);
    CHECK(rep.zero_space_dim == 6);
    CHECK((rep.hessian - rep.hessian.transpose()).norm() < 1e-8);
    for (double v : hessian_closed_form(eternal.at(1.0), a)) CHECK(v <= 0);
  }
  for (const auto& r : presets()) CHECK(hessian_at_stationary(r, 0.5, 0.15).matched);
  CHECK_THROWS_AS(hessian_at_stationary(eternal, 1.0, 0.2495), Error);
}

TEST_CASE("closed-form Hessian eigenvalues") {
  const auto v = hessian_closed_form({0.5, 0.1192, 0.1192}, 0.0);
  CHECK(v[0] == doctest::Approx(-32 * 0.2384));
  CHECK(v[3] == doctest::Approx(-7.6288));
  // series branch agrees with the direct formula
  const double a = 0.99e-4;
  CHECK(hessian_closed_form({1, 1, 1}, a)[3] == doctest::Approx(-16 * std::atanh(4 * a) / a).epsilon(1e-13));
  bool positive = false;
  for (double x : hessian_closed_form({1, 1, -3}, 0.1)) positive |= x > 0;
  CHECK(positive);
  const auto rep = hessian_at_stationary(RateProfile::constant(1, 1, -3), 0.5, 0.1);
  CHECK(rep.matched);
  CHECK(rep.eigenvalues.maxCoeff() > 0);
}

TEST_CASE("zero eigenspace closed form") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.08, 0.08);
  const auto eternal = RateProfile::eternal();
  int checked = 0;
  for (int n = 0; n < 60; ++n) {
    ZeroSpaceCoordinates z{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    const ComplexMatrix m = zero_space_state(z);
    if (!(hermitian_eigenvalues(m).minCoeff() > 1e-6)) continue;
    ++checked;
    const double t = 0.2 + 0.05 * n;
    const double closed = zero_eigenspace_didt(z, eternal, t);
    CHECK(std::abs(closed - didt(State(m, {2, 2}), eternal, t)) < 1e-6);
    CHECK(closed <= 1e-10);
    const double lambda = std::sqrt(z.a1 * z.a1 + z.a2 * z.a2 + z.a3 * z.a3);
    CHECK(zero_space_mutual_information(z, lambda) == doctest::Approx(mutual_information(m, {2, 2})).epsilon(1e-10));
    CHECK(zero_space_contraction_rate(z, eternal.at(t)) >= 0);
  }
  CHECK(checked > 30);

  ZeroSpaceCoordinates cl;
  cl.a3 = 0.1;
  CHECK(std::abs(zero_eigenspace_didt(cl, eternal, 1.0) - didt(State(zero_space_state(cl), {2, 2}), eternal, 1.0)) <
        1e-6);
  CHECK_THROWS_AS(zero_eigenspace_didt(ZeroSpaceCoordinates{0.1, 0, 0, 0, 0.1, 0, 0}, eternal, 1.0), Error);
  CHECK_THROWS_AS(zero_eigenspace_didt(ZeroSpaceCoordinates{0, 0.3, 0, 0, 0, 0, 0}, eternal, 1.0), Error);
}

TEST_CASE("neighbourhood scan") {
  const auto eternal = RateProfile::eternal();
  const auto zero = neighborhood_scan(eternal, 1.0, 0.1, 0.0, 50);
  CHECK(zero.violations == 0);
  CHECK(zero.evaluated == 50);

  const auto ok = neighborhood_scan(eternal, 1.0, 0.0, 1e-2, 2000);
  CHECK(ok.evaluated == 2000);
  CHECK(ok.violation_fraction == 0);

  const auto bad = neighborhood_scan(RateProfile::constant(1, 1, -3), 0.5, 0.0, 1e-2, 2000);
  CHECK(bad.violation_fraction > 0);

  // deterministic
  const auto again = neighborhood_scan(eternal, 1.0, 0.0, 1e-2, 2000);
  CHECK(again.max_didt == ok.max_didt);
}
