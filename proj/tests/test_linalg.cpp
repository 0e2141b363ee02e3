#include "doctest.h"

#include <random>

#include "corrwit/linalg.hpp"

using namespace corrwit;

TEST_CASE("pauli algebra") {
  const ComplexMatrix x = pauli(1), y = pauli(2), z = pauli(3);
  CHECK((x * y - Complex(0, 1) * z).norm() < 1e-15);
  CHECK((y * z - Complex(0, 1) * x).norm() < 1e-15);
  CHECK((z * z - pauli(0)).norm() < 1e-15);
}

TEST_CASE("entropy of diag(0.7, 0.3)") {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 0.7;
  m(1, 1) = 0.3;
  // -0.7 ln 0.7 - 0.3 ln 0.3
  CHECK(von_neumann_entropy(m) == doctest::Approx(0.6108643020548935).epsilon(1e-14));
  CHECK(von_neumann_entropy<double>(maximally_mixed(4)) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("partial trace of a product") {
  std::mt19937_64 rng(3);
  const ComplexMatrix a = random_density(2, rng), b = random_density(3, rng), c = random_density(2, rng);
  const ComplexMatrix abc = tensor_product(tensor_product(a, b), c);
  CHECK((partial_trace(abc, {2, 3, 2}, {0}) - a).norm() < 1e-13);
  CHECK((partial_trace(abc, {2, 3, 2}, {1}) - b).norm() < 1e-13);
  CHECK((partial_trace(abc, {2, 3, 2}, {0, 2}) - tensor_product(a, c)).norm() < 1e-13);
  CHECK_THROWS_AS(partial_trace(abc, {2, 3, 2}, {3}), Error);
}

TEST_CASE("partial transpose of Phi+ has eigenvalue -1/2") {
  const ComplexMatrix pt = partial_transpose(projector(phi_plus(2)), {2, 2}, 1);
  CHECK(hermitian_eigenvalues(pt).minCoeff() == doctest::Approx(-0.5));
}

TEST_CASE("trace norm and hermitian eig") {
  ComplexMatrix m = pauli(3) * 0.25;
  CHECK(trace_norm(m) == doctest::Approx(0.5));
  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 1) = 1;
  CHECK_THROWS_AS(hermitian_eig(bad), Error);
}

TEST_CASE("density matrix validation") {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(State{m}, Error);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  CHECK_THROWS_AS(State{m}, Error);
  std::mt19937_64 rng(1);
  State rho(random_density(6, rng), {2, 3});
  CHECK(partial_trace(rho, {1}).dim() == 3);
}

TEST_CASE("random unitary is unitary") {
  std::mt19937_64 rng(11);
  for (int d : {2, 3, 5}) {
    const ComplexMatrix u = random_unitary(d, rng);
    CHECK((u.adjoint() * u - ComplexMatrix::Identity(d, d)).norm() < 1e-12);
  }
}
