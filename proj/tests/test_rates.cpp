#include "doctest.h"

#include <cmath>
#include <sstream>

#include "corrwit/errors.hpp"
#include "corrwit/rates.hpp"

using namespace corrwit;

TEST_CASE("eternal profile values and integral") {
  const auto p = RateProfile::eternal();
  const auto g = p.at(0.5);
  CHECK(g[0] == 1.0);
  CHECK(g[2] == doctest::Approx(-std::tanh(0.5)));
  CHECK(p.integral(2, 0, 1) == doctest::Approx(-std::log(std::cosh(1.0))).epsilon(1e-14));
  CHECK(p.integral(2, 0, 9) == doctest::Approx(-std::log(std::cosh(9.0))).epsilon(1e-13));
}

TEST_CASE("quadrature matches exact primitive") {
  const auto exact = RateProfile::eternal();
  const auto quad = RateProfile::custom(
      "q", [](double) { return 1.0; }, [](double) { return 1.0; }, [](double t) { return -std::tanh(t); }, 10);
  for (double t1 : {0.3, 1.0, 2.5, 7.0})
    CHECK(quad.integral(2, 0.1, t1) == doctest::Approx(exact.integral(2, 0.1, t1)).epsilon(1e-9));
}

TEST_CASE("adaptive simpson reports failure") {
  CHECK_THROWS_AS(adaptive_simpson([](double t) { return 1 / t; }, -1, 1), Error);
  CHECK(adaptive_simpson([](double t) { return std::sin(t); }, 0, M_PI) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("csv profile") {
  std::istringstream in("t,gamma_x,gamma_y,gamma_z\n0,1,1,0\n1,1,1,-1\n2,1,1,-1\n");
  const auto p = RateProfile::from_csv(in);
  CHECK(p.domain_end() == 2.0);
  CHECK(p.at(0.5)[2] == doctest::Approx(-0.5));
  CHECK(p.integral(2, 0, 2) == doctest::Approx(-1.5));
  CHECK(p.integral(0, 0.25, 1.75) == doctest::Approx(1.5));

  std::istringstream bad_header("time,gx,gy,gz\n0,1,1,1\n1,1,1,1\n");
  CHECK_THROWS_AS(RateProfile::from_csv(bad_header), Error);
  std::istringstream unordered("t,gamma_x,gamma_y,gamma_z\n0,1,1,1\n0,1,1,1\n");
  CHECK_THROWS_AS(RateProfile::from_csv(unordered), Error);
  std::istringstream garbage("t,gamma_x,gamma_y,gamma_z\n0,1,x,1\n1,1,1,1\n");
  CHECK_THROWS_AS(RateProfile::from_csv(garbage), Error);
}

TEST_CASE("non-finite rates are rejected") {
  CHECK_THROWS_AS(RateProfile::custom(
                      "bad", [](double t) { return 1 / (t - 5); }, [](double) { return 1.0; },
                      [](double) { return 1.0; }, 10),
                  Error);
}
