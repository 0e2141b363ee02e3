#include "doctest.h"

#include <algorithm>

#include "corrwit/scenario.hpp"

using namespace corrwit;

namespace {

int config_exit(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return exit_code_for(e);
  }
  return 0;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(1e-5) == "1.0000000000000001e-05");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("grid points") {
  const auto p = GridSpec{0, 2, 5}.points();
  REQUIRE(p.size() == 5);
  CHECK(p.front() == 0);
  CHECK(p.back() == 2);
  CHECK(p[2] == 1);
}

TEST_CASE("config validation") {
  const std::string ok = R"({"schema_version": 1, "scenario": "divisibility-scan",
      "rates": {"preset": "constant", "gamma": [1, 1, 1]}, "grid": {"t_start": 0, "t_end": 2, "steps": 3}})";
  CHECK(config_exit(ok) == 0);
  const auto c = parse_config(ok);
  CHECK(c.grid->steps == 3);
  CHECK(c.output == "divisibility-scan.csv");

  CHECK(config_exit("{") == 1);
  CHECK(config_exit(R"({"scenario": "backflow"})") == 1);
  CHECK(config_exit(R"({"schema_version": 2, "scenario": "backflow"})") == 1);
  CHECK(config_exit(R"({"schema_version": 1, "scenario": "nope"})") == 1);
  CHECK(config_exit(R"({"schema_version": 1, "scenario": "backflow"})") == 1);  // no grid
  CHECK(config_exit(R"({"schema_version": 1, "scenario": "backflow", "grid": {"t_start": 0, "t_end": 2, "steps": 1}})") ==
        1);
  CHECK(config_exit(R"({"schema_version": 1, "scenario": "backflow", "grid": {"t_start": 2, "t_end": 1, "steps": 3}})") ==
        1);
  CHECK(config_exit(R"({"schema_version": 1, "scenario": "backflow", "grid": {"t_start": 0, "t_end": 20, "steps": 3}})") ==
        1);
  CHECK(config_exit(R"({"schema_version": 1, "scenario": "hessian-verify", "tolerances": {"cp": 0}})") == 1);
  CHECK(config_exit(R"({"schema_version": 1, "scenario": "hessian-verify", "typo": 1})") == 1);
  CHECK(config_exit(R"({"schema_version": 1, "scenario": "hessian-verify", "rates": {"preset": "constant"}})") == 1);
  CHECK(config_exit(R"({"schema_version": 1, "scenario": "hessian-verify", "rates": {"csv": "/nonexistent.csv"}})") == 1);
  CHECK(config_exit(R"({"schema_version": 1, "scenario": "hessian-verify",
      "rates": {"preset": "eternal", "tune": {"epsilon": 2, "t_activate": 1}}})") == 1);
  CHECK(config_exit(R"({"schema_version": 1, "scenario": "me-povm-demo", "outputs": 5})") == 1);
}

TEST_CASE("exit codes by error kind") {
  CHECK(exit_code_for(Error(ErrorKind::ConfigError, "")) == 1);
  CHECK(exit_code_for(Error(ErrorKind::PreconditionViolated, "")) == 1);
  CHECK(exit_code_for(Error(ErrorKind::ScaleUnderflow, "")) == 2);
  CHECK(exit_code_for(Error(ErrorKind::QuadratureFailure, "")) == 2);
  CHECK(exit_code_for(Error(ErrorKind::ConsistencyViolation, "")) == 3);
}

TEST_CASE("scenario outputs") {
  auto c = parse_config(R"({"schema_version": 1, "scenario": "divisibility-scan",
      "rates": {"preset": "constant", "gamma": [1, 1, 1]}, "grid": {"t_start": 0, "t_end": 1, "steps": 3}})");
  const auto r = run_scenario(c);
  CHECK(r.csv.rfind("t,s,gamma_x,gamma_y,gamma_z,d_x,d_y,d_z,choi_min_eig,cp,p\n", 0) == 0);
  CHECK(r.csv.find("false") == std::string::npos);
  CHECK_FALSE(r.consistency_violation);

  c = parse_config(R"({"schema_version": 1, "scenario": "hessian-verify", "a12": [0.1]})");
  const auto h = run_scenario(c);
  CHECK(h.csv.rfind("a12,idx,eig_numeric,eig_closed_form,abs_err\n", 0) == 0);
  CHECK(std::count(h.csv.begin(), h.csv.end(), '\n') == 16);
  CHECK_FALSE(h.consistency_violation);
}
