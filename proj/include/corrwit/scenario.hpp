#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corrwit/errors.hpp"
#include "corrwit/rates.hpp"

namespace corrwit {

inline constexpr int kSchemaVersion = 1;

struct TuneSpec {
  double epsilon = 1;
  double t_activate = 1;
};

/// {"preset": "eternal"}, {"preset": "constant", "gamma": [..]}, or {"csv": "path"};
/// optional "domain_end" and "tune": {"epsilon", "t_activate"}.
struct RateSpec {
  std::string preset = "eternal";
  std::array<double, 3> gamma{1, 1, 1};
  std::string csv_path;
  double domain_end = RateProfile::kDefaultDomainEnd;
  std::optional<TuneSpec> tune;
};

struct GridSpec {
  double t_start = 0;
  double t_end = 1;
  int steps = 2;

  std::vector<double> points() const;
};

struct Tolerances {
  double cp = 1e-10;
  double backflow = 1e-9;
  double boundary_band = 1e-8;
  double agreement = 1e-6;
  double didt = 1e-10;
  double hessian_rel = 1e-4;
  double hessian_zero = 1e-8;
  double negativity = 1e-10;
  double me = 1e-9;
};

struct OptimizerBudget {
  int seeds = 32;
  int restarts = 6;
  int max_iterations = 400;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::string scenario;
  RateSpec rates;
  std::optional<GridSpec> grid;
  std::vector<double> delta_t;  // backflow; empty means the grid spacing
  Tolerances tol;
  OptimizerBudget optimizer;
  double epsilon = 0.05;
  std::string output;
  std::uint64_t seed = 20240601;

  double t = 1.0;                                      // hessian-verify, mutinfo-map
  std::vector<double> a12{0.0, 0.1, -0.1, 0.2, -0.2};  // hessian-verify; mutinfo-map uses the first
  double radius = 1e-2;                                // mutinfo-map
  int samples = 10000;
  RateSpec prelude{"constant", {2, 2, 2}, {}, RateProfile::kDefaultDomainEnd, std::nullopt};
  double switch_time = 1.0;
  int outputs = 2;  // me-povm-demo
};

/// Parses and validates; throws Error(ConfigError) with a readable message. Relative CSV paths
/// are resolved against `base_dir`.
ScenarioConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);

RateProfile build_profile(const RateSpec& spec);

struct ScenarioResult {
  std::string csv;
  std::string summary;
  bool consistency_violation = false;
};

ScenarioResult run_scenario(const ScenarioConfig& config);

/// 17 significant digits, locale-independent.
std::string format_double(double v);

/// 1 config/validation, 2 numerical failure, 3 consistency violation.
int exit_code_for(const Error& e);

}  // namespace corrwit
