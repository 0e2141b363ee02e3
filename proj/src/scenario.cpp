#include "corrwit/scenario.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "corrwit/entwit.hpp"
#include "corrwit/mutinfo.hpp"

namespace corrwit {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

const std::set<std::string> kScenarios{"divisibility-scan", "backflow",           "hessian-verify",
                                       "mutinfo-map",       "entanglement-blind", "me-povm-demo"};

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) config_error(where + " must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) config_error("unknown key '" + item.key() + "' in " + where);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("field '") + key + "' has the wrong type");
  }
}

std::vector<double> number_list(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) config_error(std::string("field '") + key + "' must be a number or an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) config_error(std::string("field '") + key + "' must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

RateSpec parse_rates(const json& j, const std::string& where, const std::string& base_dir) {
  check_keys(j, where, {"preset", "gamma", "csv", "domain_end", "tune"});
  RateSpec s;
  if (j.contains("csv")) {
    if (j.contains("preset")) config_error(where + ": give either 'preset' or 'csv'");
    std::filesystem::path p = get_or<std::string>(j, "csv", "");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    s.preset.clear();
    s.csv_path = p.string();
  } else {
    s.preset = get_or<std::string>(j, "preset", "eternal");
    if (s.preset != "eternal" && s.preset != "constant") config_error(where + ": unknown preset '" + s.preset + "'");
    if (s.preset == "constant") {
      if (!j.contains("gamma")) config_error(where + ": constant preset needs 'gamma'");
      const auto g = number_list(j, "gamma");
      if (g.size() != 3) config_error(where + ": 'gamma' needs three rates");
      s.gamma = {g[0], g[1], g[2]};
    }
  }
  s.domain_end = get_or<double>(j, "domain_end", s.domain_end);
  if (j.contains("tune")) {
    const json& t = j.at("tune");
    check_keys(t, where + ".tune", {"epsilon", "t_activate"});
    s.tune = TuneSpec{get_or<double>(t, "epsilon", 1.0), get_or<double>(t, "t_activate", 1.0)};
  }
  return s;
}

bool needs_grid(const std::string& scenario) {
  return scenario == "divisibility-scan" || scenario == "backflow" || scenario == "entanglement-blind";
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

BackflowConfig backflow_config(const ScenarioConfig& c) {
  BackflowConfig b;
  b.epsilon = c.epsilon;
  b.cp_tol = c.tol.cp;
  b.backflow_tol = c.tol.backflow;
  b.boundary_band = c.tol.boundary_band;
  b.agreement_tol = c.tol.agreement;
  b.optimizer.seeds = c.optimizer.seeds;
  b.optimizer.max_iterations = c.optimizer.max_iterations;
  b.optimizer.seed = c.seed;
  return b;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& header) { out_ << header << '\n'; }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(bool v) { return bool_str(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }

  std::ostringstream out_;
};

ScenarioResult divisibility_scan(const ScenarioConfig& c, const RateProfile& rates) {
  const auto pts = c.grid->points();
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) pairs.emplace_back(pts[i], pts[j]);
  const auto verdicts = classify_interval(rates, pairs, c.tol.cp);

  CsvWriter csv("t,s,gamma_x,gamma_y,gamma_z,d_x,d_y,d_z,choi_min_eig,cp,p");
  int non_cp = 0;
  for (const auto& v : verdicts) {
    const auto d = v.map.factors();
    bool positive = true;
    for (double x : d) positive &= std::abs(x) <= 1 + c.tol.cp;
    non_cp += !v.choi_cp;
    csv.row(v.t, v.s, v.gamma[0], v.gamma[1], v.gamma[2], d[0], d[1], d[2], v.choi_min_eigenvalue, v.choi_cp, positive);
  }
  return {csv.str(), std::to_string(verdicts.size()) + " intervals, " + std::to_string(non_cp) + " non-CP", false};
}

ScenarioResult backflow(const ScenarioConfig& c, const RateProfile& rates) {
  const auto taus = c.grid->points();
  std::vector<double> dts = c.delta_t;
  if (dts.empty()) dts.push_back(taus[1] - taus[0]);
  const BackflowConfig cfg = backflow_config(c);

  CsvWriter csv("tau,delta_t,c2_before,c2_after,choi_min_eig,backflow,consistent");
  int rows = 0, detected = 0, bad = 0;
  std::string first_bad;
  for (double tau : taus)
    for (double dt : dts) {
      if (tau + dt > rates.domain_end()) continue;
      const auto r = detect_backflow(rates, tau, dt, cfg);
      ++rows;
      detected += r.backflow_detected;
      const bool violation = (!r.consistent && !r.in_boundary_band) || !r.optimizer_agrees || r.inconclusive;
      if (violation && bad++ == 0)
        first_bad = "tau=" + format_double(tau) + " delta_t=" + format_double(dt) +
                    (r.optimizer_agrees ? "" : " (optimizer disagrees with closed form)");
      csv.row(tau, dt, r.c2_before, r.c2_after, r.choi_min_eig, r.backflow_detected, r.consistent);
    }
  std::string summary = std::to_string(rows) + " probes, " + std::to_string(detected) + " with backflow";
  if (bad) summary += "; " + std::to_string(bad) + " inconsistent, first at " + first_bad;
  return {csv.str(), summary, bad > 0};
}

ScenarioResult hessian_verify(const ScenarioConfig& c, const RateProfile& rates) {
  CsvWriter csv("a12,idx,eig_numeric,eig_closed_form,abs_err");
  int mismatched = 0;
  double worst = 0;
  for (double a : c.a12) {
    const auto rep = hessian_at_stationary(rates, c.t, a);
    mismatched += !hessian_eigenvalues_match(rep.eigenvalues, rep.expected, c.tol.hessian_rel, c.tol.hessian_zero);
    for (int k = 0; k < static_cast<int>(rep.eigenvalues.size()); ++k) {
      const double err = std::abs(rep.eigenvalues(k) - rep.expected[k]);
      worst = std::max(worst, err);
      csv.row(a, k, rep.eigenvalues(k), rep.expected[k], err);
    }
  }
  std::string summary = std::to_string(c.a12.size()) + " stationary states, max abs error " + format_double(worst);
  if (mismatched) summary += "; " + std::to_string(mismatched) + " spectra do not match the closed forms";
  return {csv.str(), summary, mismatched > 0};
}

ScenarioResult mutinfo_map(const ScenarioConfig& c, const RateProfile& rates) {
  const auto scan = neighborhood_scan(rates, c.t, c.a12.front(), c.radius, c.samples, c.tol.didt);
  CsvWriter csv("sample_id,didt,violation");
  for (std::size_t i = 0; i < scan.didt_values.size(); ++i) {
    const double v = scan.didt_values[i];
    if (std::isnan(v)) continue;
    csv.row(i, v, v > c.tol.didt);
  }
  return {csv.str(),
          std::to_string(scan.evaluated) + "/" + std::to_string(scan.samples) + " interior samples, " +
              std::to_string(scan.violations) + " with didt > tolerance, max didt " + format_double(scan.max_didt),
          false};
}

ScenarioResult entanglement_blind(const ScenarioConfig& c, const RateProfile& rates) {
  EntanglementBlindConfig cfg;
  cfg.tol = c.tol.negativity;
  cfg.backflow = backflow_config(c);
  const auto rep = scenario_entanglement_blind(build_profile(c.prelude), rates, c.switch_time, c.grid->points(), cfg);
  CsvWriter csv("t,negativity,choi_min_eig_intermediate,c2");
  for (const auto& r : rep.rows) csv.row(r.t, r.negativity, r.choi_min_eig_intermediate, r.c2);
  std::string summary = std::string("clauses a/b/c/d: ") + bool_str(rep.clause_a) + "/" + bool_str(rep.clause_b) +
                        "/" + bool_str(rep.clause_c) + "/" + bool_str(rep.clause_d) + ", probe interval [" +
                        format_double(rep.probe_tau) + ", " + format_double(rep.probe_tau + rep.probe_delta_t) + "]";
  return {csv.str(), summary, !rep.certified()};
}

ScenarioResult me_povm_demo(const ScenarioConfig& c) {
  std::mt19937_64 rng(c.seed);
  const State rho(random_density(4, rng), {2, 2});
  GeneralSearchConfig g;
  g.inner.restarts = c.optimizer.restarts;
  g.inner.max_iterations = c.optimizer.max_iterations;
  g.two_output.seeds = c.optimizer.seeds;
  g.two_output.max_iterations = c.optimizer.max_iterations;
  g.two_output.seed = c.seed;
  g.seed = c.seed;
  const auto res = me_povm_search(rho, Side::A, c.outputs, g);

  const ComplexMatrix rho_a = partial_trace(rho.matrix(), rho.dims(), {0});
  CsvWriter csv("outcome,probability,deviation_from_uniform");
  double worst = 0;
  for (std::size_t k = 0; k < res.effects.size(); ++k) {
    const double p = (rho_a * res.effects[k]).trace().real();
    const double dev = p - 1.0 / c.outputs;
    worst = std::max(worst, std::abs(dev));
    csv.row(k, p, dev);
  }
  return {csv.str(),
          std::to_string(c.outputs) + "-output ME-POVM on side A, P_g - 1/2 = " + format_double(res.value) +
              ", max deviation " + format_double(worst),
          worst > c.tol.me};
}

}  // namespace

std::vector<double> GridSpec::points() const {
  std::vector<double> p(steps);
  for (int i = 0; i < steps; ++i) p[i] = i == steps - 1 ? t_end : t_start + (t_end - t_start) * i / (steps - 1);
  return p;
}

RateProfile build_profile(const RateSpec& s) {
  RateProfile base = !s.csv_path.empty()         ? RateProfile::from_csv_file(s.csv_path)
                     : s.preset == "constant" ? RateProfile::constant(s.gamma[0], s.gamma[1], s.gamma[2], s.domain_end)
                                              : RateProfile::eternal(s.domain_end);
  if (s.tune) return tune_rates_shrink_image(base, s.tune->epsilon, s.tune->t_activate);
  return base;
}

ScenarioConfig parse_config(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"schema_version", "scenario", "rates", "grid", "delta_t", "tolerances", "optimizer", "epsilon", "output",
              "seed", "t", "a12", "radius", "samples", "prelude", "switch_time", "outputs"});

  ScenarioConfig c;
  if (!j.contains("schema_version")) config_error("missing 'schema_version'");
  c.schema_version = get_or<int>(j, "schema_version", 0);
  if (c.schema_version != kSchemaVersion)
    config_error("unsupported schema_version " + std::to_string(c.schema_version));
  c.scenario = get_or<std::string>(j, "scenario", "");
  if (!kScenarios.count(c.scenario)) config_error("unknown scenario '" + c.scenario + "'");

  if (j.contains("rates")) c.rates = parse_rates(j.at("rates"), "rates", base_dir);
  if (j.contains("prelude")) c.prelude = parse_rates(j.at("prelude"), "prelude", base_dir);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, "grid", {"t_start", "t_end", "steps"});
    c.grid = GridSpec{get_or<double>(g, "t_start", 0.0), get_or<double>(g, "t_end", 1.0), get_or<int>(g, "steps", 2)};
  }
  if (j.contains("delta_t")) c.delta_t = number_list(j, "delta_t");
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    check_keys(t, "tolerances",
               {"cp", "backflow", "boundary_band", "agreement", "didt", "hessian_rel", "hessian_zero", "negativity", "me"});
    auto& tol = c.tol;
    for (auto [key, slot] : std::initializer_list<std::pair<const char*, double*>>{
             {"cp", &tol.cp},
             {"backflow", &tol.backflow},
             {"boundary_band", &tol.boundary_band},
             {"agreement", &tol.agreement},
             {"didt", &tol.didt},
             {"hessian_rel", &tol.hessian_rel},
             {"hessian_zero", &tol.hessian_zero},
             {"negativity", &tol.negativity},
             {"me", &tol.me}}) {
      *slot = get_or<double>(t, key, *slot);
      if (!(*slot > 0)) config_error(std::string("tolerance '") + key + "' must be positive");
    }
  }
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    check_keys(o, "optimizer", {"seeds", "restarts", "max_iterations"});
    c.optimizer.seeds = get_or<int>(o, "seeds", c.optimizer.seeds);
    c.optimizer.restarts = get_or<int>(o, "restarts", c.optimizer.restarts);
    c.optimizer.max_iterations = get_or<int>(o, "max_iterations", c.optimizer.max_iterations);
    if (c.optimizer.seeds < 1 || c.optimizer.restarts < 0 || c.optimizer.max_iterations < 1)
      config_error("optimizer budget must be positive");
  }
  c.epsilon = get_or<double>(j, "epsilon", c.epsilon);
  c.output = get_or<std::string>(j, "output", c.scenario + ".csv");
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.t = get_or<double>(j, "t", c.t);
  if (j.contains("a12")) c.a12 = number_list(j, "a12");
  c.radius = get_or<double>(j, "radius", c.radius);
  c.samples = get_or<int>(j, "samples", c.samples);
  c.switch_time = get_or<double>(j, "switch_time", c.switch_time);
  c.outputs = get_or<int>(j, "outputs", c.outputs);

  if (!(c.epsilon > 0 && c.epsilon <= 1)) config_error("epsilon must lie in (0, 1]");
  if (c.a12.empty()) config_error("'a12' must not be empty");
  if (!(c.radius >= 0)) config_error("radius must be non-negative");
  if (c.samples < 0) config_error("samples must be non-negative");
  if (c.outputs < 2 || c.outputs > 4) config_error("outputs must be 2, 3 or 4");
  for (double dt : c.delta_t)
    if (!(dt > 0)) config_error("delta_t values must be positive");

  RateProfile profile = [&] {
    try {
      return build_profile(c.rates);
    } catch (const Error& e) {
      config_error(std::string("rate profile: ") + e.what());
    }
  }();
  if (needs_grid(c.scenario) && !c.grid) config_error("scenario '" + c.scenario + "' needs a 'grid'");
  if (c.grid) {
    const double end = c.scenario == "entanglement-blind" ? c.switch_time + profile.domain_end() : profile.domain_end();
    if (c.grid->steps < 2) config_error("grid.steps must be at least 2");
    if (!(c.grid->t_start < c.grid->t_end)) config_error("grid.t_start must be below grid.t_end");
    if (c.grid->t_start < 0 || c.grid->t_end > end) config_error("grid must lie inside the profile domain");
  }
  if (!(c.t >= 0 && c.t <= profile.domain_end())) config_error("'t' must lie inside the profile domain");
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

ScenarioResult run_scenario(const ScenarioConfig& c) {
  const RateProfile rates = build_profile(c.rates);
  if (c.scenario == "divisibility-scan") return divisibility_scan(c, rates);
  if (c.scenario == "backflow") return backflow(c, rates);
  if (c.scenario == "hessian-verify") return hessian_verify(c, rates);
  if (c.scenario == "mutinfo-map") return mutinfo_map(c, rates);
  if (c.scenario == "entanglement-blind") return entanglement_blind(c, rates);
  return me_povm_demo(c);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) v = 0.0;  // no "-0"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

int exit_code_for(const Error& e) {
  if (e.kind() == ErrorKind::ConsistencyViolation) return 3;
  return is_numerical(e.kind()) ? 2 : 1;
}

}  // namespace corrwit
