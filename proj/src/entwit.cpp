#include "corrwit/entwit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corrwit {

double negativity(const ComplexMatrix& rho, const SubsystemDims& dims) {
  if (dims.size() != 2) throw Error(ErrorKind::DimensionMismatch, "negativity needs a bipartite state");
  detail::check_dims(rho.rows(), dims);
  return std::max(0.0, (trace_norm(partial_transpose(rho, dims, 0)) - 1) / 2);
}

double negativity(const State& rho) { return negativity(rho.matrix(), rho.dims()); }

bool is_entanglement_breaking(const PauliChannelMap& ch, double tol) {
  return negativity(choi_matrix(ch).matrix, {2, 2}) <= tol;
}

RateProfile switched_profile(const RateProfile& prelude, const RateProfile& continuation, double switch_time) {
  if (!(switch_time > 0 && switch_time <= prelude.domain_end()))
    throw Error(ErrorKind::PreconditionViolated, "switch time must lie in (0, prelude domain_end]");
  std::array<RateFunction, 3> rates;
  for (int k = 0; k < 3; ++k) {
    const RateFunction a = prelude.rate(k), b = continuation.rate(k);
    rates[k].value = [a, b, switch_time](double t) { return t < switch_time ? a.value(t) : b.value(t - switch_time); };
    if (a.has_antiderivative() && b.has_antiderivative()) {
      rates[k].antiderivative = [a, b, switch_time](double t) {
        if (t < switch_time) return a.antiderivative(t) - a.antiderivative(0);
        return a.antiderivative(switch_time) - a.antiderivative(0) + b.antiderivative(t - switch_time) -
               b.antiderivative(0);
      };
    }
  }
  return RateProfile(prelude.name() + "+" + continuation.name(), std::move(rates),
                     switch_time + continuation.domain_end());
}

EntanglementBlindReport scenario_entanglement_blind(const RateProfile& prelude, const RateProfile& continuation,
                                                    double switch_time, const std::vector<double>& grid,
                                                    const EntanglementBlindConfig& cfg) {
  if (grid.empty()) throw Error(ErrorKind::PreconditionViolated, "empty time grid");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] < switch_time || (i > 0 && !(grid[i] > grid[i - 1])))
      throw Error(ErrorKind::PreconditionViolated, "grid must be increasing and start at or after the switch");

  const RateProfile rates = switched_profile(prelude, continuation, switch_time);
  if (grid.back() > rates.domain_end()) throw Error(ErrorKind::PreconditionViolated, "grid runs past domain_end");

  for (int i = 0; i < cfg.rate_samples; ++i) {
    const double t = switch_time * i / cfg.rate_samples;
    if (!is_cp_divisible_at(prelude, t))
      throw Error(ErrorKind::PreconditionViolated, "prelude is not CP-divisible before the switch");
  }
  bool negative_rate = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lo = i == 0 ? switch_time : grid[i - 1];
    for (int k = 0; k <= cfg.rate_samples; ++k) {
      const double t = lo + (grid[i] - lo) * k / cfg.rate_samples;
      if (!is_p_divisible_at(rates, t))
        throw Error(ErrorKind::PreconditionViolated, "continuation is not P-divisible on the grid");
      for (double g : rates.at(t)) negative_rate |= g < 0;
    }
  }
  if (!negative_rate) throw Error(ErrorKind::PreconditionViolated, "continuation has no negative rate on the grid");

  EntanglementBlindReport rep;
  rep.switch_time = switch_time;
  rep.prelude_map = decay_factors(rates, 0, switch_time);
  rep.prelude_choi_negativity = negativity(choi_matrix(rep.prelude_map).matrix, {2, 2});
  rep.clause_a = rep.prelude_choi_negativity <= cfg.tol;
  if (!rep.clause_a) throw Error(ErrorKind::PreconditionViolated, "clause (a): prelude map is not entanglement breaking");

  // clause (c): most negative intermediate map between neighbouring grid times
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lo = i == 0 ? switch_time : grid[i - 1];
    EntanglementBlindRow row;
    row.t = grid[i];
    row.negativity = negativity(choi_matrix(decay_factors(rates, 0, grid[i])).matrix, {2, 2});
    row.choi_min_eig_intermediate = min_eigenvalue(choi_matrix(decay_factors(rates, lo, grid[i])));
    if (grid[i] > lo && row.choi_min_eig_intermediate < worst) {
      worst = row.choi_min_eig_intermediate;
      rep.probe_tau = lo;
      rep.probe_delta_t = grid[i] - lo;
    }
    rep.rows.push_back(row);
  }
  rep.clause_b = std::all_of(rep.rows.begin(), rep.rows.end(),
                             [&](const EntanglementBlindRow& r) { return r.negativity <= cfg.tol; });
  rep.clause_c = worst < -cfg.backflow.cp_tol;
  if (!rep.clause_c) return rep;

  rep.backflow = detect_backflow(rates, rep.probe_tau, rep.probe_delta_t, cfg.backflow);
  rep.clause_d = rep.backflow.backflow_detected;

  // C2 of the same probe along the grid
  const auto v = decay_factors(rates, rep.probe_tau, rep.probe_tau + rep.probe_delta_t);
  const auto dir = best_expansion_direction(v, cfg.backflow.ancilla_dim);
  std::vector<double> checks = grid;
  checks.push_back(rep.probe_tau);
  const ProbePair pair = pull_back_pair(dir.delta, dir.dims, rates, rep.probe_tau, cfg.backflow.epsilon, std::nullopt,
                                        checks);
  const ProbeState ps = build_probe_state(pair);
  for (auto& row : rep.rows) row.c2 = evolve_probe(ps, rates, row.t).closed_form_c2();
  return rep;
}

}  // namespace corrwit
