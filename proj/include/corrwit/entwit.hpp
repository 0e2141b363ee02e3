#pragma once

#include <vector>

#include "corrwit/probe.hpp"

namespace corrwit {

/// (||rho^{T_A}||_1 - 1) / 2, transposing the first subsystem.
double negativity(const ComplexMatrix& rho, const SubsystemDims& dims);
double negativity(const State& rho);

/// Choi state is PPT within tol (exact separability test for a qubit channel).
bool is_entanglement_breaking(const PauliChannelMap& ch, double tol = 1e-10);

/// `prelude` on [0, switch_time), then `continuation` run from its own time 0.
RateProfile switched_profile(const RateProfile& prelude, const RateProfile& continuation, double switch_time);

struct EntanglementBlindConfig {
  double tol = 1e-10;
  int rate_samples = 65;  // points per segment for the rate-sign preconditions
  BackflowConfig backflow{};
};

struct EntanglementBlindRow {
  double t = 0;
  double negativity = 0;                // of (I (x) Lambda_t)(Phi+)
  double choi_min_eig_intermediate = 0; // V from the previous grid time (or the switch) to t
  double c2 = 0;                        // closed-form C2 of the probe state at t
};

struct EntanglementBlindReport {
  double switch_time = 0;
  PauliChannelMap prelude_map;
  double prelude_choi_negativity = 0;
  std::vector<EntanglementBlindRow> rows;
  bool clause_a = false;  // prelude map entanglement breaking
  bool clause_b = false;  // negativity <= tol on the whole grid
  bool clause_c = false;  // some intermediate map after the switch is not CP
  bool clause_d = false;  // C2 backflow on that interval
  double probe_tau = 0;
  double probe_delta_t = 0;
  BackflowReport backflow;

  bool certified() const { return clause_a && clause_b && clause_c && clause_d; }
};

/// Throws PreconditionViolated if the prelude has a negative rate before the switch, if clause (a)
/// fails, or if the continuation is not P-divisible on the grid or never has a negative rate there.
/// Grid times must be >= switch_time and increasing.
EntanglementBlindReport scenario_entanglement_blind(const RateProfile& prelude, const RateProfile& continuation,
                                                    double switch_time, const std::vector<double>& grid,
                                                    const EntanglementBlindConfig& config = {});

}  // namespace corrwit
