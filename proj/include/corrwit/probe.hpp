#pragma once

#include <optional>
#include <vector>

#include "corrwit/channels.hpp"
#include "corrwit/ensembles.hpp"

namespace corrwit {

/// Traceless Hermitian Delta on A' (x) S with ||Delta||_1 = 1, and the expansion ratio
/// ||(I (x) V)(Delta)||_1 it achieves.
struct ExpansionDirection {
  ComplexMatrix delta;
  SubsystemDims dims;  // {ancilla_dim, 2}
  double ratio = 1;
};

inline constexpr int kDefaultAncillaDim = 3;

/// Best direction found by alternating ascent from Choi-based seeds; ratio may be <= 1.
ExpansionDirection best_expansion_direction(const PauliChannelMap& v, int ancilla_dim = kDefaultAncillaDim);

/// As best_expansion_direction, but throws NoExpansionFound unless ratio > 1 + 1e-12.
/// With a qutrit ancilla the seed 1/2 (Phi+ (+) -|2><2| (x) I/2) reaches 1 + sum |negative Choi eigenvalues|,
/// so an expansion is found exactly when V is not CP. A qubit ancilla can miss weakly non-CP maps.
ExpansionDirection trace_norm_expansion_direction(const PauliChannelMap& v, int ancilla_dim = kDefaultAncillaDim);

/// Pair of initial states on B = A' (x) S whose difference evolves into the requested direction at tau.
struct ProbePair {
  State rho1_0;
  State rho2_0;
  double tau = 0;
  double delta_t = 0;
  double epsilon = 0;  // trace distance 1/2 ||rho1_0 - rho2_0||_1 actually used
  SubsystemDims dims;  // {ancilla_dim, 2}
};

/// rho_{1,2} = sigma +- c Delta_0 with Delta_0 = (I (x) Lambda_tau)^{-1}(Delta_tau) and c = epsilon / ||Delta_0||_1,
/// halving c until both states stay PSD at t = 0 and at every time in `check_times`.
/// sigma defaults to the maximally mixed state.
ProbePair pull_back_pair(const ComplexMatrix& delta_tau, const SubsystemDims& dims, const RateProfile& rates,
                         double tau, double epsilon = 0.05, const std::optional<ComplexMatrix>& sigma = std::nullopt,
                         const std::vector<double>& check_times = {});

/// 1/2 (|0><0| (x) rho1 + |1><1| (x) rho2) at time t, stored with dims {2, dim B}.
struct ProbeState {
  State matrix;
  State rho1;
  State rho2;
  double t = 0;
  ProbePair pair;

  /// 1/4 ||rho1 - rho2||_1
  double closed_form_c2() const;
};

ProbeState build_probe_state(const ProbePair& pair);

/// Blocks evolved from time 0 by I_{A'} (x) Lambda_t.
ProbeState evolve_probe(const ProbeState& ps, const RateProfile& rates, double t);

struct BackflowConfig {
  double epsilon = 0.05;
  int ancilla_dim = kDefaultAncillaDim;
  double cp_tol = 1e-10;         // Choi verdict: non-CP iff choi_min_eig < -cp_tol
  double backflow_tol = 1e-9;    // backflow iff c2_after > c2_before + backflow_tol
  double boundary_band = 1e-8;
  double agreement_tol = 1e-6;   // closed form vs optimizer
  OptimizerConfig optimizer{};
};

struct BackflowReport {
  double tau = 0;
  double delta_t = 0;
  double c2_before = 0;  // closed form
  double c2_after = 0;
  double c2_before_optimizer = 0;
  double c2_after_optimizer = 0;
  double choi_min_eig = 0;
  double expansion_ratio = 1;
  bool backflow_detected = false;
  bool consistent = false;
  bool in_boundary_band = false;
  bool optimizer_agrees = false;
  /// Choi says non-CP but no expanding direction was found.
  bool inconclusive = false;
};

/// Builds a probe pair for V_{tau+dt, tau}, evolves it, and compares C^(2) before and after.
BackflowReport detect_backflow(const RateProfile& rates, double tau, double delta_t, const BackflowConfig& config = {});

}  // namespace corrwit
