#pragma once

#include <cstdint>
#include <vector>

#include "corrwit/linalg.hpp"

namespace corrwit {

/// Which half of a bipartite state an operation acts on.
enum class Side { A, B };

inline Side other(Side s) { return s == Side::A ? Side::B : Side::A; }
inline const char* to_string(Side s) { return s == Side::A ? "A" : "B"; }

/// Finite-outcome measurement. Effects are PSD and sum to the identity (tolerance 1e-10).
class Povm {
 public:
  static constexpr double kTol = 1e-10;

  explicit Povm(std::vector<ComplexMatrix> effects);

  const std::vector<ComplexMatrix>& effects() const noexcept { return effects_; }
  const ComplexMatrix& operator[](std::size_t i) const { return effects_[i]; }
  int size() const noexcept { return static_cast<int>(effects_.size()); }
  int dim() const noexcept { return static_cast<int>(effects_.front().rows()); }

  /// Tr(rho P_i) for each outcome.
  std::vector<double> probabilities(const ComplexMatrix& rho) const;

 private:
  std::vector<ComplexMatrix> effects_;
};

struct EnsembleItem {
  double probability;
  State state;
  bool degenerate = false;  // zero-probability outcome carrying a maximally mixed placeholder
};

/// {p_i, rho_i}: probabilities non-negative, summing to one within 1e-10, equal dimensions.
class StateEnsemble {
 public:
  explicit StateEnsemble(std::vector<EnsembleItem> items);

  const std::vector<EnsembleItem>& items() const noexcept { return items_; }
  int size() const noexcept { return static_cast<int>(items_.size()); }
  int dim() const noexcept { return items_.front().state.dim(); }

 private:
  std::vector<EnsembleItem> items_;
};

/// An ME-POVM together with the reference state it was checked against.
struct MePovmCertificate {
  Povm povm;
  State reference_state;
  std::vector<double> outcome_probs;
  double entropy_base_n;

  /// Throws InvalidPovm unless every outcome has probability 1/n within `tol`.
  static MePovmCertificate certify(const Povm& povm, const State& rho, double tol = 1e-8);
};

/// Every Tr(rho P_i) lies within tol of 1/n.
bool is_me_povm(const Povm& povm, const State& rho, double tol = 1e-10);

/// n-output ME-POVM diagonal in the eigenbasis of rho. Eigenvalues are taken in descending
/// order and their cumulative mass is cut into n intervals of length 1/n; outcome i receives
/// the fraction of each eigenvector's mass falling in its interval. Kernel directions go to
/// the last outcome.
Povm construct_me_povm(const State& rho, int n = 2);

/// Ensemble prepared on the unmeasured half by measuring `povm` on `side` of a bipartite state.
StateEnsemble measure_on_subsystem(const State& rho_ab, const Povm& povm, Side side);

/// Tr_X[rho (op_X (x) I)] for X = measured side, returning an operator on the other side.
ComplexMatrix contract_side(const ComplexMatrix& rho_ab, const SubsystemDims& dims, const ComplexMatrix& op,
                            Side measured);

/// Helstrom value 1/4 (2 + ||rho1 - rho2||_1) for two equiprobable states.
double guessing_probability_two(const State& rho1, const State& rho2);

struct BruteForceConfig {
  int restarts = 6;            // random POVM seeds on top of the pretty-good measurement
  int max_iterations = 4000;   // per seed
  double tol = 1e-13;          // stop when P_g changes by less than this between sweeps
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct GuessingResult {
  double value = 0;
  std::vector<ComplexMatrix> povm;
  bool budget_exhausted = false;
};

/// Lower bound on the optimal guessing probability by fixed-point ascent over POVMs
/// (iteration Pi_j <- G^-1 R_j Pi_j R_j G^-1, R_j = p_j rho_j). Commuting ensembles are solved exactly.
GuessingResult guessing_probability_bruteforce(const StateEnsemble& e, const BruteForceConfig& config = {});

struct OptimizerConfig {
  int seeds = 32;
  int max_iterations = 400;
  double tol = 1e-14;
  std::uint64_t seed = 20240601;
  int threads = 0;
};

struct CorrelationResult {
  double value = 0;          // P_g - 1/2
  ComplexMatrix effect;      // first effect P of the optimal 2-output ME-POVM {P, I - P}
  int iterations = 0;
};

/// max over 2-output ME-POVMs {P, I-P} on `side` of P_g - 1/2, i.e. 1/2 ||Tr_X[rho ((2P - I) (x) I)]||_1
/// subject to 0 <= P <= I, Tr(rho_X P) = 1/2. Alternating ascent between P and the sign operator
/// of the prepared difference; best over deterministic restarts.
CorrelationResult correlation_two_output(const State& rho_ab, Side side, const OptimizerConfig& config = {});

double correlation_CA2(const State& rho_ab, const OptimizerConfig& config = {});
double correlation_CB2(const State& rho_ab, const OptimizerConfig& config = {});
double correlation_C2(const State& rho_ab, const OptimizerConfig& config = {});

struct GeneralSearchConfig {
  int evaluations = 150;  // (1+1)-ES steps per (side, n)
  double initial_step = 0.3;
  BruteForceConfig inner{2, 600, 1e-12, 0x51ed270b27c2d8f1ULL};
  OptimizerConfig two_output{};
  std::uint64_t seed = 7;
};

struct NOutputResult {
  double value = 0;  // P_g - 1/2
  std::vector<ComplexMatrix> effects;
  bool budget_exhausted = false;
};

/// Random search over n-output ME-POVMs on `side`, scoring each by the brute-force P_g.
/// Candidate POVMs are Naimark-normalized and then coarse-grained to equal outcome weights.
NOutputResult me_povm_search(const State& rho_ab, Side side, int n, const GeneralSearchConfig& config = {});

struct GeneralCorrelationResult {
  double value = 0;
  Side side = Side::A;
  int outputs = 2;
  bool budget_exhausted = false;
};

/// max over both sides and n in {2..max_outputs} of the n-output search; n = 2 uses correlation_two_output.
GeneralCorrelationResult correlation_C_general(const State& rho_ab, int max_outputs,
                                               const GeneralSearchConfig& config = {});

enum class LocalChannelMode { Random, Identity };

/// CPTP map on a single subsystem given by Kraus operators.
struct LocalChannel {
  std::vector<ComplexMatrix> kraus;

  int dim() const { return static_cast<int>(kraus.front().cols()); }
  ComplexMatrix operator()(const ComplexMatrix& rho) const;
  /// (Lambda (x) I) or (I (x) Lambda) on a bipartite state.
  State apply(const State& rho_ab, Side side) const;
  /// max entry of sum_k E_k^dag E_k - I
  double completeness_error() const;
};

/// Kraus operators from the first `dim` columns of a Haar unitary on dim * num_kraus
/// (num_kraus = 0 means dim). Identity mode returns the identity channel.
LocalChannel random_local_cptp(int dim, std::uint64_t seed, LocalChannelMode mode = LocalChannelMode::Random,
                               int num_kraus = 0);

}  // namespace corrwit
