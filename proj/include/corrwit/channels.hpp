#pragma once

#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "corrwit/linalg.hpp"
#include "corrwit/rates.hpp"

namespace corrwit {

/// Unital qubit channel diagonal in the Pauli transfer representation:
/// sigma_k -> d_k sigma_k, identity -> identity.
struct PauliChannelMap {
  double d_x = 1, d_y = 1, d_z = 1;

  static PauliChannelMap identity() { return {}; }
  std::array<double, 3> factors() const { return {d_x, d_y, d_z}; }
  /// Factor multiplying Pauli index k in {0,1,2,3} (0 = identity).
  double factor(int k) const { return k == 0 ? 1.0 : factors()[k - 1]; }
  /// Componentwise inverse; only defined for non-zero factors.
  PauliChannelMap inverse() const { return {1 / d_x, 1 / d_y, 1 / d_z}; }
  bool is_contractive(double tol = 1e-12) const {
    return std::abs(d_x) <= 1 + tol && std::abs(d_y) <= 1 + tol && std::abs(d_z) <= 1 + tol;
  }
};

/// Sequential composition (maps commute): apply `first`, then `second`.
inline PauliChannelMap compose(const PauliChannelMap& second, const PauliChannelMap& first) {
  return {second.d_x * first.d_x, second.d_y * first.d_y, second.d_z * first.d_z};
}

/// d_x = exp(-int(gamma_y + gamma_z)), d_y = exp(-int(gamma_x + gamma_z)), d_z = exp(-int(gamma_x + gamma_y))
/// over [t0, t1]. For t0 = t this is the intermediate map V_{t1,t0}; for t0 = 0 the dynamical map.
PauliChannelMap decay_factors(const RateProfile& rates, double t0, double t1);

/// Same exponent formula without the ordering check; t1 < t0 yields the inverse map.
PauliChannelMap decay_factors_unordered(const RateProfile& rates, double t0, double t1);

/// Action on an arbitrary 2x2 operator.
ComplexMatrix apply_channel(const PauliChannelMap& ch, const ComplexMatrix& op);
State apply_channel(const PauliChannelMap& ch, const State& rho);

/// Applies `ch` to factor `qubit_factor` of a composite operator, identity elsewhere.
ComplexMatrix apply_on_factor(const PauliChannelMap& ch, const ComplexMatrix& op, const SubsystemDims& dims,
                              int qubit_factor);

/// I_{ancillas} (x) ch acting on operators whose last tensor factor is the qubit.
class ExtendedChannel {
 public:
  ExtendedChannel(PauliChannelMap ch, SubsystemDims ancilla_dims);

  ComplexMatrix operator()(const ComplexMatrix& op) const;
  State operator()(const State& rho) const;

  const SubsystemDims& dims() const noexcept { return dims_; }
  const PauliChannelMap& channel() const noexcept { return channel_; }

 private:
  PauliChannelMap channel_;
  SubsystemDims dims_;
};

ExtendedChannel extend_with_identity(const PauliChannelMap& ch, const SubsystemDims& ancilla_dims);

struct ChoiMatrix {
  ComplexMatrix matrix;  // (I (x) ch)(|Phi+><Phi+|), trace one, ordering reference (x) output
  PauliChannelMap source;
};

ChoiMatrix choi_matrix(const PauliChannelMap& ch);

/// The four Choi eigenvalues {(1+dz+dx+dy), (1+dz-dx-dy), (1-dz+dx-dy), (1-dz-dx+dy)} / 4.
std::array<double, 4> choi_eigenvalues_closed_form(const PauliChannelMap& ch);

double min_eigenvalue(const ChoiMatrix& choi);
bool is_cp(const ChoiMatrix& choi, double tol = 1e-10);

inline constexpr double kRateSignTol = 1e-12;

/// gamma_k(t) >= 0 for all k.
bool is_cp_divisible_at(const RateProfile& rates, double t);
/// gamma_i(t) + gamma_j(t) >= 0 for all i != j.
bool is_p_divisible_at(const RateProfile& rates, double t);

struct DivisibilityVerdict {
  double t = 0;
  double s = 0;
  std::array<double, 3> gamma{};
  PauliChannelMap map;  // V_{s,t}
  double choi_min_eigenvalue = 0;
  bool cp_divisible = false;  // pointwise rate test at t
  bool p_divisible = false;
  bool choi_cp = false;       // Choi test of V_{s,t}
};

/// Pointwise divisibility at t combined with the Choi test of V_{s,t} for each (t, s).
/// Throws ConsistencyViolation if the rates are non-negative on all sampled points of [t, s]
/// while the Choi matrix of V_{s,t} is not positive.
std::vector<DivisibilityVerdict> classify_interval(const RateProfile& rates,
                                                   const std::vector<std::pair<double, double>>& grid,
                                                   double tol = 1e-10, int threads = 0);

/// L_t(rho) = i[H(t), rho] + sum_k gamma_k(t) (G_k rho G_k^dag - 1/2 {G_k^dag G_k, rho}).
struct GkslGenerator {
  std::function<ComplexMatrix(double)> hamiltonian;
  std::vector<std::function<ComplexMatrix(double)>> jump_ops;
  std::vector<std::function<double(double)>> rates;

  int dim(double t = 0) const;

  /// H = 0, G_k = sigma_k / sqrt(2) with the profile's gamma_k; reproduces decay_factors.
  static GkslGenerator random_unitary(const RateProfile& profile);
};

ComplexMatrix gksl_apply(const GkslGenerator& gen, const ComplexMatrix& rho, double t);
ComplexMatrix gksl_apply(const GkslGenerator& gen, const State& rho, double t);

/// Replaces the rates on [0, t_activate) by a constant CP-divisible burst so that every decay
/// factor at t_activate is at most epsilon. Without an explicit `burst_rate`, each rate integrates
/// to -ln(epsilon) over the burst (decay factors epsilon^2). epsilon = 1 returns the input.
RateProfile tune_rates_shrink_image(const RateProfile& rates, double epsilon, double t_activate,
                                    std::optional<double> burst_rate = std::nullopt);

}  // namespace corrwit
