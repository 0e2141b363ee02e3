#pragma once

#include <array>
#include <functional>
#include <vector>

#include "corrwit/channels.hpp"

namespace corrwit {

// Two-qubit coordinates: e_i = sigma_{i/4} (x) sigma_{i%4} (ancilla first, system second),
// rho = 1/4 I + sum_{i>=1} a_i e_i with a_i = 1/4 Tr(rho e_i).

struct PauliBasisCoordinates {
  std::array<double, 16> a{0.25};

  double& operator[](int i) { return a[i]; }
  double operator[](int i) const { return a[i]; }
};

ComplexMatrix basis_element(int i);
PauliBasisCoordinates coords_from_state(const ComplexMatrix& rho);
ComplexMatrix state_from_coords(const PauliBasisCoordinates& c);

/// Rate at which coordinate i decays under the generator: 0 if the system factor of e_i is
/// the identity, otherwise the pairwise sum gamma_j + gamma_k over the other two Pauli labels.
std::array<double, 16> coordinate_decay_rates(const std::array<double, 3>& gamma);

/// S(rho_A) + S(rho_B) - S(rho_AB), natural log.
double mutual_information(const ComplexMatrix& rho, const SubsystemDims& dims);
double mutual_information(const State& rho);

// ---------------------------------------------------------------------------
// derivatives of spectral functions of a Hermitian family A(a)

/// Separable spectral function F(A) = sum_k g(lambda_k).
struct SpectralFunction {
  std::function<double(double)> g, dg, d2g;

  static SpectralFunction trace();
  static SpectralFunction sum_of_squares();
  /// -lambda ln lambda
  static SpectralFunction entropy();
};

struct HermitianFamily {
  int num_params = 0;
  std::function<ComplexMatrix(const RealVector&)> value;
  std::function<ComplexMatrix(const RealVector&, int)> first;        // dA/da_i
  std::function<ComplexMatrix(const RealVector&, int, int)> second;  // d2A/da_i da_j; empty means zero

  /// A(a) = base + sum_i a_i directions[i]
  static HermitianFamily affine(ComplexMatrix base, std::vector<ComplexMatrix> directions);
};

struct SpectralDerivativeWorkspace {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
  Eigen::MatrixXd h;               // h(i, k) = u_k^dag dA_i u_k
  std::vector<Eigen::MatrixXd> hk; // hk[k](i, j) = h_ij^k
  std::vector<double> alpha_data;  // alpha_ij^kl, see alpha()
  Eigen::MatrixXd eta;             // degenerate-pair correction
  RealVector gradient;
  Eigen::MatrixXd hessian;

  double alpha(int i, int j, int k, int l) const;

  int num_params() const { return static_cast<int>(h.rows()); }
  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

/// Gradient and Hessian of F(A(a)) at `a`. Eigenvalues closer than `degeneracy_tol` (relative to the
/// spectral radius) are treated as degenerate. `eigenvector_choice` != 0 rotates eigenvectors inside
/// each degenerate cluster by a fixed unitary; results must not depend on it. `order` = 1 skips
/// everything needed only for the Hessian.
SpectralDerivativeWorkspace spectral_derivatives(const HermitianFamily& family, const SpectralFunction& f,
                                                 const RealVector& a, double degeneracy_tol = 1e-9,
                                                 int eigenvector_choice = 0, int order = 2);

/// Gradient (15) and Hessian (15x15) of the mutual information over a_1..a_15.
struct MutualInformationDerivatives {
  double value = 0;
  RealVector gradient;
  Eigen::MatrixXd hessian;
};

inline constexpr double kInteriorTol = 1e-8;

/// Throws BoundaryState when the smallest eigenvalue of rho is <= 1e-8.
MutualInformationDerivatives mutual_information_derivatives(const PauliBasisCoordinates& c,
                                                            int eigenvector_choice = 0, int order = 2);

/// d/dt I((I (x) Lambda) rho) along the random-unitary generator at time t, by the chain rule
/// sum_i dI/da_i * (-r_i(t) a_i). Throws BoundaryState for non-interior states.
double didt(const State& rho, const RateProfile& rates, double t);

/// Central difference of I under the intermediate maps V_{t+h,t} and V_{t,t-h}^{-1}.
double didt_finite_difference(const State& rho, const RateProfile& rates, double t, double h = 1e-5);

// ---------------------------------------------------------------------------
// stationary-state analysis

/// The nine non-zero Hessian eigenvalues of d/dt I at 1/4 I + a12 sigma_z (x) I, in the order
/// 32 r (16a^2+1)/(16a^2-1) for r = gyz, gxz, gxy, then -8 r atanh(4a)/a twice each.
std::array<double, 9> hessian_closed_form(const std::array<double, 3>& gamma, double a12);

struct HessianReport {
  double a12 = 0;
  double t = 0;
  Eigen::MatrixXd hessian;  // 15x15 over a_1..a_15
  RealVector eigenvalues;   // ascending
  std::vector<double> expected;  // six zeros and the nine closed forms, ascending
  int zero_space_dim = 0;
  double max_abs_error = 0;
  bool matched = false;  // relative 1e-4, absolute 1e-8 for zeros
};

/// H_ij = -(r_i + r_j) d2I/da_i da_j at the stationary state (first derivatives of I vanish there).
/// Throws BoundaryParameter for |a12| >= 1/4 - 1e-3.
HessianReport hessian_at_stationary(const RateProfile& rates, double t, double a12);

/// Multiset comparison of sorted eigenvalue lists.
bool hessian_eigenvalues_match(const RealVector& numeric, const std::vector<double>& expected, double rel = 1e-4,
                               double zero_abs = 1e-8);

/// States 1/4 I + (I + 4 a0 sigma_z) (x) (a1 sigma_x + a2 sigma_y + a3 sigma_z) + (a4 sigma_x + a8 sigma_y + a12 sigma_z) (x) I.
struct ZeroSpaceCoordinates {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0, a4 = 0, a8 = 0, a12 = 0;
};

ComplexMatrix zero_space_state(const ZeroSpaceCoordinates& z);

/// Closed-form I on the family as a function of lambda = |(a1, a2, a3)|, the other coordinates held fixed.
double zero_space_mutual_information(const ZeroSpaceCoordinates& z, double lambda);

/// (a1^2 (gy+gz) + a2^2 (gx+gz) + a3^2 (gx+gy)) / lambda; non-negative under P-divisibility.
/// lambda itself shrinks at this rate: d lambda / ds = -zero_space_contraction_rate.
double zero_space_contraction_rate(const ZeroSpaceCoordinates& z, const std::array<double, 3>& gamma);

/// dI/dlambda * dlambda/ds at s = t. Throws DegenerateDirection for (a1, a2, a3) = 0 and
/// InvalidState if the coordinates do not give an interior state.
double zero_eigenspace_didt(const ZeroSpaceCoordinates& z, const RateProfile& rates, double t);

struct NeighborhoodScanResult {
  int samples = 0;       // requested
  int evaluated = 0;     // interior samples
  int violations = 0;    // didt > tolerance
  double violation_fraction = 0;
  double max_didt = 0;
  std::vector<double> didt_values;  // per requested sample; NaN where skipped
};

/// Quasi-random (Halton) points in the 15-ball of `radius` around 1/4 I + a12 sigma_z (x) I;
/// samples outside the interior of the state set are skipped.
NeighborhoodScanResult neighborhood_scan(const RateProfile& rates, double t, double a12, double radius,
                                         int samples, double tolerance = 1e-10, int threads = 0);

}  // namespace corrwit
