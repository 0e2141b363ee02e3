#pragma once

// Dense complex linear algebra for small composite quantum systems.
//
// Everything here is templated on the real scalar type; the rest of the
// library instantiates it with double through the aliases at the bottom.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "corrwit/errors.hpp"

namespace corrwit {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using SubsystemDims = std::vector<int>;

// Pauli matrices indexed 0..3 as {I, X, Y, Z}.
template <typename Real = double>
CMatrix<Real> pauli(int k) {
  using C = std::complex<Real>;
  CMatrix<Real> m = CMatrix<Real>::Zero(2, 2);
  switch (k) {
    case 0: m(0, 0) = 1; m(1, 1) = 1; break;
    case 1: m(0, 1) = 1; m(1, 0) = 1; break;
    case 2: m(0, 1) = C(0, -1); m(1, 0) = C(0, 1); break;
    case 3: m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw Error(ErrorKind::BadSubsystemIndex, "Pauli index must be 0..3");
  }
  return m;
}

template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real hermiticity_error(
    const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() == 0) return 0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Real>
struct EigenDecomposition {
  RVector<Real> eigenvalues;   // ascending
  CMatrix<Real> eigenvectors;  // orthonormal columns
};

template <typename Derived>
EigenDecomposition<typename Eigen::NumTraits<typename Derived::Scalar>::Real> hermitian_eig(
    const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (m.rows() != m.cols())
    throw Error(ErrorKind::DimensionMismatch, "eigendecomposition needs a square matrix");
  if (!m.allFinite()) throw Error(ErrorKind::NotHermitian, "matrix has non-finite entries");
  if (hermiticity_error(m) > tol)
    throw Error(ErrorKind::NotHermitian, "max |M - M^dagger| exceeds tolerance");
  CMatrix<Real> h = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(h);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "self-adjoint eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename Derived>
RVector<typename Eigen::NumTraits<typename Derived::Scalar>::Real> hermitian_eigenvalues(
    const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (m.rows() != m.cols())
    throw Error(ErrorKind::DimensionMismatch, "eigenvalues need a square matrix");
  if (hermiticity_error(m) > tol)
    throw Error(ErrorKind::NotHermitian, "max |M - M^dagger| exceeds tolerance");
  CMatrix<Real> h = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "self-adjoint eigensolver did not converge");
  return solver.eigenvalues();
}

template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> tensor_product(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Out = Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Out out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline int total_dim(const SubsystemDims& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

namespace detail {

// Row-major digit expansion of a composite index over `dims`.
inline std::vector<int> digits_of(int index, const SubsystemDims& dims) {
  std::vector<int> d(dims.size());
  for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
    d[s] = index % dims[s];
    index /= dims[s];
  }
  return d;
}

inline void check_dims(Eigen::Index rows, const SubsystemDims& dims) {
  if (dims.empty()) throw Error(ErrorKind::DimensionMismatch, "empty subsystem list");
  for (int d : dims)
    if (d <= 0) throw Error(ErrorKind::DimensionMismatch, "subsystem dimension must be positive");
  if (total_dim(dims) != rows)
    throw Error(ErrorKind::DimensionMismatch, "subsystem dimensions do not multiply to matrix size");
}

}  // namespace detail

/// Trace out every subsystem not listed in `keep`. Kept factors stay in their original order.
template <typename Real>
CMatrix<Real> partial_trace(const CMatrix<Real>& m, const SubsystemDims& dims, std::vector<int> keep) {
  detail::check_dims(m.rows(), dims);
  if (keep.empty()) throw Error(ErrorKind::BadSubsystemIndex, "keep set is empty");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int k : keep)
    if (k < 0 || k >= static_cast<int>(dims.size()))
      throw Error(ErrorKind::BadSubsystemIndex, "subsystem index out of range");

  std::vector<bool> kept(dims.size(), false);
  for (int k : keep) kept[k] = true;
  SubsystemDims keep_dims, trace_dims;
  for (std::size_t s = 0; s < dims.size(); ++s) (kept[s] ? keep_dims : trace_dims).push_back(dims[s]);
  const int dk = total_dim(keep_dims);
  const int dt = trace_dims.empty() ? 1 : total_dim(trace_dims);

  // full[k][t] = composite index for kept multi-index k and traced multi-index t
  std::vector<std::vector<int>> full(dk, std::vector<int>(dt));
  for (int k = 0; k < dk; ++k) {
    auto kd = detail::digits_of(k, keep_dims);
    for (int t = 0; t < dt; ++t) {
      auto td = trace_dims.empty() ? std::vector<int>{} : detail::digits_of(t, trace_dims);
      int idx = 0, ki = 0, ti = 0;
      for (std::size_t s = 0; s < dims.size(); ++s) {
        int digit = kept[s] ? kd[ki++] : td[ti++];
        idx = idx * dims[s] + digit;
      }
      full[k][t] = idx;
    }
  }

  CMatrix<Real> out = CMatrix<Real>::Zero(dk, dk);
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dk; ++j)
      for (int t = 0; t < dt; ++t) out(i, j) += m(full[i][t], full[j][t]);
  return out;
}

/// Transpose subsystem `sys` in the product basis.
template <typename Real>
CMatrix<Real> partial_transpose(const CMatrix<Real>& m, const SubsystemDims& dims, int sys) {
  detail::check_dims(m.rows(), dims);
  if (sys < 0 || sys >= static_cast<int>(dims.size()))
    throw Error(ErrorKind::BadSubsystemIndex, "subsystem index out of range");
  const int n = static_cast<int>(m.rows());
  int stride = 1;
  for (std::size_t s = sys + 1; s < dims.size(); ++s) stride *= dims[s];
  const int d = dims[sys];
  CMatrix<Real> out(n, n);
  for (int i = 0; i < n; ++i) {
    const int di = (i / stride) % d;
    for (int j = 0; j < n; ++j) {
      const int dj = (j / stride) % d;
      const int ii = i + (dj - di) * stride;
      const int jj = j + (di - dj) * stride;
      out(ii, jj) = m(i, j);
    }
  }
  return out;
}

template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real trace_norm(
    const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
  return hermitian_eigenvalues(m, tol).cwiseAbs().sum();
}

/// Operator norm of a Hermitian matrix (largest absolute eigenvalue).
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real operator_norm(
    const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
  return hermitian_eigenvalues(m, tol).cwiseAbs().maxCoeff();
}

/// -sum p ln p with eigenvalues below `cutoff` contributing zero.
template <typename Real>
Real shannon_entropy_nat(const RVector<Real>& p, Real cutoff = Real(1e-14)) {
  Real s = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > cutoff) s -= p(i) * std::log(p(i));
  return s;
}

template <typename Real>
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kPsdTol = -1e-10;

  DensityMatrix() = default;

  /// Validates Hermiticity, unit trace and positivity within the library tolerances.
  DensityMatrix(CMatrix<Real> m, SubsystemDims dims) : matrix_(std::move(m)), dims_(std::move(dims)) {
    if (matrix_.rows() != matrix_.cols())
      throw Error(ErrorKind::InvalidState, "density matrix must be square");
    detail::check_dims(matrix_.rows(), dims_);
    if (!matrix_.allFinite()) throw Error(ErrorKind::InvalidState, "non-finite entries");
    if (hermiticity_error(matrix_) > kHermitianTol)
      throw Error(ErrorKind::InvalidState, "not Hermitian");
    if (std::abs(matrix_.trace() - std::complex<Real>(1)) > kTraceTol)
      throw Error(ErrorKind::InvalidState, "trace differs from one");
    matrix_ = (matrix_ + matrix_.adjoint()).eval() / Real(2);
    if (hermitian_eigenvalues(matrix_).minCoeff() < kPsdTol)
      throw Error(ErrorKind::InvalidState, "negative eigenvalue below tolerance");
  }

  explicit DensityMatrix(CMatrix<Real> m) : DensityMatrix(m, SubsystemDims{static_cast<int>(m.rows())}) {}

  const CMatrix<Real>& matrix() const noexcept { return matrix_; }
  const SubsystemDims& dims() const noexcept { return dims_; }
  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }

 private:
  CMatrix<Real> matrix_;
  SubsystemDims dims_;
};

template <typename Real>
DensityMatrix<Real> partial_trace(const DensityMatrix<Real>& rho, std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  CMatrix<Real> reduced = partial_trace(rho.matrix(), rho.dims(), keep);
  SubsystemDims kept;
  for (int k : keep) kept.push_back(rho.dims()[k]);
  return DensityMatrix<Real>(std::move(reduced), std::move(kept));
}

template <typename Real>
Real trace_distance(const DensityMatrix<Real>& a, const DensityMatrix<Real>& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "trace distance of unequal dims");
  return trace_norm(a.matrix() - b.matrix()) / Real(2);
}

/// Spectrum of a density matrix with eigenvalues in [-1e-10, 0) clamped to zero.
template <typename Real>
RVector<Real> clamped_spectrum(const CMatrix<Real>& m) {
  RVector<Real> w = hermitian_eigenvalues(m);
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) < 0 && w(i) >= Real(-1e-10)) w(i) = 0;
  return w;
}

/// Natural-log von Neumann entropy; 0 ln 0 = 0.
template <typename Real>
Real von_neumann_entropy(const CMatrix<Real>& m) {
  return shannon_entropy_nat<Real>(clamped_spectrum<Real>(m));
}

template <typename Real>
Real von_neumann_entropy(const DensityMatrix<Real>& rho) {
  return von_neumann_entropy<Real>(rho.matrix());
}

// ---------------------------------------------------------------------------
// common states

template <typename Real = double>
CMatrix<Real> maximally_mixed(int d) {
  return CMatrix<Real>::Identity(d, d) / Real(d);
}

template <typename Real = double>
CVector<Real> basis_ket(int d, int i) {
  CVector<Real> v = CVector<Real>::Zero(d);
  v(i) = 1;
  return v;
}

template <typename Real = double>
CMatrix<Real> projector(const CVector<Real>& v) {
  return v * v.adjoint();
}

/// |Phi+> = sum_i |ii> / sqrt(d)
template <typename Real = double>
CVector<Real> phi_plus(int d) {
  CVector<Real> v = CVector<Real>::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = Real(1) / std::sqrt(Real(d));
  return v;
}

// ---------------------------------------------------------------------------
// random sampling (test and scan support)

template <typename Real = double, typename Rng>
CMatrix<Real> random_ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<Real> n(0, 1);
  CMatrix<Real> g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = std::complex<Real>(n(rng), n(rng));
  return g;
}

/// Haar-distributed unitary via QR with phase correction.
template <typename Real = double, typename Rng>
CMatrix<Real> random_unitary(int d, Rng& rng) {
  CMatrix<Real> g = random_ginibre<Real>(d, d, rng);
  Eigen::HouseholderQR<CMatrix<Real>> qr(g);
  CMatrix<Real> q = qr.householderQ() * CMatrix<Real>::Identity(d, d);
  CMatrix<Real> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const auto rii = r(i, i);
    if (std::abs(rii) > 0) q.col(i) *= rii / std::abs(rii);
  }
  return q;
}

template <typename Real = double, typename Rng>
CMatrix<Real> random_hermitian(int d, Rng& rng) {
  CMatrix<Real> g = random_ginibre<Real>(d, d, rng);
  return (g + g.adjoint()) / Real(2);
}

/// Hilbert-Schmidt random mixed state (full rank with probability one).
template <typename Real = double, typename Rng>
CMatrix<Real> random_density(int d, Rng& rng, int rank = -1) {
  if (rank <= 0) rank = d;
  CMatrix<Real> g = random_ginibre<Real>(d, rank, rng);
  CMatrix<Real> rho = g * g.adjoint();
  rho /= rho.trace().real();
  return (rho + rho.adjoint()) / Real(2);
}

template <typename Real = double, typename Rng>
CMatrix<Real> random_pure(int d, Rng& rng) {
  CVector<Real> v = random_ginibre<Real>(d, 1, rng);
  v.normalize();
  return v * v.adjoint();
}

// ---------------------------------------------------------------------------
// double-precision aliases used throughout the library

using Complex = std::complex<double>;
using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;
using RealVector = RVector<double>;
using State = DensityMatrix<double>;
using Spectrum = EigenDecomposition<double>;

}  // namespace corrwit
