#include "corrwit/mutinfo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "corrwit/parallel.hpp"

namespace corrwit {

ComplexMatrix basis_element(int i) {
  if (i < 0 || i > 15) throw Error(ErrorKind::BadSubsystemIndex, "basis index must be 0..15");
  return tensor_product(pauli(i / 4), pauli(i % 4));
}

PauliBasisCoordinates coords_from_state(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw Error(ErrorKind::DimensionMismatch, "coordinates need a 4x4 matrix");
  PauliBasisCoordinates c;
  for (int i = 0; i < 16; ++i) c[i] = 0.25 * (rho * basis_element(i)).trace().real();
  return c;
}

ComplexMatrix state_from_coords(const PauliBasisCoordinates& c) {
  ComplexMatrix m = 0.25 * ComplexMatrix::Identity(4, 4);
  for (int i = 1; i < 16; ++i) m += c[i] * basis_element(i);
  return m;
}

std::array<double, 16> coordinate_decay_rates(const std::array<double, 3>& g) {
  const std::array<double, 4> by_label{0, g[1] + g[2], g[0] + g[2], g[0] + g[1]};
  std::array<double, 16> r{};
  for (int i = 0; i < 16; ++i) r[i] = by_label[i % 4];
  return r;
}

double mutual_information(const ComplexMatrix& rho, const SubsystemDims& dims) {
  if (dims.size() != 2) throw Error(ErrorKind::DimensionMismatch, "mutual information needs two subsystems");
  detail::check_dims(rho.rows(), dims);
  const ComplexMatrix ra = partial_trace(rho, dims, {0});
  const ComplexMatrix rb = partial_trace(rho, dims, {1});
  return von_neumann_entropy(ra) + von_neumann_entropy(rb) - von_neumann_entropy(rho);
}

double mutual_information(const State& rho) { return mutual_information(rho.matrix(), rho.dims()); }

// ---------------------------------------------------------------------------

SpectralFunction SpectralFunction::trace() {
  return {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

SpectralFunction SpectralFunction::sum_of_squares() {
  return {[](double x) { return x * x; }, [](double x) { return 2 * x; }, [](double) { return 2.0; }};
}

SpectralFunction SpectralFunction::entropy() {
  return {[](double x) { return x > 0 ? -x * std::log(x) : 0.0; },
          [](double x) { return -(std::log(x) + 1); },
          [](double x) { return -1 / x; }};
}

HermitianFamily HermitianFamily::affine(ComplexMatrix base, std::vector<ComplexMatrix> directions) {
  HermitianFamily f;
  f.num_params = static_cast<int>(directions.size());
  auto dirs = std::make_shared<std::vector<ComplexMatrix>>(std::move(directions));
  f.value = [base, dirs](const RealVector& a) {
    ComplexMatrix m = base;
    for (std::size_t i = 0; i < dirs->size(); ++i)
      if (a(i) != 0) m += a(i) * (*dirs)[i];
    return m;
  };
  f.first = [dirs](const RealVector&, int i) { return (*dirs)[i]; };
  return f;
}

double SpectralDerivativeWorkspace::alpha(int i, int j, int k, int l) const {
  const int p = num_params(), n = dim();
  return alpha_data[((static_cast<std::size_t>(i) * p + j) * n + k) * n + l];
}

namespace {

// fixed unitary used to re-choose eigenvectors inside a degenerate cluster
ComplexMatrix tie_break_unitary(int m, int choice) {
  ComplexMatrix g(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      g(r, c) = Complex(std::cos(0.7 * (r + 1) * (c + 2) + choice), std::sin(1.3 * (r + 2) * (c + 1) * choice));
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  return qr.householderQ() * ComplexMatrix::Identity(m, m);
}

}  // namespace

SpectralDerivativeWorkspace spectral_derivatives(const HermitianFamily& family, const SpectralFunction& f,
                                                 const RealVector& a, double degeneracy_tol, int eigenvector_choice,
                                                 int order) {
  const int p = family.num_params;
  if (a.size() != p) throw Error(ErrorKind::DimensionMismatch, "parameter vector has the wrong length");
  const auto eig = hermitian_eig(family.value(a));
  SpectralDerivativeWorkspace w;
  w.eigenvalues = eig.eigenvalues;
  w.eigenvectors = eig.eigenvectors;
  const int n = static_cast<int>(w.eigenvalues.size());

  // clusters of (numerically) equal eigenvalues
  const double scale = std::max(1.0, w.eigenvalues.cwiseAbs().maxCoeff());
  std::vector<int> cluster(n, 0);
  for (int k = 1; k < n; ++k)
    cluster[k] = cluster[k - 1] + (w.eigenvalues(k) - w.eigenvalues(k - 1) > degeneracy_tol * scale ? 1 : 0);
  if (eigenvector_choice != 0) {
    for (int k = 0; k < n;) {
      int m = 1;
      while (k + m < n && cluster[k + m] == cluster[k]) ++m;
      if (m > 1) w.eigenvectors.middleCols(k, m) = w.eigenvectors.middleCols(k, m) * tie_break_unitary(m, eigenvector_choice);
      k += m;
    }
  }

  std::vector<double> g1(n), g2(n);
  for (int k = 0; k < n; ++k) {
    g1[k] = f.dg(w.eigenvalues(k));
    g2[k] = f.d2g(w.eigenvalues(k));
    if (!std::isfinite(g1[k]) || (order >= 2 && !std::isfinite(g2[k])))
      throw Error(ErrorKind::DegenerateSpectrumUnsupported, "spectral function is not differentiable at this spectrum");
  }

  std::vector<ComplexMatrix> b(p);
  for (int i = 0; i < p; ++i) b[i] = w.eigenvectors.adjoint() * family.first(a, i) * w.eigenvectors;
  w.h.resize(p, n);
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < n; ++k) w.h(i, k) = b[i](k, k).real();
  w.gradient = w.h * Eigen::Map<const RealVector>(g1.data(), n);
  if (order < 2) return w;

  w.alpha_data.assign(static_cast<std::size_t>(p) * p * n * n, 0.0);
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (k == l) continue;
          const double v = (b[i](k, l) * b[j](l, k) + b[j](k, l) * b[i](l, k)).real();
          w.alpha_data[((static_cast<std::size_t>(i) * p + j) * n + k) * n + l] = v;
          w.alpha_data[((static_cast<std::size_t>(j) * p + i) * n + k) * n + l] = v;
        }

  w.hk.assign(n, Eigen::MatrixXd::Zero(p, p));
  w.eta = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j) {
      ComplexMatrix second;
      if (family.second) second = w.eigenvectors.adjoint() * family.second(a, i, j) * w.eigenvectors;
      double eta = 0;
      for (int k = 0; k < n; ++k) {
        double hij = family.second ? second(k, k).real() : 0.0;
        for (int l = 0; l < n; ++l) {
          if (l == k) continue;
          if (cluster[l] != cluster[k]) {
            hij += w.alpha(i, j, k, l) / (w.eigenvalues(k) - w.eigenvalues(l));
          } else if (k < l) {
            eta += w.alpha(i, j, k, l) * 0.5 * (g2[k] + g2[l]);
          }
        }
        w.hk[k](i, j) = w.hk[k](j, i) = hij;
      }
      w.eta(i, j) = w.eta(j, i) = eta;
    }

  w.hessian = w.eta;
  for (int k = 0; k < n; ++k) {
    w.hessian += g2[k] * w.h.col(k) * w.h.col(k).transpose();
    w.hessian += g1[k] * w.hk[k];
  }
  return w;
}

namespace {

struct MutualInformationFamilies {
  HermitianFamily joint, anc, sys;

  MutualInformationFamilies() {
    std::vector<ComplexMatrix> dj, da, ds;
    for (int i = 1; i < 16; ++i) {
      dj.push_back(basis_element(i));
      da.push_back(i % 4 == 0 ? ComplexMatrix(2.0 * pauli(i / 4)) : ComplexMatrix::Zero(2, 2));
      ds.push_back(i / 4 == 0 ? ComplexMatrix(2.0 * pauli(i % 4)) : ComplexMatrix::Zero(2, 2));
    }
    joint = HermitianFamily::affine(0.25 * ComplexMatrix::Identity(4, 4), dj);
    anc = HermitianFamily::affine(0.5 * ComplexMatrix::Identity(2, 2), da);
    sys = HermitianFamily::affine(0.5 * ComplexMatrix::Identity(2, 2), ds);
  }
};

const MutualInformationFamilies& families() {
  static const MutualInformationFamilies f;
  return f;
}

RealVector free_coords(const PauliBasisCoordinates& c) {
  RealVector a(15);
  for (int i = 1; i < 16; ++i) a(i - 1) = c[i];
  return a;
}

}  // namespace

MutualInformationDerivatives mutual_information_derivatives(const PauliBasisCoordinates& c, int eigenvector_choice,
                                                            int order) {
  const RealVector a = free_coords(c);
  const auto& fam = families();
  const auto entropy = SpectralFunction::entropy();
  const auto joint = spectral_derivatives(fam.joint, entropy, a, 1e-9, eigenvector_choice, order);
  if (!(joint.eigenvalues.minCoeff() > kInteriorTol))
    throw Error(ErrorKind::BoundaryState, "state is not in the interior of the state space");
  const auto anc = spectral_derivatives(fam.anc, entropy, a, 1e-9, eigenvector_choice, order);
  const auto sys = spectral_derivatives(fam.sys, entropy, a, 1e-9, eigenvector_choice, order);

  MutualInformationDerivatives out;
  auto value = [](const RealVector& w) {
    double s = 0;
    for (Eigen::Index k = 0; k < w.size(); ++k) s += w(k) > 0 ? -w(k) * std::log(w(k)) : 0.0;
    return s;
  };
  out.value = value(anc.eigenvalues) + value(sys.eigenvalues) - value(joint.eigenvalues);
  out.gradient = anc.gradient + sys.gradient - joint.gradient;
  if (order >= 2) out.hessian = anc.hessian + sys.hessian - joint.hessian;
  return out;
}

namespace {

void check_two_qubits(const State& rho) {
  if (rho.dims() != SubsystemDims{2, 2}) throw Error(ErrorKind::DimensionMismatch, "expected a two-qubit state");
}

double didt_from_coords(const PauliBasisCoordinates& c, const std::array<double, 3>& gamma) {
  const auto d = mutual_information_derivatives(c, 0, 1);
  const auto r = coordinate_decay_rates(gamma);
  double s = 0;
  for (int i = 1; i < 16; ++i) s += d.gradient(i - 1) * (-r[i] * c[i]);
  return s;
}

}  // namespace

double didt(const State& rho, const RateProfile& rates, double t) {
  check_two_qubits(rho);
  return didt_from_coords(coords_from_state(rho.matrix()), rates.at(t));
}

double didt_finite_difference(const State& rho, const RateProfile& rates, double t, double h) {
  check_two_qubits(rho);
  if (!(hermitian_eigenvalues(rho.matrix()).minCoeff() > kInteriorTol))
    throw Error(ErrorKind::BoundaryState, "state is not in the interior of the state space");
  const SubsystemDims dims{2, 2};
  const ComplexMatrix plus = apply_on_factor(decay_factors_unordered(rates, t, t + h), rho.matrix(), dims, 1);
  const ComplexMatrix minus = apply_on_factor(decay_factors_unordered(rates, t, t - h), rho.matrix(), dims, 1);
  return (mutual_information(plus, dims) - mutual_information(minus, dims)) / (2 * h);
}

// ---------------------------------------------------------------------------

std::array<double, 9> hessian_closed_form(const std::array<double, 3>& g, double a) {
  const double gyz = g[1] + g[2], gxz = g[0] + g[2], gxy = g[0] + g[1];
  const double ratio = (16 * a * a + 1) / (16 * a * a - 1);
  const double at = std::abs(a) < 1e-4 ? 4 + (64.0 / 3) * a * a : std::atanh(4 * a) / a;
  return {32 * gyz * ratio, 32 * gxz * ratio, 32 * gxy * ratio, -8 * gyz * at, -8 * gyz * at,
          -8 * gxz * at,    -8 * gxz * at,    -8 * gxy * at,    -8 * gxy * at};
}

bool hessian_eigenvalues_match(const RealVector& numeric, const std::vector<double>& expected, double rel,
                               double zero_abs) {
  if (numeric.size() != static_cast<Eigen::Index>(expected.size())) return false;
  std::vector<double> num(numeric.data(), numeric.data() + numeric.size());
  std::vector<double> exp = expected;
  std::sort(num.begin(), num.end());
  std::sort(exp.begin(), exp.end());
  for (std::size_t k = 0; k < num.size(); ++k) {
    const double tol = exp[k] == 0 ? zero_abs : rel * std::abs(exp[k]);
    if (!(std::abs(num[k] - exp[k]) <= tol)) return false;
  }
  return true;
}

HessianReport hessian_at_stationary(const RateProfile& rates, double t, double a12) {
  if (!(std::abs(a12) < 0.25 - 1e-3)) throw Error(ErrorKind::BoundaryParameter, "|a12| must be below 1/4 - 1e-3");
  PauliBasisCoordinates c;
  c[12] = a12;
  const auto gamma = rates.at(t);
  const auto r = coordinate_decay_rates(gamma);
  const auto d = mutual_information_derivatives(c);

  HessianReport rep;
  rep.a12 = a12;
  rep.t = t;
  rep.hessian.resize(15, 15);
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) rep.hessian(i, j) = -(r[i + 1] + r[j + 1]) * d.hessian(i, j);
  rep.hessian = 0.5 * (rep.hessian + rep.hessian.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.hessian, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "Hessian eigensolver failed");
  rep.eigenvalues = es.eigenvalues();

  rep.expected.assign(6, 0.0);
  for (double v : hessian_closed_form(gamma, a12)) rep.expected.push_back(v);
  std::sort(rep.expected.begin(), rep.expected.end());
  for (Eigen::Index k = 0; k < rep.eigenvalues.size(); ++k) {
    if (std::abs(rep.eigenvalues(k)) <= 1e-8) ++rep.zero_space_dim;
    rep.max_abs_error = std::max(rep.max_abs_error, std::abs(rep.eigenvalues(k) - rep.expected[k]));
  }
  rep.matched = hessian_eigenvalues_match(rep.eigenvalues, rep.expected);
  return rep;
}

// ---------------------------------------------------------------------------

ComplexMatrix zero_space_state(const ZeroSpaceCoordinates& z) {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix sys = z.a1 * pauli(1) + z.a2 * pauli(2) + z.a3 * pauli(3);
  const ComplexMatrix anc = z.a4 * pauli(1) + z.a8 * pauli(2) + z.a12 * pauli(3);
  return 0.25 * ComplexMatrix::Identity(4, 4) + tensor_product(ComplexMatrix(i2 + 4 * z.a0 * pauli(3)), sys) +
         tensor_product(anc, i2);
}

namespace {

double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

}  // namespace

double zero_space_mutual_information(const ZeroSpaceCoordinates& z, double lambda) {
  const double wm = std::sqrt(z.a4 * z.a4 + z.a8 * z.a8 + std::pow(z.a12 - 4 * z.a0 * lambda, 2));
  const double wp = std::sqrt(z.a4 * z.a4 + z.a8 * z.a8 + std::pow(z.a12 + 4 * z.a0 * lambda, 2));
  const double eta = std::sqrt(z.a4 * z.a4 + z.a8 * z.a8 + z.a12 * z.a12);
  return xlogx(0.25 - lambda - wm) + xlogx(0.25 - lambda + wm) + xlogx(0.25 + lambda + wp) +
         xlogx(0.25 + lambda - wp) - xlogx(0.5 + 2 * lambda) - xlogx(0.5 - 2 * lambda) - xlogx(0.5 + 2 * eta) -
         xlogx(0.5 - 2 * eta);
}

double zero_space_contraction_rate(const ZeroSpaceCoordinates& z, const std::array<double, 3>& g) {
  const double lambda = std::sqrt(z.a1 * z.a1 + z.a2 * z.a2 + z.a3 * z.a3);
  if (!(lambda > 1e-14)) throw Error(ErrorKind::DegenerateDirection, "(a1, a2, a3) must be non-zero");
  return (z.a1 * z.a1 * (g[2] + g[1]) + z.a2 * z.a2 * (g[0] + g[2]) + z.a3 * z.a3 * (g[0] + g[1])) / lambda;
}

double zero_eigenspace_didt(const ZeroSpaceCoordinates& z, const RateProfile& rates, double t) {
  const double lambda = std::sqrt(z.a1 * z.a1 + z.a2 * z.a2 + z.a3 * z.a3);
  if (!(lambda > 1e-14)) throw Error(ErrorKind::DegenerateDirection, "(a1, a2, a3) must be non-zero");
  if (!(hermitian_eigenvalues(zero_space_state(z)).minCoeff() > kInteriorTol))
    throw Error(ErrorKind::InvalidState, "coordinates do not give an interior state");

  const double q = z.a4 * z.a4 + z.a8 * z.a8;
  const double um = z.a12 - 4 * z.a0 * lambda, up = z.a12 + 4 * z.a0 * lambda;
  const double wm = std::sqrt(q + um * um), wp = std::sqrt(q + up * up);
  const double dwm = wm > 0 ? -4 * z.a0 * um / wm : 0.0;
  const double dwp = wp > 0 ? 4 * z.a0 * up / wp : 0.0;
  auto dxlogx = [](double x, double dx) { return (std::log(x) + 1) * dx; };
  const double di = dxlogx(0.25 - lambda - wm, -1 - dwm) + dxlogx(0.25 - lambda + wm, -1 + dwm) +
                    dxlogx(0.25 + lambda + wp, 1 + dwp) + dxlogx(0.25 + lambda - wp, 1 - dwp) -
                    dxlogx(0.5 + 2 * lambda, 2) - dxlogx(0.5 - 2 * lambda, -2);
  return di * -zero_space_contraction_rate(z, rates.at(t));
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<int, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0, f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace

NeighborhoodScanResult neighborhood_scan(const RateProfile& rates, double t, double a12, double radius, int samples,
                                         double tolerance, int threads) {
  if (!(std::abs(a12) < 0.25)) throw Error(ErrorKind::BoundaryParameter, "stationary point must be interior");
  if (!(radius >= 0) || samples < 0) throw Error(ErrorKind::PreconditionViolated, "radius and samples must be non-negative");
  const auto gamma = rates.at(t);
  NeighborhoodScanResult res;
  res.samples = samples;
  res.didt_values = parallel_map(
      static_cast<std::size_t>(samples),
      [&](std::size_t k) {
        const std::uint64_t index = k + 1;
        RealVector v(15);
        for (int j = 0; j < 15; ++j) v(j) = 2 * radical_inverse(index, kPrimes[j]) - 1;
        const double norm = v.norm();
        if (!(norm > 0)) return std::numeric_limits<double>::quiet_NaN();
        const double rho = radius * std::pow(radical_inverse(index, kPrimes[15]), 1.0 / 15);
        PauliBasisCoordinates c;
        c[12] = a12;
        for (int j = 0; j < 15; ++j) c[j + 1] += rho * v(j) / norm;
        if (!(hermitian_eigenvalues(state_from_coords(c)).minCoeff() > kInteriorTol))
          return std::numeric_limits<double>::quiet_NaN();
        return didt_from_coords(c, gamma);
      },
      threads);
  res.max_didt = -std::numeric_limits<double>::infinity();
  for (double v : res.didt_values) {
    if (std::isnan(v)) continue;
    ++res.evaluated;
    if (v > tolerance) ++res.violations;
    res.max_didt = std::max(res.max_didt, v);
  }
  res.violation_fraction = res.evaluated ? static_cast<double>(res.violations) / res.evaluated : 0.0;
  return res;
}

}  // namespace corrwit
