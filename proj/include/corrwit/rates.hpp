#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace corrwit {

/// One decay rate gamma_k(t). `antiderivative`, when set, is an exact primitive
/// used in place of quadrature.
struct RateFunction {
  std::function<double(double)> value;
  std::function<double(double)> antiderivative;

  bool has_antiderivative() const { return static_cast<bool>(antiderivative); }
};

/// Sample of a tabulated profile: rates at time t.
struct RateSample {
  double t;
  std::array<double, 3> gamma;
};

/// The three time-dependent rates (gamma_x, gamma_y, gamma_z) of a random-unitary
/// qubit evolution on [0, domain_end]. Immutable after construction.
class RateProfile {
 public:
  static constexpr double kDefaultDomainEnd = 10.0;

  RateProfile(std::string name, std::array<RateFunction, 3> rates, double domain_end);

  static RateProfile constant(double cx, double cy, double cz, double domain_end = kDefaultDomainEnd);
  /// gamma_x = gamma_y = 1, gamma_z = -tanh t. P-divisible for all t, CP-divisible only at t = 0.
  static RateProfile eternal(double domain_end = kDefaultDomainEnd);
  /// Linear interpolation between samples; exact trapezoid antiderivative.
  static RateProfile piecewise(std::vector<RateSample> table);
  /// CSV with header `t,gamma_x,gamma_y,gamma_z` and strictly increasing t.
  static RateProfile from_csv(std::istream& in);
  static RateProfile from_csv_file(const std::string& path);
  /// Arbitrary rate functions without known primitives; integrals use adaptive Simpson.
  static RateProfile custom(std::string name, std::function<double(double)> gx,
                            std::function<double(double)> gy, std::function<double(double)> gz,
                            double domain_end);

  const std::string& name() const noexcept { return name_; }
  double domain_end() const noexcept { return domain_end_; }
  const RateFunction& rate(int k) const { return rates_.at(k); }

  std::array<double, 3> at(double t) const;

  /// Integral of gamma_k over [t0, t1] (t0 <= t1 not required).
  double integral(int k, double t0, double t1) const;

  /// Largest jump between neighbouring samples on a uniform grid of `samples` points.
  /// Throws InvalidProfile on non-finite values.
  double spot_check(int samples = 257) const;

 private:
  std::string name_;
  std::array<RateFunction, 3> rates_;
  double domain_end_;
};

/// Adaptive Simpson quadrature to absolute tolerance `tol`. Throws QuadratureFailure
/// when the recursion depth is exhausted before the error estimate meets `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                        int max_depth = 48);

}  // namespace corrwit
