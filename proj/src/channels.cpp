#include "corrwit/channels.hpp"

#include <cmath>

#include "corrwit/parallel.hpp"

namespace corrwit {

namespace {

void check_time(const RateProfile& rates, double t) {
  if (!(t >= 0) || t > rates.domain_end() * (1 + 1e-12))
    throw Error(ErrorKind::TimeOrderViolation, "time outside [0, domain_end]");
}

}  // namespace

PauliChannelMap decay_factors_unordered(const RateProfile& rates, double t0, double t1) {
  const double ix = rates.integral(0, t0, t1);
  const double iy = rates.integral(1, t0, t1);
  const double iz = rates.integral(2, t0, t1);
  return {std::exp(-(iy + iz)), std::exp(-(ix + iz)), std::exp(-(ix + iy))};
}

PauliChannelMap decay_factors(const RateProfile& rates, double t0, double t1) {
  if (!(t0 <= t1)) throw Error(ErrorKind::TimeOrderViolation, "decay factors need t0 <= t1");
  check_time(rates, t0);
  check_time(rates, t1);
  return decay_factors_unordered(rates, t0, t1);
}

ComplexMatrix apply_on_factor(const PauliChannelMap& ch, const ComplexMatrix& op, const SubsystemDims& dims,
                              int qubit_factor) {
  detail::check_dims(op.rows(), dims);
  if (op.rows() != op.cols()) throw Error(ErrorKind::DimensionMismatch, "operator must be square");
  if (qubit_factor < 0 || qubit_factor >= static_cast<int>(dims.size()) || dims[qubit_factor] != 2)
    throw Error(ErrorKind::BadSubsystemIndex, "channel factor must be a qubit subsystem");
  int stride = 1;
  for (std::size_t s = qubit_factor + 1; s < dims.size(); ++s) stride *= dims[s];
  const Complex I(0, 1);
  const int n = static_cast<int>(op.rows());
  ComplexMatrix out(n, n);
  for (int i = 0; i < n; ++i) {
    if ((i / stride) % 2 != 0) continue;
    for (int j = 0; j < n; ++j) {
      if ((j / stride) % 2 != 0) continue;
      const Complex a = op(i, j), b = op(i, j + stride), c = op(i + stride, j), e = op(i + stride, j + stride);
      const Complex c0 = a + e, c1 = b + c, c2 = I * (b - c), c3 = a - e;
      out(i, j) = 0.5 * (c0 + ch.d_z * c3);
      out(i + stride, j + stride) = 0.5 * (c0 - ch.d_z * c3);
      out(i, j + stride) = 0.5 * (ch.d_x * c1 - I * ch.d_y * c2);
      out(i + stride, j) = 0.5 * (ch.d_x * c1 + I * ch.d_y * c2);
    }
  }
  return out;
}

ComplexMatrix apply_channel(const PauliChannelMap& ch, const ComplexMatrix& op) {
  if (op.rows() != 2 || op.cols() != 2) throw Error(ErrorKind::DimensionMismatch, "qubit channel needs a 2x2 input");
  return apply_on_factor(ch, op, {2}, 0);
}

State apply_channel(const PauliChannelMap& ch, const State& rho) {
  if (rho.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "qubit channel needs a qubit state");
  return State(apply_channel(ch, rho.matrix()), rho.dims());
}

ExtendedChannel::ExtendedChannel(PauliChannelMap ch, SubsystemDims ancilla_dims)
    : channel_(ch), dims_(std::move(ancilla_dims)) {
  for (int d : dims_)
    if (d <= 0) throw Error(ErrorKind::BadSubsystemIndex, "ancilla dimension must be positive");
  dims_.push_back(2);
}

ComplexMatrix ExtendedChannel::operator()(const ComplexMatrix& op) const {
  return apply_on_factor(channel_, op, dims_, static_cast<int>(dims_.size()) - 1);
}

State ExtendedChannel::operator()(const State& rho) const {
  if (rho.dim() != total_dim(dims_)) throw Error(ErrorKind::DimensionMismatch, "state does not match channel dims");
  return State((*this)(rho.matrix()), dims_);
}

ExtendedChannel extend_with_identity(const PauliChannelMap& ch, const SubsystemDims& ancilla_dims) {
  return ExtendedChannel(ch, ancilla_dims);
}

ChoiMatrix choi_matrix(const PauliChannelMap& ch) {
  const ComplexMatrix phi = projector<double>(phi_plus<double>(2));
  return {apply_on_factor(ch, phi, {2, 2}, 1), ch};
}

std::array<double, 4> choi_eigenvalues_closed_form(const PauliChannelMap& ch) {
  const double x = ch.d_x, y = ch.d_y, z = ch.d_z;
  return {(1 + z + x + y) / 4, (1 + z - x - y) / 4, (1 - z + x - y) / 4, (1 - z - x + y) / 4};
}

double min_eigenvalue(const ChoiMatrix& choi) { return hermitian_eigenvalues(choi.matrix).minCoeff(); }

bool is_cp(const ChoiMatrix& choi, double tol) { return min_eigenvalue(choi) >= -tol; }

bool is_cp_divisible_at(const RateProfile& rates, double t) {
  check_time(rates, t);
  const auto g = rates.at(t);
  return g[0] >= -kRateSignTol && g[1] >= -kRateSignTol && g[2] >= -kRateSignTol;
}

bool is_p_divisible_at(const RateProfile& rates, double t) {
  check_time(rates, t);
  const auto g = rates.at(t);
  return g[1] + g[2] >= -kRateSignTol && g[0] + g[2] >= -kRateSignTol && g[0] + g[1] >= -kRateSignTol;
}

std::vector<DivisibilityVerdict> classify_interval(const RateProfile& rates,
                                                   const std::vector<std::pair<double, double>>& grid,
                                                   double tol, int threads) {
  for (const auto& [t, s] : grid)
    if (!(t <= s)) throw Error(ErrorKind::TimeOrderViolation, "grid pairs must satisfy t <= s");
  return parallel_map(
      grid.size(),
      [&](std::size_t i) {
        const auto [t, s] = grid[i];
        DivisibilityVerdict v;
        v.t = t;
        v.s = s;
        v.gamma = rates.at(t);
        v.map = decay_factors(rates, t, s);
        v.choi_min_eigenvalue = min_eigenvalue(choi_matrix(v.map));
        v.cp_divisible = is_cp_divisible_at(rates, t);
        v.p_divisible = is_p_divisible_at(rates, t);
        v.choi_cp = v.choi_min_eigenvalue >= -tol;

        constexpr int kSamples = 16;
        bool cp_on_interval = true;
        for (int k = 0; k <= kSamples && cp_on_interval; ++k)
          cp_on_interval = is_cp_divisible_at(rates, t + (s - t) * k / kSamples);
        if (cp_on_interval && !v.choi_cp)
          throw Error(ErrorKind::ConsistencyViolation,
                      "non-negative rates on [t, s] but intermediate map is not CP");
        return v;
      },
      threads);
}

int GkslGenerator::dim(double t) const {
  if (hamiltonian) return static_cast<int>(hamiltonian(t).rows());
  if (!jump_ops.empty()) return static_cast<int>(jump_ops.front()(t).rows());
  return 0;
}

GkslGenerator GkslGenerator::random_unitary(const RateProfile& profile) {
  GkslGenerator g;
  g.hamiltonian = [](double) { return ComplexMatrix::Zero(2, 2).eval(); };
  for (int k = 0; k < 3; ++k) {
    const ComplexMatrix op = pauli<double>(k + 1) / std::sqrt(2.0);
    g.jump_ops.push_back([op](double) { return op; });
    g.rates.push_back([profile, k](double t) { return profile.at(t)[k]; });
  }
  return g;
}

ComplexMatrix gksl_apply(const GkslGenerator& gen, const ComplexMatrix& rho, double t) {
  if (gen.jump_ops.size() != gen.rates.size())
    throw Error(ErrorKind::DimensionMismatch, "one rate per jump operator required");
  const Eigen::Index n = rho.rows();
  if (rho.cols() != n) throw Error(ErrorKind::DimensionMismatch, "rho must be square");
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  if (gen.hamiltonian) {
    const ComplexMatrix h = gen.hamiltonian(t);
    if (h.rows() != n) throw Error(ErrorKind::DimensionMismatch, "Hamiltonian dimension mismatch");
    if (hermiticity_error(h) > 1e-10) throw Error(ErrorKind::NotHermitian, "Hamiltonian must be Hermitian");
    out += Complex(0, 1) * (h * rho - rho * h);
  }
  for (std::size_t k = 0; k < gen.jump_ops.size(); ++k) {
    const ComplexMatrix g = gen.jump_ops[k](t);
    if (g.rows() != n) throw Error(ErrorKind::DimensionMismatch, "jump operator dimension mismatch");
    const ComplexMatrix gdg = g.adjoint() * g;
    out += gen.rates[k](t) * (g * rho * g.adjoint() - 0.5 * (gdg * rho + rho * gdg));
  }
  return out;
}

ComplexMatrix gksl_apply(const GkslGenerator& gen, const State& rho, double t) {
  return gksl_apply(gen, rho.matrix(), t);
}

RateProfile tune_rates_shrink_image(const RateProfile& rates, double epsilon, double t_activate,
                                    std::optional<double> burst_rate) {
  if (!(epsilon > 0 && epsilon <= 1)) throw Error(ErrorKind::InvalidEpsilon, "epsilon must lie in (0, 1]");
  if (epsilon == 1) return rates;
  if (!(t_activate > 0 && t_activate < rates.domain_end()))
    throw Error(ErrorKind::PreconditionViolated, "activation time must lie in (0, domain_end)");
  const double r = burst_rate.value_or(-std::log(epsilon) / t_activate);
  if (!(r > 0)) throw Error(ErrorKind::InvalidEpsilon, "burst rate must be positive");
  // every pairwise sum integrates to 2 r t_activate
  if (std::exp(-2 * r * t_activate) > epsilon * (1 + 1e-12))
    throw Error(ErrorKind::InvalidEpsilon, "burst too weak to shrink decay factors below epsilon");

  std::array<RateFunction, 3> tuned;
  for (int k = 0; k < 3; ++k) {
    const RateFunction base = rates.rate(k);
    auto value = [base, r, t_activate](double t) { return t < t_activate ? r : base.value(t); };
    std::function<double(double)> primitive;
    if (base.has_antiderivative()) {
      primitive = [base, r, t_activate](double t) {
        return t < t_activate ? r * t : r * t_activate + base.antiderivative(t) - base.antiderivative(t_activate);
      };
    } else {
      primitive = [base, r, t_activate](double t) {
        return t < t_activate ? r * t : r * t_activate + adaptive_simpson(base.value, t_activate, t);
      };
    }
    tuned[k] = {value, primitive};
  }
  return RateProfile("tuned(" + rates.name() + ")", std::move(tuned), rates.domain_end());
}

}  // namespace corrwit
