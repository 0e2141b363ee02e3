#include "corrwit/probe.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace corrwit {

namespace {

ComplexMatrix hermitize(const ComplexMatrix& m) { return (m + m.adjoint()) / 2.0; }

ComplexMatrix sign_of(const ComplexMatrix& m) {
  const auto eig = hermitian_eig(hermitize(m), 1e-8);
  const double scale = std::max(1e-300, eig.eigenvalues.cwiseAbs().maxCoeff());
  RealVector s(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double x = eig.eigenvalues(i);
    s(i) = std::abs(x) <= 1e-14 * scale ? 0.0 : (x > 0 ? 1.0 : -1.0);
  }
  return eig.eigenvectors * s.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
}

// embeds a vector on (2-level ancilla) (x) S into (ancilla_dim) (x) S
ComplexVector embed(const ComplexVector& v, int ancilla_dim) {
  ComplexVector out = ComplexVector::Zero(2 * ancilla_dim);
  out.head(4) = v;
  return out;
}

struct Candidate {
  ComplexMatrix delta;
  double ratio;
};

Candidate polish(const ExtendedChannel& ext, ComplexMatrix delta) {
  delta /= trace_norm(delta);
  double value = trace_norm(ext(delta));
  for (int it = 0; it < 200; ++it) {
    const ComplexMatrix g = hermitize(ext(sign_of(ext(delta))));
    const auto eig = hermitian_eig(g, 1e-8);
    const Eigen::Index last = eig.eigenvalues.size() - 1;
    const ComplexMatrix next =
        0.5 * (projector<double>(eig.eigenvectors.col(last)) - projector<double>(eig.eigenvectors.col(0)));
    const double nv = trace_norm(ext(next));
    if (!(nv > value + 1e-15)) break;
    delta = next;
    value = nv;
  }
  return {delta, value};
}

}  // namespace

ExpansionDirection best_expansion_direction(const PauliChannelMap& v, int ancilla_dim) {
  if (ancilla_dim < 2) throw Error(ErrorKind::DimensionMismatch, "ancilla must have dimension at least 2");
  const SubsystemDims dims{ancilla_dim, 2};
  const int d = 2 * ancilla_dim;
  const ExtendedChannel ext(v, {ancilla_dim});

  std::vector<ComplexMatrix> seeds;
  const auto choi = hermitian_eig(choi_matrix(v).matrix);
  const ComplexMatrix most_negative = projector<double>(embed(choi.eigenvectors.col(0), ancilla_dim));
  if (ancilla_dim >= 3) {
    // Phi+ on the first two ancilla levels against a flat block on the third
    ComplexMatrix s = projector<double>(embed(phi_plus<double>(2), ancilla_dim));
    for (int k = 0; k < 2; ++k) s(4 + k, 4 + k) -= 0.5;
    seeds.push_back(0.5 * s);
  }
  for (int k = 1; k < 4; ++k)
    seeds.push_back(0.5 * (most_negative - projector<double>(embed(choi.eigenvectors.col(k), ancilla_dim))));
  seeds.push_back(most_negative - ComplexMatrix::Identity(d, d) / static_cast<double>(d));
  std::mt19937_64 rng(0x7a3c1e5d);
  for (int k = 0; k < 4; ++k) {
    const ComplexMatrix u = random_unitary(d, rng);
    seeds.push_back(0.5 * (projector<double>(u.col(0)) - projector<double>(u.col(1))));
  }

  Candidate best{seeds.front(), -1};
  for (auto& s : seeds) {
    const Candidate c = polish(ext, s);
    if (c.ratio > best.ratio) best = c;
  }
  return {hermitize(best.delta), dims, best.ratio};
}

ExpansionDirection trace_norm_expansion_direction(const PauliChannelMap& v, int ancilla_dim) {
  auto dir = best_expansion_direction(v, ancilla_dim);
  if (!(dir.ratio > 1 + 1e-12))
    throw Error(ErrorKind::NoExpansionFound, "no direction expands the trace norm under I (x) V");
  return dir;
}

ProbePair pull_back_pair(const ComplexMatrix& delta_tau, const SubsystemDims& dims, const RateProfile& rates,
                         double tau, double epsilon, const std::optional<ComplexMatrix>& sigma,
                         const std::vector<double>& check_times) {
  if (dims.size() != 2 || dims[1] != 2) throw Error(ErrorKind::DimensionMismatch, "probe pair lives on A' (x) qubit");
  detail::check_dims(delta_tau.rows(), dims);
  if (!(epsilon > 0 && epsilon <= 1)) throw Error(ErrorKind::PreconditionViolated, "epsilon must lie in (0, 1]");
  const int d = total_dim(dims);
  const ComplexMatrix base = sigma ? *sigma : maximally_mixed(d);
  State(base, dims);  // validates sigma

  const PauliChannelMap lambda = decay_factors(rates, 0, tau);
  for (double f : lambda.factors())
    if (!(f > 1e-13)) throw Error(ErrorKind::NonBijective, "dynamical map is not invertible at tau");
  const ComplexMatrix delta0 = hermitize(apply_on_factor(lambda.inverse(), delta_tau, dims, 1));
  const double norm0 = trace_norm(delta0);
  if (norm0 == 0) return {State(base, dims), State(base, dims), tau, 0, 0, dims};

  std::vector<PauliChannelMap> maps{PauliChannelMap::identity()};
  for (double t : check_times) maps.push_back(decay_factors(rates, 0, t));

  double c = epsilon / norm0;
  for (int step = 0; step <= 60; ++step) {
    bool ok = true;
    for (const auto& m : maps) {
      const ComplexMatrix b = apply_on_factor(m, base, dims, 1);
      const ComplexMatrix dd = apply_on_factor(m, delta0, dims, 1);
      if (hermitian_eigenvalues(ComplexMatrix(b + c * dd)).minCoeff() < 0 ||
          hermitian_eigenvalues(ComplexMatrix(b - c * dd)).minCoeff() < 0) {
        ok = false;
        break;
      }
    }
    if (ok) return {State(base + c * delta0, dims), State(base - c * delta0, dims), tau, 0, c * norm0, dims};
    c /= 2;
  }
  throw Error(ErrorKind::ScaleUnderflow, "probe pair not PSD after 60 halvings");
}

double ProbeState::closed_form_c2() const { return 0.25 * trace_norm(ComplexMatrix(rho1.matrix() - rho2.matrix())); }

namespace {

ProbeState assemble(const State& rho1, const State& rho2, double t, const ProbePair& pair) {
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2), e1 = ComplexMatrix::Zero(2, 2);
  e0(0, 0) = 1;
  e1(1, 1) = 1;
  const ComplexMatrix m = 0.5 * (tensor_product(e0, rho1.matrix()) + tensor_product(e1, rho2.matrix()));
  return {State(m, {2, rho1.dim()}), rho1, rho2, t, pair};
}

}  // namespace

ProbeState build_probe_state(const ProbePair& pair) { return assemble(pair.rho1_0, pair.rho2_0, 0, pair); }

ProbeState evolve_probe(const ProbeState& ps, const RateProfile& rates, double t) {
  const PauliChannelMap lambda = decay_factors(rates, 0, t);
  const auto& p = ps.pair;
  const State r1(hermitize(apply_on_factor(lambda, p.rho1_0.matrix(), p.dims, 1)), p.dims);
  const State r2(hermitize(apply_on_factor(lambda, p.rho2_0.matrix(), p.dims, 1)), p.dims);
  return assemble(r1, r2, t, p);
}

BackflowReport detect_backflow(const RateProfile& rates, double tau, double delta_t, const BackflowConfig& cfg) {
  if (!(tau >= 0) || !(delta_t > 0) || tau + delta_t > rates.domain_end() * (1 + 1e-12))
    throw Error(ErrorKind::TimeOrderViolation, "need 0 <= tau < tau + delta_t <= domain_end");
  BackflowReport r;
  r.tau = tau;
  r.delta_t = delta_t;
  const PauliChannelMap v = decay_factors(rates, tau, tau + delta_t);
  r.choi_min_eig = min_eigenvalue(choi_matrix(v));
  r.in_boundary_band = std::abs(r.choi_min_eig) < cfg.boundary_band;
  const bool non_cp = r.choi_min_eig < -cfg.cp_tol;

  const ExpansionDirection dir = best_expansion_direction(v, cfg.ancilla_dim);
  r.expansion_ratio = dir.ratio;
  r.inconclusive = non_cp && !(dir.ratio > 1 + 1e-12);

  ProbePair pair = pull_back_pair(dir.delta, dir.dims, rates, tau, cfg.epsilon, std::nullopt, {tau, tau + delta_t});
  pair.delta_t = delta_t;
  const ProbeState ps0 = build_probe_state(pair);
  const ProbeState before = evolve_probe(ps0, rates, tau);
  const ProbeState after = evolve_probe(ps0, rates, tau + delta_t);

  r.c2_before = before.closed_form_c2();
  r.c2_after = after.closed_form_c2();
  r.c2_before_optimizer = correlation_C2(before.matrix, cfg.optimizer);
  r.c2_after_optimizer = correlation_C2(after.matrix, cfg.optimizer);
  r.optimizer_agrees = std::abs(r.c2_before_optimizer - r.c2_before) <= cfg.agreement_tol &&
                       std::abs(r.c2_after_optimizer - r.c2_after) <= cfg.agreement_tol;

  r.backflow_detected = r.c2_after > r.c2_before + cfg.backflow_tol;
  r.consistent = r.backflow_detected == non_cp;
  return r;
}

}  // namespace corrwit
