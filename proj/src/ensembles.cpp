#include "corrwit/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "corrwit/parallel.hpp"

namespace corrwit {

namespace {

ComplexMatrix hermitize(const ComplexMatrix& m) { return (m + m.adjoint()) / 2.0; }

// spectral function f applied to a Hermitian matrix
template <typename F>
ComplexMatrix spectral_apply(const ComplexMatrix& m, F f) {
  const auto eig = hermitian_eig(m, 1e-8);
  RealVector w = eig.eigenvalues;
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = f(w(i));
  return eig.eigenvectors * w.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
}

// projector onto the eigenspace of eigenvalues above `thr`
ComplexMatrix positive_projector(const ComplexMatrix& m, double thr) {
  return spectral_apply(m, [thr](double x) { return x > thr ? 1.0 : 0.0; });
}

// clip negative eigenvalues and renormalize; used only for conditional states of tiny weight
ComplexMatrix nearest_state(const ComplexMatrix& m) {
  ComplexMatrix c = spectral_apply(hermitize(m), [](double x) { return std::max(x, 0.0); });
  const double tr = c.trace().real();
  if (!(tr > 0)) return maximally_mixed(static_cast<int>(m.rows()));
  return c / tr;
}

void check_bipartite(const State& rho) {
  if (rho.dims().size() != 2) throw Error(ErrorKind::DimensionMismatch, "expected a bipartite state with two factors");
}

int side_index(Side s) { return s == Side::A ? 0 : 1; }

// S^{-1/2} X_j^dag X_j S^{-1/2}; returns false when S is singular
bool naimark_normalize(const std::vector<ComplexMatrix>& x, std::vector<ComplexMatrix>& out) {
  const Eigen::Index d = x.front().cols();
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  std::vector<ComplexMatrix> gram;
  for (const auto& xj : x) {
    gram.push_back(xj.adjoint() * xj);
    s += gram.back();
  }
  const auto eig = hermitian_eig(hermitize(s), 1e-8);
  if (!(eig.eigenvalues.minCoeff() > 1e-10 * std::max(1.0, eig.eigenvalues.maxCoeff()))) return false;
  const ComplexMatrix s_inv_half =
      eig.eigenvectors * eig.eigenvalues.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
      eig.eigenvectors.adjoint();
  out.clear();
  for (const auto& g : gram) out.push_back(hermitize(s_inv_half * g * s_inv_half));
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Povm, StateEnsemble, certificates

Povm::Povm(std::vector<ComplexMatrix> effects) : effects_(std::move(effects)) {
  if (effects_.empty()) throw Error(ErrorKind::InvalidPovm, "POVM needs at least one effect");
  const Eigen::Index d = effects_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (auto& e : effects_) {
    if (e.rows() != d || e.cols() != d) throw Error(ErrorKind::DimensionMismatch, "POVM effects differ in dimension");
    if (!e.allFinite()) throw Error(ErrorKind::InvalidPovm, "non-finite effect");
    if (hermiticity_error(e) > kTol) throw Error(ErrorKind::InvalidPovm, "effect is not Hermitian");
    e = hermitize(e);
    if (hermitian_eigenvalues(e).minCoeff() < -kTol) throw Error(ErrorKind::InvalidPovm, "effect is not PSD");
    sum += e;
  }
  if ((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kTol)
    throw Error(ErrorKind::InvalidPovm, "effects do not sum to the identity");
}

std::vector<double> Povm::probabilities(const ComplexMatrix& rho) const {
  if (rho.rows() != dim()) throw Error(ErrorKind::DimensionMismatch, "state and POVM dimensions differ");
  std::vector<double> p;
  for (const auto& e : effects_) p.push_back((rho * e).trace().real());
  return p;
}

StateEnsemble::StateEnsemble(std::vector<EnsembleItem> items) : items_(std::move(items)) {
  if (items_.empty()) throw Error(ErrorKind::InvalidEnsemble, "empty ensemble");
  double total = 0;
  for (const auto& it : items_) {
    if (!(it.probability >= 0)) throw Error(ErrorKind::InvalidEnsemble, "negative probability");
    if (it.state.dim() != items_.front().state.dim())
      throw Error(ErrorKind::DimensionMismatch, "ensemble states differ in dimension");
    total += it.probability;
  }
  if (std::abs(total - 1) > 1e-10) throw Error(ErrorKind::InvalidEnsemble, "probabilities do not sum to one");
}

MePovmCertificate MePovmCertificate::certify(const Povm& povm, const State& rho, double tol) {
  if (!is_me_povm(povm, rho, tol)) throw Error(ErrorKind::InvalidPovm, "outcome distribution is not uniform");
  auto probs = povm.probabilities(rho.matrix());
  const int n = povm.size();
  double h = 0;
  for (double p : probs)
    if (p > 0) h -= p * std::log(p);
  const double base = n > 1 ? h / std::log(static_cast<double>(n)) : 1.0;
  return {povm, rho, std::move(probs), base};
}

bool is_me_povm(const Povm& povm, const State& rho, double tol) {
  const double target = 1.0 / povm.size();
  for (double p : povm.probabilities(rho.matrix()))
    if (std::abs(p - target) > tol) return false;
  return true;
}

Povm construct_me_povm(const State& rho, int n) {
  if (n < 1) throw Error(ErrorKind::PreconditionViolated, "ME-POVM needs at least one outcome");
  const auto eig = hermitian_eig(rho.matrix());
  const int d = rho.dim();
  std::vector<ComplexMatrix> effects(n, ComplexMatrix::Zero(d, d));
  double cum = 0;
  // descending eigenvalue order
  for (int k = d - 1; k >= 0; --k) {
    const double lam = std::max(eig.eigenvalues(k), 0.0);
    const ComplexMatrix proj = projector<double>(eig.eigenvectors.col(k));
    if (lam <= 1e-15) {
      effects[n - 1] += proj;
      continue;
    }
    const double lo = cum, hi = cum + lam;
    double assigned = 0;
    for (int i = 0; i < n; ++i) {
      const double a = std::max(lo, static_cast<double>(i) / n);
      const double b = i == n - 1 ? std::max(hi, 1.0) : std::min(hi, static_cast<double>(i + 1) / n);
      if (b <= a) continue;
      const double w = i == n - 1 ? 1.0 - assigned : (b - a) / lam;
      effects[i] += w * proj;
      assigned += w;
    }
    if (std::abs(assigned - 1) > 1e-12)
      throw Error(ErrorKind::DegenerateSplit, "eigenvector weight could not be distributed");
    cum = hi;
  }
  return Povm(std::move(effects));
}

// ---------------------------------------------------------------------------
// measurement on a subsystem

ComplexMatrix contract_side(const ComplexMatrix& rho, const SubsystemDims& dims, const ComplexMatrix& op,
                            Side measured) {
  if (dims.size() != 2) throw Error(ErrorKind::DimensionMismatch, "expected two subsystems");
  detail::check_dims(rho.rows(), dims);
  const int da = dims[0], db = dims[1];
  if (op.rows() != dims[side_index(measured)] || op.cols() != op.rows())
    throw Error(ErrorKind::DimensionMismatch, "operator does not match the measured subsystem");
  if (measured == Side::A) {
    ComplexMatrix out = ComplexMatrix::Zero(db, db);
    for (int a = 0; a < da; ++a)
      for (int a2 = 0; a2 < da; ++a2) {
        const Complex w = op(a2, a);
        if (w == Complex(0)) continue;
        out += w * rho.block(a * db, a2 * db, db, db);
      }
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (int a = 0; a < da; ++a)
    for (int a2 = 0; a2 < da; ++a2) out(a, a2) = (rho.block(a * db, a2 * db, db, db) * op).trace();
  return out;
}

StateEnsemble measure_on_subsystem(const State& rho_ab, const Povm& povm, Side side) {
  check_bipartite(rho_ab);
  const int dx = rho_ab.dims()[side_index(side)];
  const int dy = rho_ab.dims()[side_index(other(side))];
  if (povm.dim() != dx) throw Error(ErrorKind::DimensionMismatch, "POVM does not match the measured subsystem");
  std::vector<EnsembleItem> items;
  for (const auto& e : povm.effects()) {
    const ComplexMatrix sigma = hermitize(contract_side(rho_ab.matrix(), rho_ab.dims(), e, side));
    const double p = sigma.trace().real();
    if (p < 1e-14) {
      items.push_back({std::max(p, 0.0), State(maximally_mixed(dy)), true});
    } else if (p < 1e-8) {
      items.push_back({p, State(nearest_state(sigma)), false});
    } else {
      items.push_back({p, State(ComplexMatrix(sigma / p)), false});
    }
  }
  return StateEnsemble(std::move(items));
}

double guessing_probability_two(const State& rho1, const State& rho2) {
  if (rho1.dim() != rho2.dim()) throw Error(ErrorKind::DimensionMismatch, "states differ in dimension");
  return 0.25 * (2 + trace_norm(rho1.matrix() - rho2.matrix()));
}

// ---------------------------------------------------------------------------
// brute-force guessing probability

namespace {

double success(const std::vector<ComplexMatrix>& r, const std::vector<ComplexMatrix>& pi) {
  double v = 0;
  for (std::size_t j = 0; j < r.size(); ++j) v += (r[j] * pi[j]).trace().real();
  return v;
}

struct IterationOutcome {
  double value;
  std::vector<ComplexMatrix> povm;
  bool converged;
};

IterationOutcome fixed_point_ascent(const std::vector<ComplexMatrix>& r, std::vector<ComplexMatrix> pi,
                                    std::size_t kernel_owner, const BruteForceConfig& cfg) {
  const Eigen::Index d = r.front().rows();
  double value = success(r, pi);
  double best = value;
  std::vector<ComplexMatrix> best_pi = pi;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    ComplexMatrix g2 = ComplexMatrix::Zero(d, d);
    std::vector<ComplexMatrix> num(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
      num[j] = r[j] * pi[j] * r[j];
      g2 += num[j];
    }
    const auto eig = hermitian_eig(hermitize(g2), 1e-8);
    const double cutoff = 1e-14 * std::max(eig.eigenvalues.maxCoeff(), 1e-300);
    RealVector ginv(d);
    RealVector kernel(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      const double lam = eig.eigenvalues(k);
      ginv(k) = lam > cutoff ? 1 / std::sqrt(lam) : 0;
      kernel(k) = lam > cutoff ? 0 : 1;
    }
    const ComplexMatrix gi = eig.eigenvectors * ginv.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
    for (std::size_t j = 0; j < r.size(); ++j) pi[j] = hermitize(gi * num[j] * gi);
    pi[kernel_owner] += eig.eigenvectors * kernel.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
    const double next = success(r, pi);
    if (next > best) {
      best = next;
      best_pi = pi;
    }
    if (std::abs(next - value) < cfg.tol) return {best, best_pi, true};
    value = next;
  }
  return {best, best_pi, false};
}

bool all_commute(const std::vector<ComplexMatrix>& r) {
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j)
      if ((r[i] * r[j] - r[j] * r[i]).cwiseAbs().maxCoeff() > 1e-13) return false;
  return true;
}

}  // namespace

GuessingResult guessing_probability_bruteforce(const StateEnsemble& e, const BruteForceConfig& cfg) {
  const int n = e.size();
  const int d = e.dim();
  std::vector<ComplexMatrix> r;
  std::size_t max_prior = 0;
  for (int j = 0; j < n; ++j) {
    r.push_back(e.items()[j].probability * e.items()[j].state.matrix());
    if (e.items()[j].probability > e.items()[max_prior].probability) max_prior = j;
  }

  GuessingResult best;
  // guess the most likely label
  best.povm.assign(n, ComplexMatrix::Zero(d, d));
  best.povm[max_prior] = ComplexMatrix::Identity(d, d);
  best.value = e.items()[max_prior].probability;

  if (all_commute(r)) {
    // common eigenbasis from a generic combination
    ComplexMatrix mix = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < n; ++j) mix += (1 + std::sqrt(2.0) * (j + 1) + 0.1 * std::sqrt(3.0 + j)) * r[j];
    const auto eig = hermitian_eig(hermitize(mix), 1e-8);
    std::vector<ComplexMatrix> pi(n, ComplexMatrix::Zero(d, d));
    double v = 0;
    for (int x = 0; x < d; ++x) {
      const ComplexVector u = eig.eigenvectors.col(x);
      int arg = 0;
      double top = -1;
      for (int j = 0; j < n; ++j) {
        const double w = (u.adjoint() * r[j] * u)(0, 0).real();
        if (w > top) {
          top = w;
          arg = j;
        }
      }
      v += top;
      pi[arg] += projector<double>(u);
    }
    if (v > best.value) {
      best.value = v;
      best.povm = std::move(pi);
    }
    return best;
  }

  std::vector<std::vector<ComplexMatrix>> seeds;
  {
    // pretty-good measurement
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& rj : r) sum += rj;
    const ComplexMatrix s = spectral_apply(hermitize(sum), [](double x) { return x > 1e-14 ? 1 / std::sqrt(x) : 0.0; });
    const ComplexMatrix ker = spectral_apply(hermitize(sum), [](double x) { return x > 1e-14 ? 0.0 : 1.0; });
    std::vector<ComplexMatrix> pgm;
    for (const auto& rj : r) pgm.push_back(hermitize(s * rj * s));
    pgm[max_prior] += ker;
    seeds.push_back(std::move(pgm));
  }
  std::mt19937_64 rng(cfg.seed);
  for (int k = 0; k < cfg.restarts; ++k) {
    std::vector<ComplexMatrix> x;
    for (int j = 0; j < n; ++j) x.push_back(random_ginibre(d, d, rng));
    std::vector<ComplexMatrix> povm;
    if (naimark_normalize(x, povm)) seeds.push_back(std::move(povm));
  }

  bool all_converged = true;
  for (auto& seed : seeds) {
    auto out = fixed_point_ascent(r, std::move(seed), max_prior, cfg);
    all_converged = all_converged && out.converged;
    if (out.value > best.value) {
      best.value = out.value;
      best.povm = std::move(out.povm);
    }
  }
  best.budget_exhausted = !all_converged;
  return best;
}

// ---------------------------------------------------------------------------
// two-output ME-POVM optimization

namespace {

struct TwoOutputProblem {
  const ComplexMatrix& rho;
  const SubsystemDims& dims;
  Side side;
  ComplexMatrix rho_x;

  int dx() const { return dims[side_index(side)]; }
  int dy() const { return dims[side_index(other(side))]; }

  ComplexMatrix prepared_difference(const ComplexMatrix& p) const {
    const ComplexMatrix op = 2.0 * p - ComplexMatrix::Identity(dx(), dx());
    return hermitize(contract_side(rho, dims, op, side));
  }

  double value(const ComplexMatrix& p) const { return 0.5 * trace_norm(prepared_difference(p)); }

  // maximize Tr(P 2 M_W) subject to 0 <= P <= I and Tr(rho_x P) = 1/2
  ComplexMatrix best_effect(const ComplexMatrix& w) const {
    const ComplexMatrix m = hermitize(contract_side(rho, dims, w, other(side)));
    auto mass_above = [&](double mu, ComplexMatrix& proj) {
      const ComplexMatrix k = 2.0 * m - mu * rho_x;
      const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
      proj = positive_projector(k, 1e-13 * scale);
      return (rho_x * proj).trace().real();
    };
    double lo = -3, hi = 3;
    ComplexMatrix p_lo, p_hi;
    double f_lo = mass_above(lo, p_lo), f_hi = mass_above(hi, p_hi);
    for (int it = 0; it < 64 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      ComplexMatrix p;
      const double f = mass_above(mid, p);
      if (f >= 0.5) {
        lo = mid;
        f_lo = f;
        p_lo = std::move(p);
      } else {
        hi = mid;
        f_hi = f;
        p_hi = std::move(p);
      }
    }
    const double theta = f_lo - f_hi > 1e-300 ? (0.5 - f_hi) / (f_lo - f_hi) : 1.0;
    return hermitize(theta * p_lo + (1 - theta) * p_hi);
  }

  ComplexMatrix sign_of(const ComplexMatrix& l) const {
    const double scale = std::max(1e-300, l.cwiseAbs().maxCoeff());
    return spectral_apply(l, [scale](double x) { return std::abs(x) <= 1e-14 * scale ? 0.0 : (x > 0 ? 1.0 : -1.0); });
  }
};

struct SeedOutcome {
  double value;
  ComplexMatrix effect;
  int iterations;
};

SeedOutcome ascend(const TwoOutputProblem& prob, ComplexMatrix p, const OptimizerConfig& cfg) {
  double v = prob.value(p);
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    const ComplexMatrix w = prob.sign_of(prob.prepared_difference(p));
    ComplexMatrix next = prob.best_effect(w);
    const double nv = prob.value(next);
    if (!(nv > v + cfg.tol)) {
      if (nv > v) {
        v = nv;
        p = std::move(next);
      }
      break;
    }
    v = nv;
    p = std::move(next);
  }
  return {v, p, it};
}

}  // namespace

CorrelationResult correlation_two_output(const State& rho_ab, Side side, const OptimizerConfig& cfg) {
  check_bipartite(rho_ab);
  const int keep = side_index(side);
  TwoOutputProblem prob{rho_ab.matrix(), rho_ab.dims(), side, hermitize(partial_trace(rho_ab.matrix(), rho_ab.dims(), {keep}))};
  const int dx = prob.dx(), dy = prob.dy();
  const int seeds = std::max(1, cfg.seeds);

  auto outcomes = parallel_map(
      static_cast<std::size_t>(seeds),
      [&](std::size_t s) {
        ComplexMatrix p;
        if (s == 0) {
          p = construct_me_povm(State(prob.rho_x), 2)[0];
        } else {
          std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ULL * s);
          const ComplexMatrix u = random_unitary(dy, rng);
          RealVector signs(dy);
          std::bernoulli_distribution coin(0.5);
          for (int k = 0; k < dy; ++k) signs(k) = coin(rng) ? 1.0 : -1.0;
          const ComplexMatrix w = u * signs.cast<Complex>().asDiagonal() * u.adjoint();
          p = prob.best_effect(w);
        }
        return ascend(prob, std::move(p), cfg);
      },
      cfg.threads);

  CorrelationResult best;
  best.value = -1;
  for (auto& o : outcomes) {
    best.iterations += o.iterations;
    if (o.value > best.value) {
      best.value = o.value;
      best.effect = o.effect;
    }
  }
  (void)dx;
  return best;
}

double correlation_CA2(const State& rho_ab, const OptimizerConfig& cfg) {
  return correlation_two_output(rho_ab, Side::A, cfg).value;
}

double correlation_CB2(const State& rho_ab, const OptimizerConfig& cfg) {
  return correlation_two_output(rho_ab, Side::B, cfg).value;
}

double correlation_C2(const State& rho_ab, const OptimizerConfig& cfg) {
  return std::max(correlation_CA2(rho_ab, cfg), correlation_CB2(rho_ab, cfg));
}

// ---------------------------------------------------------------------------
// n-output search

namespace {

// Coarse-grain a POVM to n equiprobable outcomes on rho_x via a north-west-corner transport plan.
std::vector<ComplexMatrix> equalize(const std::vector<ComplexMatrix>& r, const ComplexMatrix& rho_x, int n) {
  const std::size_t m = r.size();
  std::vector<double> q(m);
  for (std::size_t j = 0; j < m; ++j) q[j] = std::max(0.0, (rho_x * r[j]).trace().real());
  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  for (double& x : q) x /= total;
  const Eigen::Index d = rho_x.rows();
  std::vector<ComplexMatrix> p(n, ComplexMatrix::Zero(d, d));
  int i = 0;
  double demand = 1.0 / n;
  for (std::size_t j = 0; j < m; ++j) {
    if (q[j] <= 1e-15) {
      p[n - 1] += r[j];
      continue;
    }
    double remaining = q[j];
    while (remaining > 0) {
      if (i == n - 1) {
        p[i] += (remaining / q[j]) * r[j];
        break;
      }
      const double flow = std::min(remaining, demand);
      p[i] += (flow / q[j]) * r[j];
      remaining -= flow;
      demand -= flow;
      if (demand <= 0) {
        ++i;
        demand = 1.0 / n;
      }
    }
  }
  for (auto& e : p) e = hermitize(e);
  return p;
}

struct Candidate {
  std::vector<double> params;
  double score = -std::numeric_limits<double>::infinity();
  std::vector<ComplexMatrix> effects;
  bool exhausted = false;
};

std::vector<double> encode(const std::vector<ComplexMatrix>& x) {
  std::vector<double> v;
  for (const auto& m : x)
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      v.push_back(m(i).real());
      v.push_back(m(i).imag());
    }
  return v;
}

std::vector<ComplexMatrix> decode(const std::vector<double>& v, int n, int d) {
  std::vector<ComplexMatrix> x(n, ComplexMatrix(d, d));
  std::size_t k = 0;
  for (auto& m : x)
    for (Eigen::Index i = 0; i < m.size(); ++i, k += 2) m(i) = Complex(v[k], v[k + 1]);
  return x;
}

}  // namespace

NOutputResult me_povm_search(const State& rho_ab, Side side, int n, const GeneralSearchConfig& cfg) {
  check_bipartite(rho_ab);
  if (n < 2) throw Error(ErrorKind::PreconditionViolated, "need at least two outputs");
  const int d = rho_ab.dims()[side_index(side)];
  const ComplexMatrix rho_x = hermitize(partial_trace(rho_ab.matrix(), rho_ab.dims(), {side_index(side)}));

  auto evaluate = [&](Candidate& c) {
    std::vector<ComplexMatrix> r;
    if (!naimark_normalize(decode(c.params, n, d), r)) return;
    try {
      const Povm povm(equalize(r, rho_x, n));
      const auto g = guessing_probability_bruteforce(measure_on_subsystem(rho_ab, povm, side), cfg.inner);
      c.score = g.value - 0.5;
      c.effects = povm.effects();
      c.exhausted = g.budget_exhausted;
    } catch (const Error&) {
      c.score = -std::numeric_limits<double>::infinity();
    }
  };
  auto from_effects = [&](const std::vector<ComplexMatrix>& eff) {
    std::vector<ComplexMatrix> x;
    for (const auto& e : eff) x.push_back(spectral_apply(e, [](double v) { return std::sqrt(std::max(v, 0.0)); }));
    return encode(x);
  };

  std::vector<Candidate> starts;
  starts.push_back(Candidate{from_effects(construct_me_povm(State(rho_x), n).effects()), {}, {}, {}});
  if (n % 2 == 0) {
    const ComplexMatrix p = correlation_two_output(rho_ab, side, cfg.two_output).effect;
    const ComplexMatrix q = ComplexMatrix::Identity(d, d) - p;
    std::vector<ComplexMatrix> split;
    for (int k = 0; k < n / 2; ++k) split.push_back(p * (2.0 / n));
    for (int k = 0; k < n / 2; ++k) split.push_back(q * (2.0 / n));
    starts.push_back(Candidate{from_effects(split), {}, {}, {}});
  }
  std::mt19937_64 rng(cfg.seed ^ (static_cast<std::uint64_t>(n) << 32) ^ static_cast<std::uint64_t>(side_index(side)));
  {
    std::vector<ComplexMatrix> x;
    for (int j = 0; j < n; ++j) x.push_back(random_ginibre(d, d, rng));
    starts.push_back(Candidate{encode(x), {}, {}, {}});
  }

  Candidate current;
  for (auto& s : starts) {
    evaluate(s);
    if (s.score > current.score) current = s;
  }
  if (!std::isfinite(current.score)) throw Error(ErrorKind::ConvergenceFailure, "no valid ME-POVM candidate");

  std::normal_distribution<double> gauss(0, 1);
  double sigma = cfg.initial_step;
  for (int it = 0; it < cfg.evaluations; ++it) {
    Candidate trial;
    trial.params = current.params;
    double norm = 0;
    for (double v : current.params) norm += v * v;
    const double scale = sigma * std::sqrt(norm / current.params.size());
    for (double& v : trial.params) v += scale * gauss(rng);
    evaluate(trial);
    if (trial.score >= current.score) {
      current = std::move(trial);
      sigma *= 1.22;
    } else {
      sigma *= 0.95;
    }
    sigma = std::clamp(sigma, 1e-6, 2.0);
  }
  return {current.score, current.effects, current.exhausted};
}

GeneralCorrelationResult correlation_C_general(const State& rho_ab, int max_outputs, const GeneralSearchConfig& cfg) {
  if (max_outputs < 2 || max_outputs > 4)
    throw Error(ErrorKind::PreconditionViolated, "max_outputs must lie in 2..4");
  GeneralCorrelationResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (Side side : {Side::A, Side::B}) {
    const double two = correlation_two_output(rho_ab, side, cfg.two_output).value;
    if (two > best.value) best = {two, side, 2, false};
    for (int n = 3; n <= max_outputs; ++n) {
      const auto r = me_povm_search(rho_ab, side, n, cfg);
      if (r.value > best.value) best = {r.value, side, n, r.budget_exhausted};
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// local channels

ComplexMatrix LocalChannel::operator()(const ComplexMatrix& rho) const {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

State LocalChannel::apply(const State& rho_ab, Side side) const {
  check_bipartite(rho_ab);
  const int da = rho_ab.dims()[0], db = rho_ab.dims()[1];
  if ((side == Side::A ? da : db) != dim()) throw Error(ErrorKind::DimensionMismatch, "channel does not match subsystem");
  ComplexMatrix out = ComplexMatrix::Zero(rho_ab.dim(), rho_ab.dim());
  for (const auto& k : kraus) {
    const ComplexMatrix full = side == Side::A ? tensor_product(k, ComplexMatrix::Identity(db, db))
                                               : tensor_product(ComplexMatrix::Identity(da, da), k);
    out += full * rho_ab.matrix() * full.adjoint();
  }
  return State(hermitize(out), rho_ab.dims());
}

double LocalChannel::completeness_error() const {
  ComplexMatrix s = ComplexMatrix::Zero(dim(), dim());
  for (const auto& k : kraus) s += k.adjoint() * k;
  return (s - ComplexMatrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

LocalChannel random_local_cptp(int dim, std::uint64_t seed, LocalChannelMode mode, int num_kraus) {
  if (dim <= 0) throw Error(ErrorKind::DimensionMismatch, "channel dimension must be positive");
  if (mode == LocalChannelMode::Identity) return {{ComplexMatrix::Identity(dim, dim)}};
  if (num_kraus <= 0) num_kraus = dim;
  std::mt19937_64 rng(seed);
  const ComplexMatrix u = random_unitary(dim * num_kraus, rng);
  LocalChannel ch;
  for (int k = 0; k < num_kraus; ++k) ch.kraus.push_back(u.block(k * dim, 0, dim, dim));
  return ch;
}

}  // namespace corrwit
