#include "corrwit/rates.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>
#include <utility>

#include "corrwit/errors.hpp"

namespace corrwit {

RateProfile::RateProfile(std::string name, std::array<RateFunction, 3> rates, double domain_end)
    : name_(std::move(name)), rates_(std::move(rates)), domain_end_(domain_end) {
  if (!(domain_end_ > 0) || !std::isfinite(domain_end_))
    throw Error(ErrorKind::InvalidProfile, "domain end must be positive and finite");
  for (const auto& r : rates_)
    if (!r.value) throw Error(ErrorKind::InvalidProfile, "rate function missing");
  spot_check();
}

RateProfile RateProfile::constant(double cx, double cy, double cz, double domain_end) {
  std::array<RateFunction, 3> rates;
  const std::array<double, 3> c{cx, cy, cz};
  for (int k = 0; k < 3; ++k) {
    const double v = c[k];
    rates[k] = {[v](double) { return v; }, [v](double t) { return v * t; }};
  }
  std::ostringstream name;
  name << "constant(" << cx << "," << cy << "," << cz << ")";
  return RateProfile(name.str(), std::move(rates), domain_end);
}

RateProfile RateProfile::eternal(double domain_end) {
  RateFunction one{[](double) { return 1.0; }, [](double t) { return t; }};
  // log cosh t = |t| + log1p(exp(-2|t|)) - log 2, stable for large t
  RateFunction minus_tanh{[](double t) { return -std::tanh(t); },
                          [](double t) {
                            const double a = std::abs(t);
                            return -(a + std::log1p(std::exp(-2 * a)) - std::log(2.0));
                          }};
  return RateProfile("eternal", {one, one, minus_tanh}, domain_end);
}

namespace {

struct Table {
  std::vector<RateSample> rows;
  std::array<std::vector<double>, 3> cumulative;  // trapezoid integral from rows[0].t to each knot

  // index i of the segment [i-1, i] used for t; end segments extrapolate linearly
  std::size_t segment(double t) const {
    auto it = std::upper_bound(rows.begin(), rows.end(), t,
                               [](double v, const RateSample& s) { return v < s.t; });
    std::size_t i = static_cast<std::size_t>(it - rows.begin());
    return std::clamp<std::size_t>(i, 1, rows.size() - 1);
  }

  double value(int k, double t) const {
    const std::size_t i = segment(t);
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    const double w = (t - a.t) / (b.t - a.t);
    return a.gamma[k] + w * (b.gamma[k] - a.gamma[k]);
  }

  double primitive(int k, double t) const {
    const std::size_t i = segment(t);
    const auto& a = rows[i - 1];
    return cumulative[k][i - 1] + 0.5 * (t - a.t) * (a.gamma[k] + value(k, t));
  }
};

}  // namespace

RateProfile RateProfile::piecewise(std::vector<RateSample> rows) {
  if (rows.size() < 2) throw Error(ErrorKind::InvalidProfile, "rate table needs at least two rows");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].t > rows[i - 1].t))
      throw Error(ErrorKind::InvalidProfile, "rate table times must be strictly increasing");
  if (rows.front().t > 0) throw Error(ErrorKind::InvalidProfile, "rate table must start at t <= 0");
  for (const auto& r : rows)
    for (double g : r.gamma)
      if (!std::isfinite(g) || !std::isfinite(r.t))
        throw Error(ErrorKind::InvalidProfile, "rate table has non-finite entries");

  auto table = std::make_shared<Table>();
  table->rows = std::move(rows);
  for (int k = 0; k < 3; ++k) {
    auto& c = table->cumulative[k];
    c.assign(table->rows.size(), 0.0);
    for (std::size_t i = 1; i < table->rows.size(); ++i) {
      const auto& a = table->rows[i - 1];
      const auto& b = table->rows[i];
      c[i] = c[i - 1] + 0.5 * (b.t - a.t) * (a.gamma[k] + b.gamma[k]);
    }
  }
  std::array<RateFunction, 3> rates;
  for (int k = 0; k < 3; ++k)
    rates[k] = {[table, k](double t) { return table->value(k, t); },
                [table, k](double t) { return table->primitive(k, t); }};
  const double end = table->rows.back().t;
  return RateProfile("piecewise", std::move(rates), end);
}

RateProfile RateProfile::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::InvalidProfile, "empty rate table");
  auto strip = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    return s;
  };
  if (strip(line) != "t,gamma_x,gamma_y,gamma_z")
    throw Error(ErrorKind::InvalidProfile, "rate table header must be t,gamma_x,gamma_y,gamma_z");
  std::vector<RateSample> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty()) continue;
    std::array<double, 4> v{};
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::string cell;
    int n = 0;
    while (std::getline(ls, cell, ',')) {
      if (n >= 4) throw Error(ErrorKind::InvalidProfile, "too many columns on line " + std::to_string(lineno));
      std::istringstream cs(cell);
      cs.imbue(std::locale::classic());
      if (!(cs >> v[n]) || !cs.eof())
        throw Error(ErrorKind::InvalidProfile, "unparsable number on line " + std::to_string(lineno));
      ++n;
    }
    if (n != 4) throw Error(ErrorKind::InvalidProfile, "expected 4 columns on line " + std::to_string(lineno));
    rows.push_back({v[0], {v[1], v[2], v[3]}});
  }
  return piecewise(std::move(rows));
}

RateProfile RateProfile::from_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::InvalidProfile, "cannot open rate table " + path);
  return from_csv(f);
}

RateProfile RateProfile::custom(std::string name, std::function<double(double)> gx,
                                std::function<double(double)> gy, std::function<double(double)> gz,
                                double domain_end) {
  return RateProfile(std::move(name), {RateFunction{std::move(gx), {}}, RateFunction{std::move(gy), {}},
                                       RateFunction{std::move(gz), {}}},
                     domain_end);
}

std::array<double, 3> RateProfile::at(double t) const {
  return {rates_[0].value(t), rates_[1].value(t), rates_[2].value(t)};
}

double RateProfile::integral(int k, double t0, double t1) const {
  const RateFunction& r = rates_.at(k);
  if (r.has_antiderivative()) return r.antiderivative(t1) - r.antiderivative(t0);
  if (t1 < t0) return -adaptive_simpson(r.value, t1, t0);
  return adaptive_simpson(r.value, t0, t1);
}

double RateProfile::spot_check(int samples) const {
  double max_jump = 0;
  for (int k = 0; k < 3; ++k) {
    double prev = 0;
    for (int i = 0; i < samples; ++i) {
      const double t = domain_end_ * i / (samples - 1);
      const double v = rates_[k].value(t);
      if (!std::isfinite(v))
        throw Error(ErrorKind::InvalidProfile, "rate " + std::to_string(k) + " is not finite at t=" + std::to_string(t));
      if (i > 0) max_jump = std::max(max_jump, std::abs(v - prev));
      prev = v;
    }
  }
  return max_jump;
}

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;
  bool failed = false;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (!std::isfinite(delta)) {
      failed = true;
      return left + right;
    }
    if (std::abs(delta) <= 15 * tol) return left + right + delta / 15;
    if (depth >= max_depth) {
      failed = true;
      return left + right + delta / 15;
    }
    return recurse(a, m, fa, flm, fm, left, tol / 2, depth + 1) +
           recurse(m, b, fm, frm, fb, right, tol / 2, depth + 1);
  }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0;
  if (b < a) return -adaptive_simpson(f, b, a, tol, max_depth);
  Simpson s{f, max_depth};
  // split into a few panels first so that short-period features are not missed
  constexpr int kPanels = 8;
  double total = 0;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + (b - a) * p / kPanels;
    const double hi = a + (b - a) * (p + 1) / kPanels;
    const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6 * (flo + 4 * fmid + fhi);
    total += s.recurse(lo, hi, flo, fmid, fhi, whole, tol / kPanels, 0);
  }
  if (s.failed || !std::isfinite(total))
    throw Error(ErrorKind::QuadratureFailure, "adaptive Simpson did not reach tolerance");
  return total;
}

}  // namespace corrwit
