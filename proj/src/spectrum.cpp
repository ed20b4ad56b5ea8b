#include "tractdyn/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tractdyn/parallel.hpp"
#include "tractdyn/quadrature.hpp"

namespace tractdyn {
namespace {

using GL = quad::GaussLegendre8;

struct Panel {
  std::vector<double> weights;
  std::vector<double> log_deriv;
};

class TableBuilder {
 public:
  TableBuilder(const TractBranch& branch, double T, double r, const SpectrumOptions& opts,
               double total_length)
      : branch_(branch), T_(T), r_(r), opts_(opts), total_(total_length) {
    log_scale_ = std::log(T) - std::log(std::abs(branch.phi(T)));
  }

  // log |phi_T'(r + iy)|
  double log_deriv(double y) const {
    const Complex dz = branch_.phi_derivative(T_ * Complex(r_, y));
    return log_scale_ + std::log(std::abs(dz));
  }

  struct Rule {
    std::array<double, 8> x;
    std::array<double, 8> w;
    std::array<double, 8> ld;
  };

  Rule rule(double a, double b) const {
    Rule R;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < 8; ++i) {
      R.x[i] = mid + half * GL::nodes[i];
      R.w[i] = half * GL::weights[i];
      R.ld[i] = log_deriv(R.x[i]);
    }
    return R;
  }

  double integrate(const Rule& R, double t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < 8; ++i) s += R.w[i] * std::exp(t * R.ld[i]);
    return s;
  }

  void refine(double a, double b, const Rule& coarse, int depth, Panel& out) const {
    const double m = 0.5 * (a + b);
    const Rule left = rule(a, m);
    const Rule right = rule(m, b);
    bool ok = true;
    const double share = (b - a) / total_;
    for (double t : opts_.refine_t) {
      const double fine = integrate(left, t) + integrate(right, t);
      const double diff = std::abs(fine - integrate(coarse, t));
      if (diff > std::max(opts_.abs_tol * share, opts_.rel_tol * std::abs(fine))) {
        ok = false;
        break;
      }
    }
    if (ok || depth >= opts_.max_depth) {
      for (const Rule* R : {&left, &right})
        for (std::size_t i = 0; i < 8; ++i) {
          out.weights.push_back(R->w[i]);
          out.log_deriv.push_back(R->ld[i]);
        }
      return;
    }
    refine(a, m, left, depth + 1, out);
    refine(m, b, right, depth + 1, out);
  }

 private:
  const TractBranch& branch_;
  double T_;
  double r_;
  const SpectrumOptions& opts_;
  double total_;
  double log_scale_ = 0.0;
};

}  // namespace

MeansTable::MeansTable(const TractBranch& branch, double T, double r, const SpectrumOptions& opts)
    : T_(T), r_(r) {
  if (!(T >= 1.0) || !std::isfinite(T)) fail(ErrorKind::InvalidGrid, "integral means need T >= 1");
  if (!(r > 0.0 && r < 1.0)) fail(ErrorKind::InvalidGrid, "integral means need 0 < r < 1");
  if (!(T * r >= branch.options().min_offset))
    fail(ErrorKind::InvalidGrid, "T r is below the minimum offset from the boundary");
  TableBuilder builder(branch, T, r, opts, 2.0);
  // phi_T' varies on the scale r in y, so start with panels of length 2r.
  const int per_interval = std::max(4, static_cast<int>(std::ceil(0.5 / r)));
  const int n = 2 * per_interval;
  std::vector<Panel> panels(n);
  parallel_for(n, [&](std::size_t k) {
    const int side = static_cast<int>(k) / per_interval;
    const int i = static_cast<int>(k) % per_interval;
    const double lo = side == 0 ? -2.0 : 1.0;
    const double a = lo + static_cast<double>(i) / per_interval;
    const double b = i + 1 == per_interval ? lo + 1.0 : lo + static_cast<double>(i + 1) / per_interval;
    builder.refine(a, b, builder.rule(a, b), 0, panels[k]);
  });
  for (const auto& p : panels) {
    weights_.insert(weights_.end(), p.weights.begin(), p.weights.end());
    log_deriv_.insert(log_deriv_.end(), p.log_deriv.begin(), p.log_deriv.end());
  }
}

double MeansTable::log_J(double t) const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < weights_.size(); ++i)
    m = std::max(m, std::log(weights_[i]) + t * log_deriv_[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    s += std::exp(std::log(weights_[i]) + t * log_deriv_[i] - m);
  return m + std::log(s);
}

double MeansTable::beta(double t) const { return log_J(t) / std::log(1.0 / r_); }

double integral_means(const TractBranch& branch, double T, double r, double t,
                      const SpectrumOptions& opts) {
  SpectrumOptions o = opts;
  o.refine_t = {t};
  return MeansTable(branch, T, r, o).beta(t);
}

std::vector<double> default_T_grid(const SpectrumOptions& opts) {
  if (opts.j_min < 0 || opts.j_max < opts.j_min || opts.j_max > 40)
    fail(ErrorKind::InvalidGrid, "T grid needs 0 <= j_min <= j_max <= 40");
  std::vector<double> g;
  for (int j = opts.j_min; j <= opts.j_max; ++j) g.push_back(std::ldexp(1.0, j));
  return g;
}

std::vector<MeansTable> diagonal_tables(const TractBranch& branch, std::span<const double> T_grid,
                                        const SpectrumOptions& opts) {
  if (T_grid.empty()) fail(ErrorKind::InvalidGrid, "empty T grid");
  for (std::size_t i = 1; i < T_grid.size(); ++i)
    if (!(T_grid[i] > T_grid[i - 1])) fail(ErrorKind::InvalidGrid, "T grid must increase");
  std::vector<MeansTable> tables;
  tables.reserve(T_grid.size());
  for (double T : T_grid) tables.emplace_back(branch, T, 1.0 / T, opts);
  return tables;
}

BetaInfinity beta_infinity(std::span<const MeansTable> tables, double t) {
  BetaInfinity out;
  const std::size_t n = tables.size();
  if (n == 0) fail(ErrorKind::InvalidGrid, "empty T grid");
  std::vector<double> logs(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.T_grid.push_back(tables[j].T());
    logs[j] = tables[j].log_J(t);
    out.raw.push_back(logs[j] / std::log(1.0 / tables[j].r()));
  }
  out.slopes.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t j = 1; j < n; ++j)
    out.slopes[j] = (logs[j] - logs[j - 1]) / std::log(out.T_grid[j] / out.T_grid[j - 1]);
  if (n == 1) {
    out.value = out.raw[0];
    return out;
  }
  const std::size_t first = std::max<std::size_t>(1, n / 2);
  double hi = -std::numeric_limits<double>::infinity();
  double lo = -hi;
  for (std::size_t j = first; j < n; ++j) {
    hi = std::max(hi, out.slopes[j]);
    lo = std::min(lo, out.slopes[j]);
  }
  out.value = hi;
  out.drift = hi - lo;
  return out;
}

BetaInfinity beta_infinity(const TractBranch& branch, double t, std::span<const double> T_grid,
                           const SpectrumOptions& opts) {
  SpectrumOptions o = opts;
  o.refine_t = {t};
  const auto tables = diagonal_tables(branch, T_grid, o);
  return beta_infinity(tables, t);
}

double smallest_root(const std::function<double(double)>& b, double step, double width, double hi) {
  if (!(step > 0.0) || !(width > 0.0)) fail(ErrorKind::InvalidArgument, "bad scan parameters");
  double t0 = 0.0;
  double b0 = b(0.0);
  const int n = static_cast<int>(std::ceil(hi / step - 1e-9));
  for (int k = 1; k <= n; ++k) {
    const double t1 = std::min(hi, k * step);
    const double b1 = b(t1);
    if (b1 == 0.0) return t1;
    if (b0 > 0.0 && b1 < 0.0) {
      double lo = t0;
      double up = t1;
      while (up - lo > width) {
        const double mid = 0.5 * (lo + up);
        const double bm = b(mid);
        if (bm == 0.0) return mid;
        (bm > 0.0 ? lo : up) = mid;
      }
      return 0.5 * (lo + up);
    }
    t0 = t1;
    b0 = b1;
  }
  fail(ErrorKind::NoSignChange, "b has no sign change on (0, " + std::to_string(hi) + "]");
}

SpectrumModel::SpectrumModel(const TractBranch& branch, const SpectrumOptions& opts)
    : T_grid_(default_T_grid(opts)), opts_(opts) {
  tables_ = diagonal_tables(branch, T_grid_, opts_);
}

BetaInfinity SpectrumModel::beta_infinity(double t) const {
  return tractdyn::beta_infinity(tables_, t);
}

double SpectrumModel::b_infinity(double t) const { return beta_infinity(t).value - t + 1.0; }

double SpectrumModel::theta() const {
  return smallest_root([this](double t) { return b_infinity(t); }, opts_.theta_step,
                       opts_.theta_width);
}

SpectrumCurve SpectrumModel::curve(std::span<const double> t_grid) const {
  if (t_grid.empty()) fail(ErrorKind::InvalidGrid, "empty t grid");
  SpectrumCurve c;
  c.t_grid.assign(t_grid.begin(), t_grid.end());
  c.T_grid = T_grid_;
  for (double t : t_grid) {
    const BetaInfinity b = beta_infinity(t);
    c.beta_inf.push_back(b.value);
    c.b_inf.push_back(b.value - t + 1.0);
    c.drift.push_back(b.drift);
    c.raw.push_back(b.raw);
  }
  try {
    c.theta_hat = theta();
    c.theta_found = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoSignChange) throw;
    c.theta_found = false;
  }
  return c;
}

NegativeSpectrumReport negative_spectrum_check(const SpectrumCurve& curve, double tol) {
  NegativeSpectrumReport rep;
  if (!curve.theta_found) return rep;
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i)
    if (curve.t_grid[i] > curve.theta_hat + 0.05 && !(curve.b_inf[i] < tol))
      rep.violations.push_back(curve.t_grid[i]);
  rep.negative = rep.violations.empty();
  return rep;
}

CompositeReport composite_spectrum_compare(const SpectrumModel& inner,
                                           const SpectrumModel& composite,
                                           std::span<const double> t_grid) {
  CompositeReport rep;
  rep.theta_inner = inner.theta();
  rep.theta_composite = composite.theta();
  rep.theta_ok = rep.theta_composite <= rep.theta_inner + 0.05;
  rep.beta_ok = true;
  for (double t : t_grid) {
    rep.t_grid.push_back(t);
    rep.beta_inner.push_back(inner.beta_infinity(t).value);
    rep.beta_composite.push_back(composite.beta_infinity(t).value);
    if (!(rep.beta_composite.back() <= rep.beta_inner.back() + 0.05)) rep.beta_ok = false;
  }
  return rep;
}

}  // namespace tractdyn
