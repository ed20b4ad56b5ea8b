#include "tractdyn/bottcher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tractdyn/parallel.hpp"
#include "tractdyn/quadrature.hpp"

namespace tractdyn {
namespace {

Polynomial monic_conjugate(const Polynomial& p, Complex alpha) {
  std::vector<Complex> b(p.coeffs().begin(), p.coeffs().end());
  Complex scale = 1.0 / alpha;  // alpha^(k-1)
  for (std::size_t k = 0; k < b.size(); ++k) {
    b[k] *= scale;
    scale *= alpha;
  }
  b.back() = 1.0;
  return Polynomial(std::move(b));
}

Complex monic_scale(const Polynomial& p) {
  const int d = p.degree();
  return std::pow(1.0 / p.leading(), 1.0 / (d - 1));
}

}  // namespace

BottcherMap::BottcherMap(Polynomial p)
    : p_(std::move(p)),
      q_(monic_conjugate(p_, monic_scale(p_))),
      alpha_(monic_scale(p_)),
      escape_(q_.escape_radius()),
      outer_(2.0 * q_.escape_radius()) {}

Complex BottcherMap::coordinate_log(Complex w, Complex* dlog) const {
  // log phi(w) = log w + sum_k d^-(k+1) log(1 + eps(w_k)),
  // eps(v) = q(v) / v^d - 1; r_k = w_k' / w_k tracks the chain rule.
  const int d = q_.degree();
  const auto b = q_.coeffs();
  Complex log_phi = std::log(w);
  Complex r = 1.0 / w;
  Complex dl = r;
  Complex wk = w;
  double scale = 1.0 / d;
  for (int k = 0; k < 200; ++k) {
    const Complex inv = 1.0 / wk;
    Complex eps = 0.0;
    Complex eps_v = 0.0;  // v * eps'(v)
    Complex pw = inv;
    for (int j = d - 1; j >= 0; --j) {
      eps += b[j] * pw;
      eps_v += static_cast<double>(j - d) * b[j] * pw;
      pw *= inv;
    }
    const Complex term = scale * std::log(1.0 + eps);
    const Complex dterm = scale * eps_v / (1.0 + eps) * r;
    log_phi += term;
    dl += dterm;
    if (std::abs(term) < 1e-18 && std::abs(dterm) < 1e-18 * std::abs(dl)) break;
    auto [qv, dq] = q_.eval_with_derivative(wk);
    r *= wk * dq / qv;
    wk = qv;
    scale /= d;
    if (!is_finite(wk) || std::abs(wk) > 1e150) break;
  }
  if (dlog) *dlog = dl;
  return log_phi;
}

BottcherMap::Value BottcherMap::inverse_far(Complex zeta) const {
  const int d = q_.degree();
  const auto b = q_.coeffs();
  Complex w = zeta - b[d - 1] / static_cast<double>(d);
  const Complex log_zeta = std::log(zeta);
  Complex dl = 0.0;
  for (int it = 0; it < 60; ++it) {
    const Complex g = wrap_log(coordinate_log(w, &dl) - log_zeta);
    const Complex step = g / dl;
    w -= step;
    if (std::abs(step) <= 1e-16 * std::abs(w)) break;
  }
  coordinate_log(w, &dl);
  // phi(h(zeta)) = zeta, so h' = 1 / phi'(h) = 1 / (zeta * dlog).
  return {w, 1.0 / (zeta * dl)};
}

BottcherMap::Value BottcherMap::eval_monic(Complex zeta) const {
  const double s = std::abs(zeta);
  if (s >= outer_) return inverse_far(zeta);
  if (!(s > 1.0)) fail(ErrorKind::InvalidArgument, "Böttcher map needs |z| > 1");

  const int d = q_.degree();
  const Complex dir = zeta / s;
  double s_cur = outer_;
  Value cur = inverse_far(s_cur * dir);
  double frac = 0.25;
  while (s_cur > s) {
    const double s_next = std::max(s, s_cur - frac * (s_cur - 1.0));
    const Complex z_cur = s_cur * dir;
    const Complex z_next = s_next * dir;
    // least m with s_next^(d^m) >= outer radius
    int m = 0;
    Complex far = z_next;
    while (std::abs(far) < outer_) {
      Complex pw = far;
      for (int j = 1; j < d; ++j) pw *= far;
      far = pw;
      ++m;
    }
    const Value target = inverse_far(far);
    const Complex pred = cur.h + cur.dh * (z_next - z_cur);
    Complex u = pred;
    Complex deriv = 1.0;
    bool ok = false;
    for (int it = 0; it < 40; ++it) {
      Complex v = u;
      deriv = 1.0;
      for (int j = 0; j < m; ++j) {
        auto [qv, dq] = q_.eval_with_derivative(v);
        deriv *= dq;
        v = qv;
      }
      const Complex res = v - target.h;
      if (std::abs(res) <= 1e-13 * (1.0 + std::abs(target.h))) {
        ok = true;
        break;
      }
      if (deriv == Complex(0.0) || !is_finite(deriv)) break;
      const Complex du = res / deriv;
      u -= du;
      if (!is_finite(u)) break;
      // The residual floor grows with |(q^m)'|, so also accept a vanishing step.
      if (std::abs(du) <= 1e-14 * (1.0 + std::abs(u))) {
        ok = true;
        break;
      }
    }
    const double moved = std::abs(u - pred);
    const double predicted = std::abs(pred - cur.h);
    if (!ok || moved > 0.5 * predicted + 1e-12 * (1.0 + std::abs(cur.h))) {
      frac *= 0.5;
      if (frac < 1e-7)
        fail(ErrorKind::BranchLoss, "radial continuation stalled at |z| = " + std::to_string(s_cur));
      continue;
    }
    // h'(z) = d^m z^(d^m - 1) h'(z^(d^m)) / (q^m)'(h(z))
    const double dm = std::pow(static_cast<double>(d), m);
    cur = {u, dm * (far / z_next) * target.dh / deriv};
    s_cur = s_next;
    frac = std::min(0.25, frac * 2.0);
  }
  return cur;
}

BottcherMap::Value BottcherMap::eval(Complex z) const {
  const Value v = eval_monic(z);
  return {alpha_ * v.h, alpha_ * v.dh};
}

Complex bottcher_inverse(const Polynomial& p, Complex z) { return BottcherMap(p)(z); }

namespace {

// Circle means for several exponents sharing one set of h' samples. Full
// circles use the trapezoid rule (spectral for periodic integrands, nested
// under doubling); proper arcs use composite Gauss-Legendre.
std::vector<double> circle_means_multi(const BottcherMap& h, double r, std::span<const double> ts,
                                       double theta0, double theta1,
                                       const CircleMeansOptions& opts) {
  if (!(r - 1.0 >= opts.min_offset))
    fail(ErrorKind::InvalidArgument, "circle radius too close to the unit circle");
  if (!(theta1 > theta0)) fail(ErrorKind::InvalidArgument, "empty arc");
  const std::size_t nt = ts.size();
  auto sample = [&](std::span<const double> thetas, std::vector<std::vector<double>>& out) {
    out.assign(thetas.size(), std::vector<double>(nt));
    parallel_for(thetas.size(), [&](std::size_t i) {
      const double a = std::abs(h.eval(std::polar(r, thetas[i])).dh);
      for (std::size_t k = 0; k < nt; ++k) out[i][k] = std::pow(a, ts[k]) * r;
    });
  };
  auto converged = [&](const std::vector<double>& prev, const std::vector<double>& cur) {
    for (std::size_t k = 0; k < nt; ++k)
      if (std::abs(cur[k] - prev[k]) > opts.rel_tolerance * std::abs(cur[k])) return false;
    return true;
  };

  const bool full = theta1 - theta0 >= kTwoPi * (1.0 - 1e-12);
  if (full) {
    int n = 64;
    std::vector<double> thetas(n);
    for (int i = 0; i < n; ++i) thetas[i] = theta0 + kTwoPi * i / n;
    std::vector<std::vector<double>> vals;
    sample(thetas, vals);
    std::vector<double> sum(nt, 0.0);
    for (const auto& v : vals)
      for (std::size_t k = 0; k < nt; ++k) sum[k] += v[k];
    std::vector<double> prev(nt);
    for (std::size_t k = 0; k < nt; ++k) prev[k] = sum[k] * kTwoPi / n;
    while (n < opts.max_panels * 8) {
      // midpoints of the current grid
      for (int i = 0; i < n; ++i) thetas[i] = theta0 + kTwoPi * (i + 0.5) / n;
      sample(thetas, vals);
      for (const auto& v : vals)
        for (std::size_t k = 0; k < nt; ++k) sum[k] += v[k];
      n *= 2;
      thetas.resize(n);
      std::vector<double> cur(nt);
      for (std::size_t k = 0; k < nt; ++k) cur[k] = sum[k] * kTwoPi / n;
      if (converged(prev, cur)) return cur;
      prev = std::move(cur);
    }
    return prev;
  }

  int panels = 16;
  std::vector<double> prev = quad::composite(sample, theta0, theta1, panels, nt);
  while (panels < opts.max_panels) {
    panels *= 2;
    std::vector<double> cur = quad::composite(sample, theta0, theta1, panels, nt);
    if (converged(prev, cur)) return cur;
    prev = std::move(cur);
  }
  return prev;
}

}  // namespace

double bottcher_circle_means(const BottcherMap& h, double r, double t, double theta0, double theta1,
                             const CircleMeansOptions& opts) {
  const double ts[] = {t};
  return circle_means_multi(h, r, ts, theta0, theta1, opts)[0];
}

double bottcher_circle_means(const Polynomial& p, double r, double t, double theta0, double theta1,
                             const CircleMeansOptions& opts) {
  return bottcher_circle_means(BottcherMap(p), r, t, theta0, theta1, opts);
}

BottcherSpectrumEstimate bottcher_spectrum(const BottcherMap& h, std::span<const double> t_grid,
                                           std::span<const double> radii,
                                           const CircleMeansOptions& opts) {
  BottcherSpectrumEstimate est;
  est.radii.assign(radii.begin(), radii.end());
  est.t_grid.assign(t_grid.begin(), t_grid.end());
  est.log_means.assign(t_grid.size(), std::vector<double>(radii.size()));
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const auto means = circle_means_multi(h, radii[j], t_grid, 0.0, kTwoPi, opts);
    for (std::size_t k = 0; k < t_grid.size(); ++k) est.log_means[k][j] = std::log(means[k]);
  }
  est.beta = fit_growth_exponents(radii, est.log_means, opts.correction_exponent);
  return est;
}

std::vector<double> fit_growth_exponents(std::span<const double> radii,
                                         const std::vector<std::vector<double>>& log_means,
                                         double correction_exponent) {
  const std::size_t n = radii.size();
  std::vector<double> out;
  for (const auto& logs : log_means) {
    if (n >= 3) {
      // Least squares on log I = beta L + c + a (r - 1)^gamma, L = |log(r - 1)|.
      double A[3][3] = {};
      double rhs[3] = {};
      for (std::size_t i = 0; i < n; ++i) {
        const double e = radii[i] - 1.0;
        const double row[3] = {std::abs(std::log(e)), 1.0, std::pow(e, correction_exponent)};
        for (int a = 0; a < 3; ++a) {
          rhs[a] += row[a] * logs[i];
          for (int b = 0; b < 3; ++b) A[a][b] += row[a] * row[b];
        }
      }
      for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
          if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(rhs[col], rhs[piv]);
        for (int r = col + 1; r < 3; ++r) {
          const double f = A[r][col] / A[col][col];
          for (int c = col; c < 3; ++c) A[r][c] -= f * A[col][c];
          rhs[r] -= f * rhs[col];
        }
      }
      double x[3];
      for (int r = 2; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < 3; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
      }
      out.push_back(x[0]);
    } else if (n == 2) {
      out.push_back((logs[1] - logs[0]) /
                    (std::abs(std::log(radii[1] - 1.0)) - std::abs(std::log(radii[0] - 1.0))));
    } else if (n == 1) {
      out.push_back(logs[0] / std::abs(std::log(radii[0] - 1.0)));
    } else {
      fail(ErrorKind::InvalidArgument, "no radii");
    }
  }
  return out;
}

}  // namespace tractdyn
