#include "tractdyn/linearizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tractdyn/poly_dynamics.hpp"
#include "tractdyn/roots.hpp"

namespace tractdyn {
namespace {

constexpr double kLogSwitch = 1e30;

void check_fixed_point(const Polynomial& p, Complex z0) {
  if (!is_finite(z0)) fail(ErrorKind::InvalidArgument, "z0 is not finite");
  if (std::abs(p(z0) - z0) >= 1e-10 * std::max(1.0, std::abs(z0)))
    fail(ErrorKind::InvalidArgument, "z0 is not a fixed point of p");
  if (!(std::abs(p.derivative(z0)) > 1.0))
    fail(ErrorKind::NotRepelling, "|p'(z0)| <= 1");
}

std::vector<Complex> critical_points(const Polynomial& p) {
  auto dc = p.derivative_coeffs();
  return aberth_roots(dc);
}

double postcritical_radius(const Polynomial& p) {
  double sup = 0.0;
  const double escape = p.escape_radius();
  for (Complex c : critical_points(p)) {
    Complex v = c;
    for (int k = 0; k < 500; ++k) {
      v = p(v);
      const double a = std::abs(v);
      if (!(a <= escape)) return std::numeric_limits<double>::infinity();
      sup = std::max(sup, a);
    }
  }
  return sup;
}

}  // namespace

std::vector<Complex> koenigs_coefficients(const Polynomial& p, Complex z0, int K) {
  check_fixed_point(p, z0);
  if (K < 1) fail(ErrorKind::InvalidArgument, "need at least one coefficient");
  const std::vector<Complex> c = p.taylor_at(z0);  // c[1] = lambda
  const int d = p.degree();
  const Complex lambda = c[1];

  // pw[j][n] = [g^j]_n for g = sum a_m z^m; index n runs 0..K.
  std::vector<std::vector<Complex>> pw(d + 1, std::vector<Complex>(K + 1, 0.0));
  std::vector<Complex> a(K + 1, 0.0);
  a[1] = 1.0;
  pw[1][1] = 1.0;
  Complex lambda_n = lambda;
  for (int n = 2; n <= K; ++n) {
    lambda_n *= lambda;
    if (!is_finite(lambda_n) || std::abs(lambda_n) > 1e280) break;  // remaining a_n underflow
    Complex rhs = 0.0;
    for (int j = 2; j <= std::min(d, n); ++j) {
      Complex s = 0.0;
      for (int m = 1; m <= n - (j - 1); ++m) s += a[m] * pw[j - 1][n - m];
      pw[j][n] = s;
      rhs += c[j] * s;
    }
    a[n] = rhs / (lambda_n - lambda);
    pw[1][n] = a[n];
  }
  return {a.begin() + 1, a.end()};
}

KoenigsLinearizer::KoenigsLinearizer(Polynomial p, Complex z0, Complex kappa,
                                     const KoenigsOptions& opts)
    : p_(std::move(p)), z0_(z0), kappa_(kappa), opts_(opts) {
  check_fixed_point(p_, z0_);
  if (!is_finite(kappa_) || kappa_ == Complex(0.0))
    fail(ErrorKind::InvalidArgument, "kappa must be finite and non-zero");
  lambda_ = p_.derivative(z0_);

  double dist = std::numeric_limits<double>::infinity();
  for (Complex c : critical_points(p_)) dist = std::min(dist, std::abs(c - z0_));
  r0_ = 0.25 * std::abs(lambda_) * dist;

  const std::vector<Complex> a = koenigs_coefficients(p_, z0_, opts_.max_terms);
  for (int attempt = 0; attempt < 60; ++attempt) {
    int K = 0;
    int run = 0;
    double rk = r0_;
    for (int k = 1; k <= opts_.max_terms; ++k, rk *= r0_) {
      if (std::abs(a[k - 1]) * rk < opts_.tail_tolerance) {
        if (++run == 3) {
          K = k;
          break;
        }
      } else {
        run = 0;
      }
    }
    if (K > 0) {
      taylor_.assign(a.begin(), a.begin() + K);
      break;
    }
    r0_ *= 0.5;
  }
  if (taylor_.empty()) fail(ErrorKind::NonConvergence, "Koenigs series does not settle");
  singular_radius_ = postcritical_radius(p_);
}

KoenigsLinearizer KoenigsLinearizer::with_kappa(Complex kappa) const {
  if (!is_finite(kappa) || kappa == Complex(0.0))
    fail(ErrorKind::InvalidArgument, "kappa must be finite and non-zero");
  KoenigsLinearizer out = *this;
  out.kappa_ = kappa;
  return out;
}

int KoenigsLinearizer::ladder_depth(Complex z) const {
  double m = std::abs(kappa_ * z);
  if (!std::isfinite(m)) fail(ErrorKind::InvalidArgument, "argument is not finite");
  const double grow = std::abs(lambda_);
  int n = 0;
  while (m > r0_) {
    m /= grow;
    ++n;
  }
  return n;
}

KoenigsLinearizer::Ladder KoenigsLinearizer::run(Complex z, int n) const {
  const Complex u = kappa_ * z / std::pow(lambda_, n);
  if (std::abs(u) > r0_ * (1.0 + 1e-12))
    fail(ErrorKind::InvalidArgument, "ladder depth too small for the series disc");
  // series = u q(u) with q(u) = sum a_{k+1} u^k
  Complex s = 0.0;
  Complex ds = 0.0;
  for (std::size_t k = taylor_.size(); k-- > 0;) {
    ds = ds * u + s;
    s = s * u + taylor_[k];
  }
  ds = ds * u + s;
  s = s * u;

  Ladder L;
  L.w = z0_ + s;
  L.log_deriv = std::log(kappa_) - static_cast<double>(n) * std::log(lambda_) + std::log(ds);
  for (int k = 0; k < n; ++k) {
    if (!L.in_log) {
      auto [pv, dp] = p_.eval_with_derivative(L.w);
      L.log_deriv += std::log(dp);
      L.w = pv;
      if (std::abs(L.w) > kLogSwitch) {
        L.in_log = true;
        L.log_w = std::log(L.w);
      }
    } else {
      L.log_deriv += p_.log_derivative_at_log(L.log_w);
      L.log_w = p_.log_eval_at_log(L.log_w);
    }
  }
  if (!L.in_log) L.log_w = std::log(L.w);
  return L;
}

KoenigsLinearizer::Value KoenigsLinearizer::eval_at_depth(Complex z, int n) const {
  const Ladder L = run(z, n);
  Value v;
  v.depth = n;
  if (L.in_log) {
    if (!(L.log_w.real() < 709.0)) fail(ErrorKind::Overflow, "|f(z)| exceeds the double range");
    v.value = std::exp(L.log_w);
  } else {
    v.value = L.w;
  }
  if (!(L.log_deriv.real() < 709.0)) fail(ErrorKind::Overflow, "|f'(z)| exceeds the double range");
  v.deriv = std::exp(L.log_deriv);
  if (!is_finite(v.value) || !is_finite(v.deriv))
    fail(ErrorKind::Overflow, "non-finite linearizer value");
  return v;
}

KoenigsLinearizer::Value KoenigsLinearizer::eval(Complex z) const {
  return eval_at_depth(z, ladder_depth(z));
}

KoenigsLinearizer::LogValue KoenigsLinearizer::log_eval(Complex z) const {
  const Ladder L = run(z, ladder_depth(z));
  if (!is_finite(L.log_w)) fail(ErrorKind::ZeroDenominator, "f(z) = 0");
  return {L.log_w, std::exp(L.log_deriv - L.log_w)};
}

KoenigsLinearizer make_disjoint_type(const KoenigsLinearizer& L, double R) {
  if (!(R >= 1.0)) fail(ErrorKind::InvalidArgument, "make_disjoint_type needs R >= 1");
  if (L.z0() == Complex(0.0)) fail(ErrorKind::InvalidArgument, "z0 must be non-zero");
  constexpr int kRings = 32;
  constexpr int kAngles = 128;
  const double log_r = std::log(R);
  Complex kappa = L.kappa();
  while (true) {
    const KoenigsLinearizer f = L.with_kappa(kappa);
    bool separated = true;
    for (int i = 0; i <= kRings && separated; ++i) {
      const double rho = 2.0 * R * i / kRings;
      const int na = i == 0 ? 1 : kAngles;
      for (int j = 0; j < na; ++j) {
        const Complex z = std::polar(rho, kTwoPi * j / na);
        if (f.log_eval(z).log_value.real() > log_r) {
          separated = false;
          break;
        }
      }
    }
    if (separated) return f;
    kappa *= 0.5;
    if (std::abs(kappa) < 1e-12)
      fail(ErrorKind::ScaleFloor, "kappa fell below 1e-12 without separating the disc");
  }
}

Complex default_koenigs_point(const Polynomial& p) {
  const auto fixed = find_repelling_fixed_points(p);
  const FixedPointRecord* best = nullptr;
  for (const auto& fp : fixed) {
    if (!fp.is_repelling) continue;
    if (!best) {
      best = &fp;
      continue;
    }
    const double a = std::abs(fp.multiplier);
    const double b = std::abs(best->multiplier);
    if (a > b + 1e-12 || (std::abs(a - b) <= 1e-12 && fp.location.real() > best->location.real()))
      best = &fp;
  }
  if (!best) fail(ErrorKind::NotRepelling, "polynomial has no repelling fixed point");
  return best->location;
}

}  // namespace tractdyn
