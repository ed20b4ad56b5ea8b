#pragma once

#include <span>
#include <vector>

#include "tractdyn/polynomial.hpp"

namespace tractdyn {

/// Taylor coefficients a_1..a_K of the Koenigs-Poincare function
/// f(z) = z0 + sum a_n z^n with f(lambda z) = p(f(z)), a_1 = 1.
/// Throws NotRepelling when |p'(z0)| <= 1 and InvalidArgument when z0 is not
/// a fixed point.
std::vector<Complex> koenigs_coefficients(const Polynomial& p, Complex z0, int K);

struct KoenigsOptions {
  int max_terms = 256;
  double tail_tolerance = 1e-14;
};

/// f_kappa(z) = f(kappa z) for the linearizer f of p at the repelling fixed
/// point z0. Evaluation walks the ladder u = kappa z / lambda^n into the
/// series disc and then applies p n times; once the orbit is huge the
/// iteration continues on logarithms so log f stays available far beyond the
/// double range.
class KoenigsLinearizer {
 public:
  KoenigsLinearizer(Polynomial p, Complex z0, Complex kappa = 1.0, const KoenigsOptions& opts = {});

  const Polynomial& polynomial() const noexcept { return p_; }
  Complex z0() const noexcept { return z0_; }
  Complex lambda() const noexcept { return lambda_; }
  Complex kappa() const noexcept { return kappa_; }
  /// a_1..a_K
  std::span<const Complex> taylor() const noexcept { return taylor_; }
  double series_radius() const noexcept { return r0_; }

  KoenigsLinearizer with_kappa(Complex kappa) const;

  struct Value {
    Complex value;
    Complex deriv;
    int depth = 0;
  };
  /// Throws Overflow if f or f' leaves the double range.
  Value eval(Complex z) const;
  /// Same ladder with a prescribed depth n (n at least the minimal one).
  Value eval_at_depth(Complex z, int n) const;
  Complex operator()(Complex z) const { return eval(z).value; }
  Complex derivative(Complex z) const { return eval(z).deriv; }

  struct LogValue {
    Complex log_value;  // a logarithm of f(z)
    Complex dlog;       // f'(z) / f(z)
  };
  LogValue log_eval(Complex z) const;

  /// sup of |s| over the post-critical set of p (the singular values of f);
  /// +inf when a critical orbit escapes.
  double singular_radius() const noexcept { return singular_radius_; }

  /// Least ladder depth for z.
  int ladder_depth(Complex z) const;

 private:
  struct Ladder {
    bool in_log = false;
    Complex w;          // p^n(s(u)) when !in_log
    Complex log_w;      // log p^n(s(u)) when in_log
    Complex log_deriv;  // log f'(z)
  };
  Ladder run(Complex z, int n) const;

  Polynomial p_;
  Complex z0_;
  Complex lambda_;
  Complex kappa_;
  std::vector<Complex> taylor_;
  double r0_ = 0.0;
  double singular_radius_ = 0.0;
  KoenigsOptions opts_;
};

/// Halves kappa until no point of a polar grid on the closed disc of radius
/// 2R has |f_kappa| > R. Throws ScaleFloor when |kappa| drops below 1e-12.
KoenigsLinearizer make_disjoint_type(const KoenigsLinearizer& L, double R);

/// Repelling fixed point with the largest multiplier modulus (ties: larger
/// real part). Throws NotRepelling if p has none.
Complex default_koenigs_point(const Polynomial& p);

}  // namespace tractdyn
