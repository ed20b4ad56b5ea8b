#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tractdyn/linearizer.hpp"

namespace tractdyn {

enum class Family { ExpPower, Koenigs, CompositeExp };

std::string_view to_string(Family f) noexcept;

/// Immutable handle on one of the supported entire functions:
///   ExpPower      lambda * exp(z^d)
///   Koenigs       f(kappa z), f the linearizer of a polynomial
///   CompositeExp  F = inner o exp
/// Handles are cheap to copy and safe to share across threads.
class EntireFunction {
 public:
  static EntireFunction exp_power(Complex lambda, int d);
  static EntireFunction koenigs(KoenigsLinearizer L);
  static EntireFunction composite_exp(const EntireFunction& inner, std::vector<int> offsets = {0});

  Family family() const noexcept { return family_; }

  Complex value(Complex z) const;
  Complex derivative(Complex z) const;
  /// Some logarithm of f(z); usable where f itself overflows.
  Complex log_value(Complex z) const;
  /// f'(z) / f(z).
  Complex log_derivative(Complex z) const;
  struct LogPair {
    Complex log_value;
    Complex dlog;
  };
  /// Both of the above from one evaluation.
  LogPair log_pair(Complex z) const;

  /// Radius rho with S(f) inside the closed disc of radius rho.
  double singular_radius() const noexcept { return singular_radius_; }

  // ExpPower payload
  Complex lambda() const noexcept { return lambda_; }
  int power() const noexcept { return d_; }
  // Koenigs payload
  const KoenigsLinearizer& linearizer() const;
  // CompositeExp payload
  const EntireFunction& inner() const;
  const std::vector<int>& offsets() const noexcept { return offsets_; }

  /// JSON descriptor (see parse_function).
  std::string descriptor() const;
  /// Short human label, e.g. "exp(z^2)" or "koenigs(z^2-1)".
  std::string label() const;

 private:
  EntireFunction() = default;

  Family family_ = Family::ExpPower;
  Complex lambda_ = 1.0;
  int d_ = 1;
  std::shared_ptr<const KoenigsLinearizer> koenigs_;
  std::shared_ptr<const EntireFunction> inner_;
  std::vector<int> offsets_;
  double singular_radius_ = 0.0;
};

/// |f'(z)|_1 = |f'(z)| |z| / |f(z)|. Throws ZeroDenominator when |f(z)| < 1e-300
/// or z = 0.
double metric_derivative(const EntireFunction& f, Complex z);

/// Accepts a JSON descriptor
///   {"family":"exp_power","lambda":[re,im],"d":k}
///   {"family":"koenigs","poly":"z^2-1" | {"coeffs":[[re,im],...]},
///    "z0":[re,im] | "auto", "kappa":[re,im], "disjoint_R":R}
///   {"family":"composite_exp","inner":{...},"offsets":[k,...]}
/// or a shorthand: exp, exp(z^2), 0.25*exp(z), exp(z-6), koenigs(z^2-1),
/// koenigs(z^2, 1), koenigs(z^2, 1, 0.125), koenigs(z^2-1, auto, disjoint=2.718),
/// composite(exp(z-6)).
EntireFunction parse_function(std::string_view text);

Polynomial parse_polynomial(std::string_view text);

}  // namespace tractdyn
