#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tractdyn/core.hpp"

namespace tractdyn {

/// Complex polynomial of degree >= 2, coefficients stored constant term first.
class Polynomial {
 public:
  /// Throws InvalidArgument unless the list describes a polynomial of degree
  /// at least two with a non-zero leading coefficient.
  explicit Polynomial(std::vector<Complex> coeffs);

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex leading() const noexcept { return coeffs_.back(); }

  /// Horner evaluation.
  Complex operator()(Complex z) const noexcept;
  /// Value and first derivative in one Horner pass.
  std::pair<Complex, Complex> eval_with_derivative(Complex z) const noexcept;
  Complex derivative(Complex z) const noexcept { return eval_with_derivative(z).second; }

  /// Coefficients of p(z0 + u) in powers of u (Taylor shift).
  std::vector<Complex> taylor_at(Complex z0) const;
  /// Coefficients of p'(z), constant term first.
  std::vector<Complex> derivative_coeffs() const;

  /// log p(e^L) for |e^L| large, evaluated without forming e^L.
  Complex log_eval_at_log(Complex log_z) const noexcept;
  /// log p'(e^L) for |e^L| large.
  Complex log_derivative_at_log(Complex log_z) const noexcept;

  /// max_k |a_k / a_d| over the non-leading coefficients.
  double max_normalized_coefficient() const noexcept;
  /// 2 * (1 + max_k |a_k / a_d|): beyond this radius every orbit escapes.
  double escape_radius() const noexcept;

  /// Parses "z^2-1", "2z^2 - 1", "0.5*z^3+z" (integer/decimal coefficients).
  static Polynomial parse_shorthand(std::string_view text);

  std::string to_shorthand() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<Complex> coeffs_;
};

Complex poly_eval(const Polynomial& p, Complex z) noexcept;

}  // namespace tractdyn
