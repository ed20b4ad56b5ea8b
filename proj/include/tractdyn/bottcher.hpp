#pragma once

#include <span>
#include <vector>

#include "tractdyn/polynomial.hpp"

namespace tractdyn {

/// Inverse Böttcher map h: {|z| > 1} -> basin of infinity, h(z^d) = p(h(z)),
/// h(z) = c z + O(1) with c^(d-1) = 1 / leading coefficient.
///
/// Far out (|z| >= outer_radius()) h is obtained by Newton inversion of the
/// Böttcher coordinate, itself a product of d^-k-th roots along the forward
/// orbit. Closer to the unit circle the value is continued radially inwards:
/// each step predicts with h', then corrects by Newton on p^m(u) = h(z^(d^m))
/// with m the least power pushing z^(d^m) beyond the outer radius.
class BottcherMap {
 public:
  struct Value {
    Complex h;
    Complex dh;
  };

  explicit BottcherMap(Polynomial p);

  const Polynomial& polynomial() const noexcept { return p_; }
  double outer_radius() const noexcept { return outer_; }

  /// Requires |z| > 1. Throws BranchLoss if the radial continuation stalls.
  Value eval(Complex z) const;
  Complex operator()(Complex z) const { return eval(z).h; }

 private:
  Complex coordinate_log(Complex w, Complex* dlog) const;
  Value inverse_far(Complex zeta) const;
  Value eval_monic(Complex zeta) const;

  Polynomial p_;
  Polynomial q_;  // monic conjugate q(u) = p(alpha u) / alpha
  Complex alpha_;
  double escape_;
  double outer_;
};

Complex bottcher_inverse(const Polynomial& p, Complex z);

struct CircleMeansOptions {
  double min_offset = 1e-4;
  double rel_tolerance = 1e-8;
  int max_panels = 1 << 14;
  /// Exponent gamma of the (r - 1)^gamma correction in the growth fit.
  double correction_exponent = 0.5;
};

/// Integral of |h'(z)|^t |dz| over the arc {r e^{i theta}: theta0 <= theta <= theta1}.
double bottcher_circle_means(const BottcherMap& h, double r, double t, double theta0, double theta1,
                             const CircleMeansOptions& opts = {});
double bottcher_circle_means(const Polynomial& p, double r, double t, double theta0, double theta1,
                             const CircleMeansOptions& opts = {});

struct BottcherSpectrumEstimate {
  std::vector<double> radii;
  std::vector<std::vector<double>> log_means;  // [t index][radius index]
  std::vector<double> t_grid;
  std::vector<double> beta;                    // per t
};

/// Growth exponent of the full-circle means as r -> 1+: least-squares slope
/// of log I(r) against |log(r - 1)|, with an (r - 1)^gamma term absorbing the
/// pre-asymptotic part when three or more radii are supplied.
BottcherSpectrumEstimate bottcher_spectrum(const BottcherMap& h, std::span<const double> t_grid,
                                           std::span<const double> radii,
                                           const CircleMeansOptions& opts = {});

/// The fit used by bottcher_spectrum; log_means is indexed [t][radius].
std::vector<double> fit_growth_exponents(std::span<const double> radii,
                                         const std::vector<std::vector<double>>& log_means,
                                         double correction_exponent);

}  // namespace tractdyn
