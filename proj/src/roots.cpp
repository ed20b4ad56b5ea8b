#include "tractdyn/roots.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tractdyn {
namespace {

struct HornerPair {
  Complex value;
  Complex deriv;
};

HornerPair horner(std::span<const Complex> c, Complex z) {
  Complex v = c.back();
  Complex d = 0.0;
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    d = d * z + v;
    v = v * z + c[k];
  }
  return {v, d};
}

}  // namespace

std::vector<Complex> aberth_roots(std::span<const Complex> coeffs, const RootOptions& opts) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1 || coeffs.back() == Complex(0.0))
    fail(ErrorKind::InvalidArgument, "aberth_roots needs a non-constant polynomial");

  const Complex lead = coeffs.back();
  // Ring centred on the root centroid; radius from the Fujiwara-type bound
  // max |a_k / a_n|^(1/(n-k)) about the centroid.
  const Complex centre = n >= 1 ? -coeffs[n - 1] / (lead * static_cast<double>(n)) : 0.0;
  double radius = 0.0;
  {
    // Coefficients of q(centre + u); only their magnitudes are needed.
    std::vector<Complex> work(coeffs.begin(), coeffs.end());
    std::vector<Complex> shifted(n + 1);
    for (int k = 0; k <= n; ++k) {
      Complex acc = work[n];
      for (int j = n - 1; j >= k; --j) {
        acc = work[j] + acc * centre;
        work[j] = acc;
      }
      shifted[k] = work[k];
    }
    for (int k = 0; k < n; ++k) {
      const double m = std::abs(shifted[k] / lead);
      if (m > 0.0) radius = std::max(radius, std::pow(m, 1.0 / (n - k)));
    }
  }
  if (radius == 0.0) radius = 1e-3;

  std::vector<Complex> z(n);
  for (int k = 0; k < n; ++k) {
    const double theta = kTwoPi * k / n + 0.4;
    z[k] = centre + radius * Complex(std::cos(theta), std::sin(theta));
  }

  const double tol = opts.abs_tolerance;
  std::vector<bool> done(n, false);
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    bool all_done = true;
    for (int k = 0; k < n; ++k) {
      const HornerPair hp = horner(coeffs, z[k]);
      if (std::abs(hp.value) <= tol) {
        done[k] = true;
        continue;
      }
      done[k] = false;
      all_done = false;
      if (hp.deriv == Complex(0.0)) {
        // Nudge off a critical point deterministically.
        z[k] += Complex(1e-7, 1e-7) * (1.0 + std::abs(z[k]));
        continue;
      }
      const Complex newton = hp.value / hp.deriv;
      Complex repulsion = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != k && z[j] != z[k]) repulsion += 1.0 / (z[k] - z[j]);
      const Complex denom = 1.0 - newton * repulsion;
      const Complex step = denom == Complex(0.0) ? newton : newton / denom;
      if (is_finite(step)) z[k] -= step;
    }
    if (all_done) return z;
  }
  double worst = 0.0;
  for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(horner(coeffs, z[k]).value));
  if (worst <= tol) return z;
  fail(ErrorKind::NonConvergence,
       "root residual " + std::to_string(worst) + " above " + std::to_string(tol));
}

}  // namespace tractdyn
