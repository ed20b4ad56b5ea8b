#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace tractdyn::quad {

/// 8-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre8 {
  static constexpr std::array<double, 8> nodes{
      -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
      0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static constexpr std::array<double, 8> weights{
      0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
      0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
};

/// Composite 8-point Gauss-Legendre on [a, b] with `panels` equal panels for
/// a vector-valued integrand. Node values are requested in one batch so the
/// caller can evaluate them in parallel.
using BatchIntegrand =
    std::function<void(std::span<const double> x, std::vector<std::vector<double>>& out)>;

std::vector<double> composite(const BatchIntegrand& f, double a, double b, int panels,
                              std::size_t components);

struct AdaptiveResult {
  std::vector<double> value;
  double error = 0.0;
  int intervals = 0;
};

/// Adaptive bisection on 8-point Gauss-Legendre panels, vector integrand.
/// A panel is accepted once |coarse - fine| <= max(abs_tol, rel_tol |fine|)
/// scaled by its share of the interval, componentwise.
AdaptiveResult adaptive(const std::function<std::vector<double>(double)>& f, double a, double b,
                        std::size_t components, double abs_tol, double rel_tol,
                        int initial_panels = 8, int max_depth = 30);

}  // namespace tractdyn::quad
