#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tractdyn/polynomial.hpp"

namespace tractdyn {

struct FixedPointRecord {
  Complex location;
  Complex multiplier;  // p'(location)
  bool is_repelling = false;
};

struct PreimageNode {
  Complex point;
  Complex cumulative_derivative;  // (p^n)'(point)
  int depth = 0;
};

struct TreeOptions {
  std::size_t node_budget = std::size_t{1} << 22;
};

/// Roots of p(z) = w with multiplicity; each satisfies
/// |p(r) - w| < 1e-10 (1 + |w|).
std::vector<Complex> preimages(const Polynomial& p, Complex w);

/// All finite fixed points with multipliers.
std::vector<FixedPointRecord> find_repelling_fixed_points(const Polynomial& p);

/// Full backward tree of p above w. Level n holds d^n nodes in generation
/// order (parent index major, root index minor), which is also the canonical
/// summation order.
class PreimageTree {
 public:
  PreimageTree(const Polynomial& p, Complex w, int depth, const TreeOptions& opts = {});

  int depth() const noexcept { return static_cast<int>(levels_.size()); }
  Complex base_point() const noexcept { return w_; }
  std::span<const PreimageNode> level(int n) const { return levels_.at(n - 1); }

  /// log sum over depth-n nodes of |(p^n)'|^{-t}.
  double log_sum(int n, double t) const;

 private:
  Complex w_;
  std::vector<std::vector<PreimageNode>> levels_;
  std::vector<std::vector<double>> log_abs_deriv_;
};

std::vector<PreimageNode> preimage_tree(const Polynomial& p, Complex w, int n,
                                        const TreeOptions& opts = {});

struct TreePressure {
  /// Pressure estimate: (log S_n - log S_{n-2}) / 2, the growth rate with the
  /// depth-independent prefactor removed. Falls back to the raw value at depth 1.
  double value = 0.0;
  /// (1/n) log sum at the requested depth.
  double raw = 0.0;
  int depth = 0;
  std::vector<double> per_depth_raw;   // (1/k) log S_k, k = 1..n
  std::vector<double> richardson;      // log S_k - log S_{k-1}, k = 2..n
};

TreePressure tree_pressure(const PreimageTree& tree, double t);
TreePressure tree_pressure(const Polynomial& p, double t, Complex w, int n,
                           const TreeOptions& opts = {});

struct PressureCurve {
  std::vector<double> t_grid;
  std::vector<double> values;
  int depth_used = 0;
  std::vector<std::vector<double>> per_depth_raw;  // [t index][depth - 1]
};

PressureCurve tree_pressure_curve(const Polynomial& p, std::span<const double> t_grid, Complex w,
                                  int n, const TreeOptions& opts = {});

/// Level sums sum_{eta in p^-N(xi)} |(p^N)'(eta)|^{-t}, N = 1..n_max.
std::vector<double> poincare_series_partial(const Polynomial& p, double t, Complex xi, int n_max,
                                            const TreeOptions& opts = {});

struct BowenZeroOptions {
  double t_lo = 0.1;
  double t_hi = 2.0;
  double width = 1e-6;
  std::optional<Complex> base_point;  // default: real escape radius
  TreeOptions tree;
};

struct BowenZero {
  double value = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double bracket_width = 0.0;
  int depth = 0;
  Complex base_point;
};

/// Bisection zero of t -> tree_pressure(p, t, w, depth) on [t_lo, t_hi].
/// Throws NoSignChange if the pressure keeps its sign across the bracket.
BowenZero bowen_zero_poly(const Polynomial& p, int depth, const BowenZeroOptions& opts = {});

}  // namespace tractdyn
