#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tractdyn/tract.hpp"

namespace tractdyn {

struct TransferOptions {
  int k_budget = (1 << 14) - 1;  // largest |k| for a single sample
  double stop_fraction = 1e-10;  // block share of the running sum that ends the series
  int divergence_blocks = 4;     // consecutive non-decreasing blocks that signal divergence
  double ratio_cap = 0.9;        // for the geometric tail
};

/// L_t 1(w) = sum over xi in exp^-1(w) and over tracts of |phi'(xi) / phi(xi)|^t.
/// Terms are grouped in dyadic blocks: block 0 is k = 0, block n holds
/// 2^(n-1) <= |k| < 2^n. value = partial_sum + tail_estimate, where the tail
/// is the last block times q / (1 - q), q the ratio of the last two blocks
/// capped at ratio_cap.
struct TransferSample {
  Complex w;
  double t = 0.0;
  double value = 0.0;
  double partial_sum = 0.0;
  double tail_estimate = 0.0;
  long long terms_used = 0;
  std::vector<double> blocks;
};

/// Throws InvalidArgument (t <= 0 or |w| <= R) and DivergenceDetected.
TransferSample transfer_apply_point(const TractAtlas& atlas, double t, Complex w,
                                    const TransferOptions& opts = {});

struct DyadicExponent {
  int n;
  double exponent;  // log2(block_n / block_(n-1))
};

/// Local growth exponents of the dyadic blocks, to compare with 1 - t + beta.
std::vector<DyadicExponent> transfer_dyadic_profile(const TractAtlas& atlas, double t, Complex w,
                                                    const TransferOptions& opts = {});

struct EntireTreeOptions {
  int branch_budget = 15;         // largest |k| per level; rounded down to 2^m - 1
  long long max_nodes = 20000000;
  TransferOptions series;         // stop rule and tail for every node
};

/// Inverse-branch tree of f restricted to the tracts, down to a fixed depth.
/// Positions and log weights do not depend on t, so one tree serves every t.
/// Nodes that fall outside the domain of phi have no children.
class EntireTree {
 public:
  EntireTree(const TractAtlas& atlas, Complex w, int depth, const EntireTreeOptions& opts = {});

  int depth() const noexcept { return static_cast<int>(levels_.size()) - 1; }
  long long node_count() const noexcept;
  int blocks_per_tract() const noexcept { return blocks_; }

  /// L^n_t 1(w) for 1 <= n <= depth. Throws DivergenceDetected.
  double iterate(double t, int n) const;

 private:
  struct Level {
    std::vector<Complex> z;  // empty on the deepest level
    std::vector<double> log_weight;  // log |phi'/phi| at the node, relative to its parent
    std::vector<long long> first_child;  // -1 if outside the domain
  };

  double node_value(double t, int level, std::size_t i, int remaining) const;

  std::vector<Level> levels_;
  EntireTreeOptions opts_;
  int tracts_ = 0;
  int blocks_ = 0;
  int children_ = 0;
};

/// L^n_t 1(w) with n <= 4; n = 1 is transfer_apply_point with k_budget equal to
/// the branch budget. Throws BudgetExceeded if the tree would exceed max_nodes.
double transfer_iterate(const TractAtlas& atlas, double t, Complex w, int n,
                        const EntireTreeOptions& opts = {});

struct PressureEstimate {
  double t = 0.0;
  double value = 0.0;     // least-squares slope of log L^n against n
  double residual = 0.0;  // rms of the fit
  std::vector<double> log_iterates;
};

/// Least-squares slope of log L^n_t 1(w), n = 1..n_max, read off one tree.
PressureEstimate pressure_entire(const EntireTree& tree, double t, int n_max);
PressureEstimate pressure_entire(const TractAtlas& atlas, double t, Complex w, int n_max = 3,
                                 const EntireTreeOptions& opts = {});

struct EntirePressureCurve {
  std::vector<double> t_grid;
  std::vector<double> pressure;
  std::vector<double> residual;
  int n_levels = 0;
  int branch_budget = 0;
  long long tree_nodes = 0;
};

EntirePressureCurve pressure_curve(const EntireTree& tree, std::span<const double> t_grid,
                                   int n_max);

struct EntireBowenZero {
  double h = 0.0;
  double lo = 0.0;  // final bracket
  double hi = 0.0;
};

/// Bisection root of a decreasing function on (lo, hi] to the given width.
/// Throws NoSignChange if P(lo) and P(hi) do not bracket zero.
EntireBowenZero bisect_decreasing(const std::function<double(double)>& P, double lo,
                                  double hi, double width);

/// Zero of t -> P(t) on (theta + 0.05, 2.5], bracket width 0.02. Pressures
/// that diverge at the lower end count as positive.
EntireBowenZero bowen_zero_entire(const EntireTree& tree, double theta, int n_max = 3);

/// Default base point for the tree: w = R e (on the positive real axis).
Complex default_transfer_point(const TractAtlas& atlas);

struct DecayReport {
  double t = 0.0;
  double p = 0.0;
  std::vector<double> s_grid;  // |w| = e^s
  std::vector<double> values;  // L_t 1(e^s)
  std::vector<double> scaled;  // L_t 1 * s^(1/p)
  std::vector<double> running_sup;
  std::vector<double> linearizer_scaled;  // L_t 1 * s^(t - 1)
  double band = 0.0;  // max / min of linearizer_scaled
  bool stable = false;  // last running sup within 10% of the previous one
};

/// Throws InvalidArgument for t <= 0, p <= 1, or 1/p >= t/theta - 1.
DecayReport decay_check(const TractAtlas& atlas, double t, double p, double theta,
                        std::span<const double> s_grid, const TransferOptions& opts = {});

}  // namespace tractdyn
