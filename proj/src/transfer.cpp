#include "tractdyn/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tractdyn/parallel.hpp"

namespace tractdyn {
namespace {

// Number of dyadic blocks after block 0 that fit in |k| <= K.
int block_count(long long K) {
  int m = 0;
  while (m < 62 && (2LL << m) - 1 <= K) ++m;
  return m;
}

std::vector<long long> block_ks(int n) {
  if (n == 0) return {0};
  const long long lo = 1LL << (n - 1);
  const long long hi = (1LL << n) - 1;
  std::vector<long long> ks;
  ks.reserve(2 * (hi - lo + 1));
  for (long long k = -hi; k <= -lo; ++k) ks.push_back(k);
  for (long long k = lo; k <= hi; ++k) ks.push_back(k);
  return ks;
}

Complex preimage_xi(const TractBranch& b, Complex w, long long k) {
  return Complex(std::log(std::abs(w)) - b.log_scale(),
                 std::arg(w) + kTwoPi * static_cast<double>(k));
}

double log_weight(const TractBranch& b, Complex xi, Complex* z = nullptr) {
  const auto v = b.phi_with_derivative(xi);
  if (z) *z = v.z;
  return std::log(std::abs(v.dz)) - std::log(std::abs(v.z));
}

// Preimages of w lie in the tracts over {|w| > R} only when |w| > R.
bool in_domain(const TractAtlas& atlas, Complex w) {
  const auto& b = atlas.tracts.front();
  return std::abs(w) > atlas.radius &&
         std::log(std::abs(w)) - b.log_scale() >= b.options().min_offset;
}

class Series {
 public:
  explicit Series(const TransferOptions& opts) : opts_(opts) {}

  // Returns true once the series may stop.
  bool add(double block) {
    blocks_.push_back(block);
    sum_ += block;
    const std::size_t n = blocks_.size();
    if (n < 2) return false;
    if (sum_ == 0.0) return true;
    const double prev = blocks_[n - 2];
    nondecreasing_ = block >= prev ? nondecreasing_ + 1 : 0;
    if (nondecreasing_ >= opts_.divergence_blocks)
      fail(ErrorKind::DivergenceDetected,
           "dyadic blocks did not decrease over " + std::to_string(opts_.divergence_blocks) +
               " consecutive blocks");
    return block < prev && block < opts_.stop_fraction * sum_;
  }

  double sum() const noexcept { return sum_; }
  const std::vector<double>& blocks() const noexcept { return blocks_; }

  double tail() const {
    const std::size_t n = blocks_.size();
    if (n < 2 || blocks_[n - 1] <= 0.0) return 0.0;
    const double q = std::min(opts_.ratio_cap, blocks_[n - 1] / blocks_[n - 2]);
    return blocks_[n - 1] * q / (1.0 - q);
  }

 private:
  const TransferOptions& opts_;
  std::vector<double> blocks_;
  double sum_ = 0.0;
  int nondecreasing_ = 0;
};

void check_point(const TractAtlas& atlas, double t, Complex w) {
  if (!(t > 0.0)) fail(ErrorKind::InvalidArgument, "transfer operator needs t > 0");
  if (atlas.tracts.empty()) fail(ErrorKind::NoTractFound, "atlas has no tracts");
  if (!(std::abs(w) > atlas.radius))
    fail(ErrorKind::InvalidArgument, "transfer operator needs |w| > R");
  if (!in_domain(atlas, w))
    fail(ErrorKind::InvalidArgument, "w is too close to the singular values");
}

}  // namespace

TransferSample transfer_apply_point(const TractAtlas& atlas, double t, Complex w,
                                    const TransferOptions& opts) {
  check_point(atlas, t, w);
  if (opts.k_budget < 0) fail(ErrorKind::InvalidArgument, "k_budget must be non-negative");
  const int m = block_count(opts.k_budget);
  const std::size_t nt = atlas.tracts.size();
  Series series(opts);
  TransferSample out;
  out.w = w;
  out.t = t;
  for (int n = 0; n <= m; ++n) {
    const auto ks = block_ks(n);
    std::vector<double> terms(nt * ks.size());
    parallel_for(terms.size(), [&](std::size_t i) {
      const auto& b = atlas.tracts[i / ks.size()];
      terms[i] = std::exp(t * log_weight(b, preimage_xi(b, w, ks[i % ks.size()])));
    });
    double block = 0.0;
    for (double v : terms) block += v;
    out.terms_used += static_cast<long long>(terms.size());
    if (series.add(block)) break;
  }
  out.blocks = series.blocks();
  out.partial_sum = series.sum();
  out.tail_estimate = series.tail();
  out.value = out.partial_sum + out.tail_estimate;
  return out;
}

std::vector<DyadicExponent> transfer_dyadic_profile(const TractAtlas& atlas, double t, Complex w,
                                                    const TransferOptions& opts) {
  const TransferSample s = transfer_apply_point(atlas, t, w, opts);
  std::vector<DyadicExponent> out;
  for (std::size_t n = 2; n < s.blocks.size(); ++n)
    if (s.blocks[n] > 0.0 && s.blocks[n - 1] > 0.0)
      out.push_back({static_cast<int>(n), std::log2(s.blocks[n] / s.blocks[n - 1])});
  return out;
}

EntireTree::EntireTree(const TractAtlas& atlas, Complex w, int depth, const EntireTreeOptions& opts)
    : opts_(opts) {
  if (depth < 1 || depth > 4) fail(ErrorKind::InvalidArgument, "tree depth must be in 1..4");
  if (opts.branch_budget < 0 || opts.branch_budget > 512)
    fail(ErrorKind::InvalidArgument, "branch budget must be in 0..512");
  check_point(atlas, 1.0, w);
  tracts_ = static_cast<int>(atlas.tracts.size());
  blocks_ = block_count(opts.branch_budget) + 1;
  children_ = tracts_ * ((1 << blocks_) - 1);

  // child slot -> (tract, k), ordered by block, then tract, then k
  std::vector<std::pair<int, long long>> slots;
  for (int n = 0; n < blocks_; ++n) {
    const auto ks = block_ks(n);
    for (int j = 0; j < tracts_; ++j)
      for (long long k : ks) slots.emplace_back(j, k);
  }

  levels_.resize(1);
  levels_[0].z = {w};
  levels_[0].log_weight = {0.0};
  long long total = 1;
  for (int L = 0; L < depth; ++L) {
    Level& cur = levels_[L];
    cur.first_child.assign(cur.z.size(), -1);
    long long count = 0;
    for (std::size_t i = 0; i < cur.z.size(); ++i)
      if (in_domain(atlas, cur.z[i])) {
        cur.first_child[i] = count;
        count += children_;
      }
    total += count;
    if (total > opts.max_nodes)
      fail(ErrorKind::BudgetExceeded, "preimage tree needs more than " +
                                          std::to_string(opts.max_nodes) + " nodes");
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < cur.z.size(); ++i)
      if (cur.first_child[i] >= 0) owner.push_back(i);
    const bool leaves = L + 1 == depth;
    Level next;
    if (!leaves) next.z.resize(count);
    next.log_weight.resize(count);
    parallel_for(static_cast<std::size_t>(count), [&](std::size_t c) {
      const auto& [j, k] = slots[c % static_cast<std::size_t>(children_)];
      const auto& b = atlas.tracts[j];
      const Complex parent = cur.z[owner[c / static_cast<std::size_t>(children_)]];
      next.log_weight[c] =
          log_weight(b, preimage_xi(b, parent, k), leaves ? nullptr : &next.z[c]);
    });
    levels_.push_back(std::move(next));
  }
  levels_.back().first_child.assign(levels_.back().log_weight.size(), -1);
}

long long EntireTree::node_count() const noexcept {
  long long n = 0;
  for (const auto& L : levels_) n += static_cast<long long>(L.log_weight.size());
  return n;
}

double EntireTree::node_value(double t, int level, std::size_t i, int remaining) const {
  if (remaining == 0) return 1.0;
  const long long first = levels_[level].first_child[i];
  if (first < 0) return 0.0;
  const Level& next = levels_[level + 1];
  Series series(opts_.series);
  std::size_t c = static_cast<std::size_t>(first);
  for (int n = 0; n < blocks_; ++n) {
    const std::size_t size = static_cast<std::size_t>(tracts_) * (n == 0 ? 1 : (1u << n));
    double block = 0.0;
    for (std::size_t e = c + size; c < e; ++c)
      block += std::exp(t * next.log_weight[c]) * node_value(t, level + 1, c, remaining - 1);
    if (series.add(block)) break;
  }
  return series.sum() + series.tail();
}

double EntireTree::iterate(double t, int n) const {
  if (n < 1 || n > depth()) fail(ErrorKind::InvalidArgument, "iterate depth outside the tree");
  if (!(t > 0.0)) fail(ErrorKind::InvalidArgument, "transfer operator needs t > 0");
  if (n == 1) return node_value(t, 0, 0, 1);
  // Subtrees of the root's children are independent; evaluate them in parallel
  // and run the root series on the results in canonical order.
  const long long first = levels_[0].first_child[0];
  std::vector<double> sub(static_cast<std::size_t>(children_));
  parallel_for(sub.size(), [&](std::size_t c) {
    sub[c] = node_value(t, 1, static_cast<std::size_t>(first) + c, n - 1);
  });
  Series series(opts_.series);
  std::size_t c = 0;
  for (int b = 0; b < blocks_; ++b) {
    const std::size_t size = static_cast<std::size_t>(tracts_) * (b == 0 ? 1 : (1u << b));
    double block = 0.0;
    for (std::size_t e = c + size; c < e; ++c)
      block += std::exp(t * levels_[1].log_weight[first + c]) * sub[c];
    if (series.add(block)) break;
  }
  return series.sum() + series.tail();
}

double transfer_iterate(const TractAtlas& atlas, double t, Complex w, int n,
                        const EntireTreeOptions& opts) {
  if (n < 1 || n > 4) fail(ErrorKind::InvalidArgument, "transfer_iterate needs 1 <= n <= 4");
  if (n == 1) {
    TransferOptions o = opts.series;
    o.k_budget = opts.branch_budget;
    return transfer_apply_point(atlas, t, w, o).value;
  }
  return EntireTree(atlas, w, n, opts).iterate(t, n);
}

PressureEstimate pressure_entire(const EntireTree& tree, double t, int n_max) {
  if (n_max < 1 || n_max > tree.depth())
    fail(ErrorKind::InvalidArgument, "n_max outside the tree depth");
  PressureEstimate out;
  out.t = t;
  for (int n = 1; n <= n_max; ++n) {
    const double v = tree.iterate(t, n);
    if (!(v > 0.0)) fail(ErrorKind::ZeroDenominator, "empty preimage tree");
    out.log_iterates.push_back(std::log(v));
  }
  if (n_max == 1) {
    out.value = out.log_iterates[0];
    return out;
  }
  double sn = 0, sy = 0, snn = 0, sny = 0;
  for (int n = 1; n <= n_max; ++n) {
    const double y = out.log_iterates[n - 1];
    sn += n;
    sy += y;
    snn += static_cast<double>(n) * n;
    sny += n * y;
  }
  const double N = n_max;
  out.value = (N * sny - sn * sy) / (N * snn - sn * sn);
  const double c = (sy - out.value * sn) / N;
  double ss = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double r = out.log_iterates[n - 1] - (c + out.value * n);
    ss += r * r;
  }
  out.residual = std::sqrt(ss / N);
  return out;
}

PressureEstimate pressure_entire(const TractAtlas& atlas, double t, Complex w, int n_max,
                                 const EntireTreeOptions& opts) {
  return pressure_entire(EntireTree(atlas, w, n_max, opts), t, n_max);
}

EntirePressureCurve pressure_curve(const EntireTree& tree, std::span<const double> t_grid,
                                   int n_max) {
  if (t_grid.empty()) fail(ErrorKind::InvalidGrid, "empty t grid");
  EntirePressureCurve c;
  c.n_levels = n_max;
  c.tree_nodes = tree.node_count();
  c.branch_budget = (1 << (tree.blocks_per_tract() - 1)) - 1;
  for (double t : t_grid) {
    const PressureEstimate p = pressure_entire(tree, t, n_max);
    c.t_grid.push_back(t);
    c.pressure.push_back(p.value);
    c.residual.push_back(p.residual);
  }
  return c;
}

EntireBowenZero bisect_decreasing(const std::function<double(double)>& P, double lo,
                                  double hi, double width) {
  if (!(hi > lo) || !(width > 0.0)) fail(ErrorKind::InvalidArgument, "bad bisection bracket");
  const double plo = P(lo);
  const double phi = P(hi);
  if (phi == 0.0) return {hi, hi, hi};
  if (!(plo > 0.0 && phi < 0.0))
    fail(ErrorKind::NoSignChange, "pressure does not change sign on [" + std::to_string(lo) +
                                      ", " + std::to_string(hi) + "]");
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    const double pm = P(mid);
    if (pm == 0.0) return {mid, mid, mid};
    (pm > 0.0 ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), lo, hi};
}

EntireBowenZero bowen_zero_entire(const EntireTree& tree, double theta, int n_max) {
  auto P = [&](double t) {
    try {
      return pressure_entire(tree, t, n_max).value;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DivergenceDetected) throw;
      return std::numeric_limits<double>::infinity();
    }
  };
  return bisect_decreasing(P, theta + 0.05, 2.5, 0.02);
}

Complex default_transfer_point(const TractAtlas& atlas) {
  return Complex(atlas.radius * std::exp(1.0), 0.0);
}

DecayReport decay_check(const TractAtlas& atlas, double t, double p, double theta,
                        std::span<const double> s_grid, const TransferOptions& opts) {
  if (!(t > 0.0)) fail(ErrorKind::InvalidArgument, "decay check needs t > 0");
  if (!(p > 1.0)) fail(ErrorKind::InvalidArgument, "decay check needs p > 1");
  if (!(theta > 0.0) || !(1.0 / p < t / theta - 1.0))
    fail(ErrorKind::InvalidArgument, "decay check needs 1/p < t/theta - 1");
  if (s_grid.empty()) fail(ErrorKind::InvalidGrid, "empty s grid");
  DecayReport r;
  r.t = t;
  r.p = p;
  for (double s : s_grid) {
    const double v = transfer_apply_point(atlas, t, Complex(std::exp(s), 0.0), opts).value;
    r.s_grid.push_back(s);
    r.values.push_back(v);
    r.scaled.push_back(v * std::pow(s, 1.0 / p));
    r.running_sup.push_back(std::max(r.scaled.back(), r.running_sup.empty()
                                                          ? 0.0
                                                          : r.running_sup.back()));
    r.linearizer_scaled.push_back(v * std::pow(s, t - 1.0));
  }
  const auto [mn, mx] = std::minmax_element(r.linearizer_scaled.begin(), r.linearizer_scaled.end());
  r.band = *mx / *mn;
  const std::size_t n = r.running_sup.size();
  r.stable = n < 2 || r.running_sup[n - 1] <= 1.1 * r.running_sup[n - 2];
  return r;
}

}  // namespace tractdyn
