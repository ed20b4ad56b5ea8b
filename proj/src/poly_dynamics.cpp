#include "tractdyn/poly_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tractdyn/parallel.hpp"
#include "tractdyn/roots.hpp"

namespace tractdyn {
namespace {

double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

std::vector<Complex> preimages(const Polynomial& p, Complex w) {
  std::vector<Complex> c(p.coeffs().begin(), p.coeffs().end());
  c[0] -= w;
  RootOptions opts;
  opts.abs_tolerance = 1e-10 * (1.0 + std::abs(w));
  std::vector<Complex> roots = aberth_roots(c, opts);
  // A couple of Newton polishing passes; keep whichever residual is smaller.
  for (Complex& r : roots) {
    for (int it = 0; it < 2; ++it) {
      auto [v, dv] = p.eval_with_derivative(r);
      if (dv == Complex(0.0)) break;
      const Complex cand = r - (v - w) / dv;
      if (std::abs(p(cand) - w) < std::abs(v - w)) r = cand;
      else break;
    }
  }
  return roots;
}

std::vector<FixedPointRecord> find_repelling_fixed_points(const Polynomial& p) {
  std::vector<Complex> c(p.coeffs().begin(), p.coeffs().end());
  c[1] -= 1.0;
  RootOptions opts;
  opts.abs_tolerance = 1e-12 * (1.0 + p.max_normalized_coefficient()) * std::abs(p.leading());
  std::vector<Complex> roots = aberth_roots(c, opts);
  std::vector<FixedPointRecord> out;
  out.reserve(roots.size());
  for (Complex z : roots) {
    for (int it = 0; it < 2; ++it) {
      auto [v, dv] = p.eval_with_derivative(z);
      const Complex g = v - z;
      const Complex dg = dv - 1.0;
      if (dg == Complex(0.0)) break;
      const Complex cand = z - g / dg;
      if (std::abs(p(cand) - cand) < std::abs(g)) z = cand;
      else break;
    }
    const Complex lambda = p.derivative(z);
    out.push_back({z, lambda, std::abs(lambda) > 1.0});
  }
  return out;
}

PreimageTree::PreimageTree(const Polynomial& p, Complex w, int depth, const TreeOptions& opts)
    : w_(w) {
  if (depth < 1) fail(ErrorKind::InvalidArgument, "tree depth must be >= 1");
  const std::size_t d = static_cast<std::size_t>(p.degree());
  double count = std::pow(static_cast<double>(d), depth);
  if (count > static_cast<double>(opts.node_budget))
    fail(ErrorKind::BudgetExceeded, "d^n = " + std::to_string(count) + " exceeds node budget " +
                                        std::to_string(opts.node_budget));

  std::vector<PreimageNode> parents{{w, Complex(1.0), 0}};
  for (int n = 1; n <= depth; ++n) {
    std::vector<PreimageNode> children(parents.size() * d);
    parallel_for(parents.size(), [&](std::size_t i) {
      const PreimageNode& parent = parents[i];
      std::vector<Complex> roots = preimages(p, parent.point);
      for (std::size_t j = 0; j < d; ++j) {
        const Complex z = roots[j];
        children[i * d + j] = {z, parent.cumulative_derivative * p.derivative(z), n};
      }
    });
    std::vector<double> logs(children.size());
    for (std::size_t i = 0; i < children.size(); ++i) {
      const double a = std::abs(children[i].cumulative_derivative);
      if (!(a >= 1e-300))
        fail(ErrorKind::DegenerateDerivative,
             "|(p^n)'| below 1e-300 at depth " + std::to_string(n) + "; base point hits the critical tree");
      logs[i] = std::log(a);
    }
    levels_.push_back(children);
    log_abs_deriv_.push_back(std::move(logs));
    parents = std::move(children);
  }
}

double PreimageTree::log_sum(int n, double t) const {
  const std::vector<double>& logs = log_abs_deriv_.at(n - 1);
  std::vector<double> xs(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) xs[i] = -t * logs[i];
  return log_sum_exp(xs);
}

std::vector<PreimageNode> preimage_tree(const Polynomial& p, Complex w, int n,
                                        const TreeOptions& opts) {
  PreimageTree tree(p, w, n, opts);
  auto lvl = tree.level(n);
  return {lvl.begin(), lvl.end()};
}

TreePressure tree_pressure(const PreimageTree& tree, double t) {
  TreePressure out;
  out.depth = tree.depth();
  std::vector<double> logs(out.depth);
  for (int k = 1; k <= out.depth; ++k) {
    logs[k - 1] = tree.log_sum(k, t);
    out.per_depth_raw.push_back(logs[k - 1] / k);
  }
  for (int k = 2; k <= out.depth; ++k) out.richardson.push_back(logs[k - 1] - logs[k - 2]);
  out.raw = out.per_depth_raw.back();
  if (out.richardson.empty()) {
    out.value = out.raw;
  } else if (out.richardson.size() == 1) {
    out.value = out.richardson.back();
  } else {
    // two-step secant: cancels the period-two wobble seen when the basin
    // carries an attracting 2-cycle
    out.value = 0.5 * (logs[out.depth - 1] - logs[out.depth - 3]);
  }
  return out;
}

TreePressure tree_pressure(const Polynomial& p, double t, Complex w, int n, const TreeOptions& opts) {
  return tree_pressure(PreimageTree(p, w, n, opts), t);
}

PressureCurve tree_pressure_curve(const Polynomial& p, std::span<const double> t_grid, Complex w,
                                  int n, const TreeOptions& opts) {
  PreimageTree tree(p, w, n, opts);
  PressureCurve curve;
  curve.depth_used = n;
  for (double t : t_grid) {
    TreePressure tp = tree_pressure(tree, t);
    curve.t_grid.push_back(t);
    curve.values.push_back(tp.value);
    curve.per_depth_raw.push_back(std::move(tp.per_depth_raw));
  }
  return curve;
}

std::vector<double> poincare_series_partial(const Polynomial& p, double t, Complex xi, int n_max,
                                            const TreeOptions& opts) {
  PreimageTree tree(p, xi, n_max, opts);
  std::vector<double> sums;
  sums.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    double acc = 0.0;
    for (const PreimageNode& node : tree.level(n))
      acc += std::pow(std::abs(node.cumulative_derivative), -t);
    sums.push_back(acc);
  }
  return sums;
}

BowenZero bowen_zero_poly(const Polynomial& p, int depth, const BowenZeroOptions& opts) {
  const Complex w = opts.base_point.value_or(Complex(p.escape_radius(), 0.0));
  PreimageTree tree(p, w, depth, opts.tree);
  auto pressure = [&](double t) { return tree_pressure(tree, t).value; };
  double lo = opts.t_lo;
  double hi = opts.t_hi;
  double p_lo = pressure(lo);
  double p_hi = pressure(hi);
  if (!(p_lo > 0.0 && p_hi < 0.0))
    fail(ErrorKind::NoSignChange, "tree pressure " + std::to_string(p_lo) + " at t=" +
                                      std::to_string(lo) + ", " + std::to_string(p_hi) +
                                      " at t=" + std::to_string(hi));
  while (hi - lo > opts.width) {
    const double mid = 0.5 * (lo + hi);
    if (pressure(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  BowenZero out;
  out.value = 0.5 * (lo + hi);
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.bracket_width = hi - lo;
  out.depth = depth;
  out.base_point = w;
  return out;
}

}  // namespace tractdyn
