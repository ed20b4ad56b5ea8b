#include "tractdyn/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace tractdyn::quad {

std::vector<double> composite(const BatchIntegrand& f, double a, double b, int panels,
                              std::size_t components) {
  using GL = GaussLegendre8;
  const double h = (b - a) / panels;
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(panels) * GL::nodes.size());
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * h;
    for (double x : GL::nodes) xs.push_back(mid + 0.5 * h * x);
  }
  std::vector<std::vector<double>> vals;
  f(xs, vals);
  std::vector<double> sum(components, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double w = 0.5 * h * GL::weights[i % GL::nodes.size()];
    for (std::size_t c = 0; c < components; ++c) sum[c] += w * vals[i][c];
  }
  return sum;
}

namespace {

struct Adaptive {
  const std::function<std::vector<double>(double)>& f;
  std::size_t components;
  double abs_tol;
  double rel_tol;
  double total_length;
  int max_depth;
  int intervals = 0;
  double error = 0.0;

  std::vector<double> panel(double a, double b) const {
    using GL = GaussLegendre8;
    std::vector<double> sum(components, 0.0);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < GL::nodes.size(); ++i) {
      std::vector<double> v = f(mid + half * GL::nodes[i]);
      for (std::size_t c = 0; c < components; ++c) sum[c] += half * GL::weights[i] * v[c];
    }
    return sum;
  }

  std::vector<double> refine(double a, double b, const std::vector<double>& coarse, int depth) {
    const double m = 0.5 * (a + b);
    std::vector<double> left = panel(a, m);
    std::vector<double> right = panel(m, b);
    std::vector<double> fine(components);
    double worst = 0.0;
    bool ok = true;
    const double share = (b - a) / total_length;
    for (std::size_t c = 0; c < components; ++c) {
      fine[c] = left[c] + right[c];
      const double diff = std::abs(fine[c] - coarse[c]);
      worst = std::max(worst, diff);
      if (diff > share * std::max(abs_tol, rel_tol * std::abs(fine[c]))) ok = false;
    }
    if (ok || depth >= max_depth) {
      ++intervals;
      error += worst;
      return fine;
    }
    std::vector<double> l = refine(a, m, left, depth + 1);
    std::vector<double> r = refine(m, b, right, depth + 1);
    for (std::size_t c = 0; c < components; ++c) l[c] += r[c];
    return l;
  }
};

}  // namespace

AdaptiveResult adaptive(const std::function<std::vector<double>(double)>& f, double a, double b,
                        std::size_t components, double abs_tol, double rel_tol, int initial_panels,
                        int max_depth) {
  Adaptive ad{f, components, abs_tol, rel_tol, b - a, max_depth};
  AdaptiveResult res;
  res.value.assign(components, 0.0);
  const double h = (b - a) / initial_panels;
  for (int k = 0; k < initial_panels; ++k) {
    const double lo = a + k * h;
    const double hi = k + 1 == initial_panels ? b : lo + h;
    std::vector<double> coarse = ad.panel(lo, hi);
    std::vector<double> v = ad.refine(lo, hi, coarse, 0);
    for (std::size_t c = 0; c < components; ++c) res.value[c] += v[c];
  }
  res.error = ad.error;
  res.intervals = ad.intervals;
  return res;
}

}  // namespace tractdyn::quad
