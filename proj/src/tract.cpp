#include "tractdyn/tract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "tractdyn/parallel.hpp"
#include "tractdyn/sequences.hpp"

namespace tractdyn {
namespace {

struct AnchorKey {
  int a;
  long long b;
  bool operator==(const AnchorKey&) const = default;
};

struct AnchorHash {
  std::size_t operator()(const AnchorKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.b) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(k.a + 4096) + 0x7f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

Complex anchor_xi(AnchorKey k) {
  return {std::ldexp(1.0, k.a), static_cast<double>(k.b) * std::ldexp(1.0, k.a - 1)};
}

}  // namespace

struct TractBranch::State {
  explicit State(EntireFunction fn) : f(std::move(fn)) {}

  EntireFunction f;
  Complex base_point;
  Complex base_log;
  double log_scale = 0.0;
  int index = 0;
  int base_level = 0;
  TractOptions opts;

  mutable std::shared_mutex mutex;
  mutable std::unordered_map<AnchorKey, Complex, AnchorHash> anchors;

  double tolerance(Complex xi) const {
    return std::max(opts.newton_tol, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(xi));
  }

  Complex residual(Complex z, Complex xi) const {
    return wrap_log(f.log_value(z) - log_scale - xi);
  }

  // Newton on log f(z) = xi + log_scale; returns false on failure or when the
  // starting residual exceeds first_limit.
  bool newton(Complex& z, Complex xi, Complex& dlog,
              double first_limit = std::numeric_limits<double>::infinity()) const {
    const double tol = tolerance(xi);
    double prev = std::numeric_limits<double>::infinity();
    try {
      for (int it = 0; it <= opts.max_newton; ++it) {
        const auto lp = f.log_pair(z);
        const Complex r = wrap_log(lp.log_value - log_scale - xi);
        dlog = lp.dlog;
        if (!is_finite(r) || !is_finite(dlog) || std::abs(dlog) < 1e-300) return false;
        if (it == 0 && std::abs(r) > first_limit) return false;
        if (std::abs(r) <= tol) return true;
        // Roundoff in f at large |z| can put a floor above tol; stop once
        // Newton no longer makes progress below it.
        if (std::abs(r) <= 1e-7 && std::abs(r) >= 0.5 * prev) return true;
        if (it == opts.max_newton) return false;
        prev = std::abs(r);
        z -= r / dlog;
        if (!is_finite(z)) return false;
      }
      return false;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Overflow || e.kind() == ErrorKind::ZeroDenominator) return false;
      throw;
    }
  }

  // Continues phi along the segment xi0 -> xi1 starting from z0 = phi(xi0).
  PhiValue follow(Complex xi0, Complex z0, Complex xi1) const {
    Complex dlog;
    Complex z = z0;
    if (!newton(z, xi0, dlog))
      fail(ErrorKind::ContinuationStall, "continuation start point does not solve log f = xi");
    const double total = std::abs(xi1 - xi0);
    if (total == 0.0) return {z, 1.0 / dlog};
    const Complex dir = (xi1 - xi0) / total;
    double s = 0.0;
    double h = total;
    while (s < total) {
      const Complex xa = xi0 + s * dir;
      const double remaining = total - s;
      // Koebe: |phi''/phi'| <= 4 / Re xi, so this cap keeps the predictor's
      // log-residual below 1/2, well inside the +-pi window where the
      // residual mod 2 pi i identifies the sheet.
      const double x = std::min(xa.real(), (xi0 + std::min(total, s + h) * dir).real());
      h = std::min({h, 0.25 * x, 0.5 * std::sqrt(x)});
      const bool last = h >= remaining * (1.0 - 1e-9);
      if (last) h = remaining;
      if (!last && h < opts.min_step)
        fail(ErrorKind::ContinuationStall,
             "continuation step underflow near xi = " + std::to_string(xa.real()) + " + " +
                 std::to_string(xa.imag()) + "i");
      const double s_next = last ? total : s + h;
      const Complex xb = last ? xi1 : xi0 + s_next * dir;
      const Complex dz = 1.0 / dlog;
      const Complex pred = z + dz * (xb - xa);
      Complex w = pred;
      Complex dl;
      bool ok = false;
      try {
        ok = newton(w, xb, dl, 1.0);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Overflow && e.kind() != ErrorKind::ZeroDenominator) throw;
      }
      if (!ok || std::abs(w - pred) > 0.5 * std::abs(pred - z) + 1e-13 * (1.0 + std::abs(z))) {
        h *= 0.5;
        continue;
      }
      z = w;
      dlog = dl;
      s = s_next;
      h *= 2.0;
    }
    return {z, 1.0 / dlog};
  }

  std::optional<Complex> lookup(AnchorKey k) const {
    std::shared_lock lock(mutex);
    auto it = anchors.find(k);
    if (it == anchors.end()) return std::nullopt;
    return it->second;
  }

  Complex anchor(AnchorKey k) const {
    if (auto hit = lookup(k)) return *hit;
    Complex z;
    if (k.b == 0 && k.a == base_level) {
      z = follow(base_log, base_point, anchor_xi(k)).z;
    } else {
      AnchorKey parent;
      if (k.b != 0)
        parent = {k.a + 1, k.b / 2};
      else
        parent = {k.a > base_level ? k.a - 1 : k.a + 1, 0};
      z = follow(anchor_xi(parent), anchor(parent), anchor_xi(k)).z;
    }
    std::unique_lock lock(mutex);
    return anchors.try_emplace(k, z).first->second;
  }

  PhiValue eval(Complex xi) const {
    if (!(xi.real() >= opts.min_offset) || !std::isfinite(xi.imag()))
      fail(ErrorKind::InvalidArgument,
           "phi needs Re xi >= " + std::to_string(opts.min_offset));
    const int a = static_cast<int>(std::floor(std::log2(xi.real())));
    const double unit = std::ldexp(1.0, a - 1);
    const double bq = std::round(xi.imag() / unit);
    if (std::abs(bq) > 9e15) fail(ErrorKind::InvalidArgument, "Im xi too large for the anchor lattice");
    const AnchorKey k{a, static_cast<long long>(bq)};
    return follow(anchor_xi(k), anchor(k), xi);
  }
};

TractBranch::TractBranch(EntireFunction f, Complex base_point, int index, const TractOptions& opts)
    : state_(std::make_shared<State>(std::move(f))) {
  State& s = *state_;
  s.base_point = base_point;
  s.index = index;
  s.opts = opts;
  s.log_scale = std::log(std::max(1.0, s.f.singular_radius()));
  s.base_log = wrap_log(s.f.log_value(base_point)) - s.log_scale;
  if (!(s.base_log.real() > opts.min_offset))
    fail(ErrorKind::NoTractFound, "base point is not inside the tract");
  s.base_level = static_cast<int>(std::lround(std::log2(s.base_log.real())));
}

const EntireFunction& TractBranch::function() const noexcept { return state_->f; }
Complex TractBranch::base_point() const noexcept { return state_->base_point; }
Complex TractBranch::base_log() const noexcept { return state_->base_log; }
double TractBranch::log_scale() const noexcept { return state_->log_scale; }
int TractBranch::index() const noexcept { return state_->index; }
const TractOptions& TractBranch::options() const noexcept { return state_->opts; }

TractBranch::PhiValue TractBranch::phi_with_derivative(Complex xi) const {
  const PhiValue v = state_->eval(xi);
  if (!is_finite(v.dz)) fail(ErrorKind::ZeroDenominator, "f' vanishes at phi(xi)");
  return v;
}

double TractBranch::log_residual(Complex z, Complex xi) const {
  return std::abs(state_->residual(z, xi));
}

std::size_t TractBranch::cache_size() const {
  std::shared_lock lock(state_->mutex);
  return state_->anchors.size();
}

void TractBranch::clear_cache() const {
  std::unique_lock lock(state_->mutex);
  state_->anchors.clear();
}

bool segment_in_superlevel(const EntireFunction& f, Complex a, Complex b, double R, int samples) {
  const double log_r = std::log(R);
  for (int i = 0; i <= samples; ++i) {
    const Complex z = a + (b - a) * (static_cast<double>(i) / samples);
    if (!(f.log_value(z).real() > log_r)) return false;
  }
  return true;
}

namespace {

std::vector<Complex> sampled_bases(const EntireFunction& f, double R, const TractOptions& opts) {
  const int n = opts.circle_samples;
  const double level = std::log(R);
  std::vector<double> s(n);
  for (int m = 0; m <= 60; ++m) {
    const double rho = std::ldexp(1.0, m);
    parallel_for(n, [&](std::size_t i) {
      const Complex z = std::polar(rho, kTwoPi * static_cast<double>(i) / n);
      double v;
      try {
        v = f.log_value(z).real();
      } catch (const Error&) {
        v = -std::numeric_limits<double>::infinity();
      }
      s[i] = v;
    });
    // start the circular scan at a sample below the level
    int start = -1;
    for (int i = 0; i < n; ++i)
      if (!(s[i] > level)) {
        start = i;
        break;
      }
    if (start < 0) continue;  // whole circle inside {|f| > R}: keep growing
    std::vector<Complex> bases;
    int best = -1;
    for (int k = 1; k <= n; ++k) {
      const int i = (start + k) % n;
      if (s[i] > level) {
        if (best < 0 || s[i] > s[best]) best = i;
      } else if (best >= 0) {
        if (s[best] > level + 1.0) bases.push_back(std::polar(rho, kTwoPi * best / n));
        best = -1;
      }
    }
    if (!bases.empty()) return bases;
  }
  return {};
}

}  // namespace

TractAtlas find_tracts(const EntireFunction& f, double R, const TractOptions& opts) {
  if (!(R >= std::max(1.0, f.singular_radius())))
    fail(ErrorKind::InvalidArgument, "tract radius must be at least max(1, singular radius)");
  TractAtlas atlas{f, R, {}};
  std::vector<Complex> bases;
  switch (f.family()) {
    case Family::ExpPower: {
      const int d = f.power();
      const double rho = std::pow(std::log(R * std::exp(1.0) / std::abs(f.lambda())) + 1.0, 1.0 / d);
      for (int j = 0; j < d; ++j) bases.push_back(std::polar(rho, kTwoPi * j / d));
      break;
    }
    case Family::CompositeExp: {
      const TractAtlas inner = find_tracts(f.inner(), R, opts);
      for (const auto& br : inner.tracts) {
        if (br.base_point().real() < 3.0)
          fail(ErrorKind::InvalidArgument, "composite model needs inner tracts in {Re z >= 3}");
        for (int k : f.offsets())
          bases.push_back(std::log(br.base_point()) + Complex(0.0, kTwoPi * k));
      }
      break;
    }
    case Family::Koenigs:
      bases = sampled_bases(f, R, opts);
      break;
  }
  // merge bases joined by a segment inside {|f| > R}
  std::vector<Complex> distinct;
  for (Complex b : bases) {
    bool joined = false;
    for (Complex c : distinct)
      if (segment_in_superlevel(f, b, c, R)) joined = true;
    if (!joined) distinct.push_back(b);
  }
  if (distinct.empty()) fail(ErrorKind::NoTractFound, "no point with |f| > R e found");
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    if (!(f.log_value(distinct[i]).real() > std::log(R) + 1.0))
      fail(ErrorKind::NoTractFound, "tract base point does not satisfy |f| > R e");
    atlas.tracts.emplace_back(f, distinct[i], static_cast<int>(i), opts);
  }
  return atlas;
}

Complex rescaled_map(const TractBranch& branch, double T, Complex xi) {
  if (!(T >= 1.0)) fail(ErrorKind::InvalidGrid, "rescaling needs T >= 1");
  return branch.phi(T * xi) / std::abs(branch.phi(T));
}

RescaledBoundary trace_boundary(const TractBranch& branch, double T, int n_points) {
  if (!(T >= 1.0)) fail(ErrorKind::InvalidGrid, "trace_boundary needs T >= 1");
  if (n_points < 64) fail(ErrorKind::InvalidArgument, "trace_boundary needs at least 64 points");
  RescaledBoundary out;
  out.T = T;
  const double eps = std::max(branch.options().min_offset, branch.options().min_offset / T);
  out.offset = eps;
  out.scale = std::abs(branch.phi(T));
  const Complex corners[4] = {{eps, -4.0}, {4.0, -4.0}, {4.0, 4.0}, {eps, 4.0}};
  double lengths[4];
  double perimeter = 0.0;
  for (int e = 0; e < 4; ++e) {
    lengths[e] = std::abs(corners[(e + 1) % 4] - corners[e]);
    perimeter += lengths[e];
  }
  std::vector<Complex> params(n_points);
  for (int i = 0; i < n_points; ++i) {
    double s = perimeter * i / n_points;
    int e = 0;
    while (e < 3 && s > lengths[e]) s -= lengths[e++];
    params[i] = corners[e] + (corners[(e + 1) % 4] - corners[e]) * (s / lengths[e]);
  }
  out.polyline.resize(n_points);
  parallel_for(n_points, [&](std::size_t i) {
    out.polyline[i] = branch.phi(T * params[i]) / out.scale;
  });
  out.polyline.push_back(out.polyline.front());
  out.marker = branch.phi(T) / out.scale;
  return out;
}

double check_condition_42(const TractBranch& branch, double T, int samples, std::uint64_t seed) {
  if (!(T >= 1.0)) fail(ErrorKind::InvalidGrid, "condition (4.2) needs T >= 1");
  if (samples < 100) fail(ErrorKind::InvalidArgument, "condition (4.2) needs at least 100 samples");
  const double eps = branch.options().min_offset;
  const double inner = T / 2.0;  // Q_{T/8} = (0, T/2) x (-T/2, T/2)
  std::vector<Complex> pts = {{4.0 * T, 4.0 * T}, {4.0 * T, -4.0 * T}, {eps, 4.0 * T},
                              {eps, -4.0 * T},    {inner, 0.0},       {inner, inner},
                              {inner, -inner},    {eps, inner},       {eps, -inner}};
  Halton2 seq(seed);
  while (static_cast<int>(pts.size()) < samples + 9) {
    auto [u, v] = seq.next();
    const Complex xi(eps + u * (4.0 * T - eps), (2.0 * v - 1.0) * 4.0 * T);
    if (xi.real() < inner && std::abs(xi.imag()) < inner) continue;
    pts.push_back(xi);
  }
  std::vector<double> mod(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { mod[i] = std::abs(branch.phi(pts[i])); });
  const auto [lo, hi] = std::minmax_element(mod.begin(), mod.end());
  if (!(*lo > 0.0)) fail(ErrorKind::ZeroDenominator, "phi vanishes on Q_T \\ Q_{T/8}");
  return *hi / *lo;
}

HolderEstimate fit_holder(std::span<const HolderPair> pairs) {
  constexpr int kBins = 10;
  HolderEstimate est;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::vector<std::pair<double, double>> logs;
  for (const auto& p : pairs) {
    if (!(p.distance > 0.0) || !(p.difference > 0.0) || !std::isfinite(p.difference)) {
      ++est.pairs_rejected;
      continue;
    }
    logs.emplace_back(std::log(p.distance), std::log(p.difference));
    lo = std::min(lo, logs.back().first);
    hi = std::max(hi, logs.back().first);
  }
  est.pairs_used = static_cast<int>(logs.size());
  if (logs.size() < 2 || !(hi > lo)) fail(ErrorKind::InvalidArgument, "not enough distinct pairs");
  std::vector<double> env(kBins, -std::numeric_limits<double>::infinity());
  std::vector<double> centre(kBins);  // log distance of the bin's maximiser
  const double width = (hi - lo) / kBins;
  for (auto [x, y] : logs) {
    const int b = std::min(kBins - 1, static_cast<int>((x - lo) / width));
    if (y > env[b]) {
      env[b] = y;
      centre[b] = x;
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int b = 0; b < kBins; ++b) {
    if (!std::isfinite(env[b])) continue;
    sx += centre[b];
    sy += env[b];
    sxx += centre[b] * centre[b];
    sxy += centre[b] * env[b];
    ++n;
  }
  if (n < 2) fail(ErrorKind::InvalidArgument, "not enough occupied distance bins");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  est.alpha = slope;
  est.H = std::exp((sy - slope * sx) / n);
  return est;
}

HolderEstimate estimate_holder(const TractBranch& branch, double T, int pairs, std::uint64_t seed) {
  if (!(T >= 1.0)) fail(ErrorKind::InvalidGrid, "Hölder estimate needs T >= 1");
  if (pairs < 1000) fail(ErrorKind::InvalidArgument, "Hölder estimate needs at least 1000 pairs");
  constexpr int kScales = 10;
  const double eps = branch.options().min_offset;
  const double norm = T * std::abs(branch.phi_derivative(T));
  auto inside = [&](Complex z) {
    return z.real() >= eps && z.real() <= 4.0 && std::abs(z.imag()) <= 4.0;
  };
  // Every distance scale reuses the same base points, so the envelope at
  // each scale sees the same worst spots. Re z1 is log-uniform to resolve
  // the region next to the boundary.
  const int per_scale = (pairs + kScales - 1) / kScales;
  Halton2 seq(seed);
  std::vector<Complex> base(per_scale);
  std::vector<double> angle(per_scale);
  for (int i = 0; i < per_scale; ++i) {
    auto [u, v] = seq.next();
    base[i] = Complex(eps * std::pow(4.0 / eps, u), (2.0 * v - 1.0) * 4.0);
    angle[i] = kTwoPi * radical_inverse(static_cast<std::uint64_t>(i) + 1, 5);
  }
  std::vector<std::pair<Complex, Complex>> pts;
  for (int k = 0; k < kScales; ++k) {
    const double dist = std::pow(10.0, -3.0 + 3.0 * k / (kScales - 1));
    for (int i = 0; i < per_scale; ++i) {
      Complex z2 = base[i] + std::polar(dist, angle[i]);
      if (!inside(z2)) z2 = base[i] - std::polar(dist, angle[i]);
      if (inside(z2)) pts.emplace_back(base[i], z2);
    }
  }
  std::vector<Complex> g1(pts.size()), g2(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    g1[i] = branch.phi(T * pts[i].first) / norm;
    g2[i] = branch.phi(T * pts[i].second) / norm;
  });
  std::vector<HolderPair> hp(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    hp[i] = {std::abs(pts[i].first - pts[i].second), std::abs(g1[i] - g2[i])};
  return fit_holder(hp);
}

}  // namespace tractdyn
