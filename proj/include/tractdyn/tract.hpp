#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "tractdyn/entire.hpp"

namespace tractdyn {

struct TractOptions {
  double min_offset = 0.05;    // smallest admissible Re xi
  double newton_tol = 1e-11;   // on |log f(z) - xi| (mod 2 pi i)
  int max_newton = 50;
  double min_step = 1e-12;
  int circle_samples = 2048;   // generic tract search
};

/// One logarithmic tract with its inverse map phi: H -> Omega, f o phi = exp
/// (for singular radius rho > 1 the normalization is f o phi = rho exp).
///
/// phi is evaluated by predictor-corrector continuation from lattice anchors
/// xi = 2^a + i b 2^(a-1). Anchors on the real axis are chained from the base
/// point; an off-axis anchor (a, b) is continued from (a + 1, b / 2). Only
/// anchors are cached, so every value depends on its inputs alone and not on
/// the order or thread in which queries arrive. Copies share the cache.
class TractBranch {
 public:
  TractBranch(EntireFunction f, Complex base_point, int index, const TractOptions& opts = {});

  const EntireFunction& function() const noexcept;
  Complex base_point() const noexcept;
  /// Branch of log f at the base point (principal, minus the normalization).
  Complex base_log() const noexcept;
  /// log max(1, singular radius): f(phi(xi)) = exp(log_scale + xi).
  double log_scale() const noexcept;
  int index() const noexcept;
  const TractOptions& options() const noexcept;

  struct PhiValue {
    Complex z;
    Complex dz;  // phi'(xi)
  };
  PhiValue phi_with_derivative(Complex xi) const;
  Complex phi(Complex xi) const { return phi_with_derivative(xi).z; }
  Complex phi_derivative(Complex xi) const { return phi_with_derivative(xi).dz; }

  /// Residual |log f(z) - log_scale - xi| reduced mod 2 pi i.
  double log_residual(Complex z, Complex xi) const;

  std::size_t cache_size() const;
  void clear_cache() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

struct TractAtlas {
  EntireFunction function;
  double radius = 1.0;
  std::vector<TractBranch> tracts;
};

/// Locates the tracts of f over {|w| > R}. ExpPower uses the closed-form
/// sectors; CompositeExp takes logarithms of the inner tracts (plus the
/// configured 2 pi i offsets); other handles are found by sampling log|f| on
/// circles of doubling radius. Throws NoTractFound.
TractAtlas find_tracts(const EntireFunction& f, double R, const TractOptions& opts = {});

/// True if the straight segment from a to b stays inside {|f| > R}.
bool segment_in_superlevel(const EntireFunction& f, Complex a, Complex b, double R,
                           int samples = 256);

/// phi_T(xi) = phi(T xi) / |phi(T)|.
Complex rescaled_map(const TractBranch& branch, double T, Complex xi);

struct RescaledBoundary {
  double T = 1.0;
  double scale = 1.0;               // |phi(T)|
  std::vector<Complex> polyline;    // closed: first == last
  Complex marker;                   // phi_T(1)
  double offset = 0.05;             // left edge of the parameter rectangle
};

/// phi_T along the boundary of [eps, 4] x [-4, 4] (counter-clockwise from
/// eps - 4i), n_points uniformly spaced by arclength, plus the closing point.
RescaledBoundary trace_boundary(const TractBranch& branch, double T, int n_points);

/// max |phi| / min |phi| over Q_T \ Q_{T/8} (Q_T = (0, 4T) x (-4T, 4T)),
/// sampled by a Halton sequence together with the corners and the inner edge.
double check_condition_42(const TractBranch& branch, double T, int samples,
                          std::uint64_t seed = 0);

struct HolderPair {
  double distance;    // |z1 - z2|
  double difference;  // |g(z1) - g(z2)|
};

struct HolderEstimate {
  double alpha = 0.0;
  double H = 0.0;
  int pairs_used = 0;
  int pairs_rejected = 0;
};

/// Upper-envelope fit: pairs are binned by log distance (10 bins); the largest
/// log difference per bin is regressed on that pair's log distance. alpha is the
/// slope and H = exp(intercept). Pairs with zero distance or difference are
/// rejected.
HolderEstimate fit_holder(std::span<const HolderPair> pairs);

/// Hölder diagnostic for g(eta) = phi(T eta) / (T |phi'(T)|) on Q_1 (Re eta at
/// least the minimum offset): Halton base points, ten log-spaced pair
/// distances in [1e-3, 1], the same base points at every distance.
HolderEstimate estimate_holder(const TractBranch& branch, double T, int pairs,
                               std::uint64_t seed = 0);

}  // namespace tractdyn
