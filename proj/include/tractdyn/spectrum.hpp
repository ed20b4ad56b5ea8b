#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tractdyn/tract.hpp"

namespace tractdyn {

struct SpectrumOptions {
  int j_min = 3;  // T_j = 2^j
  int j_max = 14;
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  int max_depth = 12;
  /// exponents the adaptive node sets are refined for
  std::vector<double> refine_t = {0.0, 0.5, 1.0, 1.5, 2.0};
  double theta_step = 0.1;
  double theta_width = 1e-3;
  double negative_tol = 0.02;
};

/// Quadrature table for J(T, r, t) = int_I |phi_T'(r + iy)|^t dy over
/// I = [-2, -1] u [1, 2]. Nodes come from adaptive 8-point Gauss-Legendre
/// refined for the exponents in SpectrumOptions::refine_t; log|phi_T'| is
/// stored per node so J can be formed for any t afterwards.
class MeansTable {
 public:
  MeansTable(const TractBranch& branch, double T, double r, const SpectrumOptions& opts = {});

  double T() const noexcept { return T_; }
  double r() const noexcept { return r_; }
  std::size_t size() const noexcept { return weights_.size(); }

  double log_J(double t) const;
  /// beta_{phi_T}(r, t) = log J / log(1/r)
  double beta(double t) const;

 private:
  double T_;
  double r_;
  std::vector<double> weights_;
  std::vector<double> log_deriv_;
};

/// beta_{phi_T}(r, t) by a dedicated adaptive quadrature.
double integral_means(const TractBranch& branch, double T, double r, double t,
                      const SpectrumOptions& opts = {});

/// Geometric grid 2^j_min .. 2^j_max.
std::vector<double> default_T_grid(const SpectrumOptions& opts = {});

/// The diagonal tables r = 1/T along the grid; computed in parallel.
std::vector<MeansTable> diagonal_tables(const TractBranch& branch, std::span<const double> T_grid,
                                        const SpectrumOptions& opts = {});

struct BetaInfinity {
  double value = 0.0;  // max of the secant slopes over the top half of the grid
  double drift = 0.0;  // spread (max - min) of those slopes
  std::vector<double> T_grid;
  std::vector<double> raw;     // beta_{phi_T}(1/T, t)
  std::vector<double> slopes;  // d log J / d log T between consecutive T (slopes[0] = NaN)
};

/// limsup_T beta_{phi_T}(1/T, t) estimated from the growth of log J along the
/// grid: log J(T) = beta log T + c + o(1), so consecutive secant slopes drop
/// the constant c that otherwise biases log J / log T by c / log T.
BetaInfinity beta_infinity(std::span<const MeansTable> tables, double t);
BetaInfinity beta_infinity(const TractBranch& branch, double t, std::span<const double> T_grid,
                           const SpectrumOptions& opts = {});

struct SpectrumCurve {
  std::vector<double> t_grid;
  std::vector<double> beta_inf;
  std::vector<double> b_inf;   // beta_inf - t + 1
  std::vector<double> drift;
  std::vector<double> T_grid;
  std::vector<std::vector<double>> raw;  // [t index][T index]
  double theta_hat = 0.0;
  bool theta_found = false;
};

/// Smallest root of b on (0, hi]: left-to-right scan with the given step,
/// then bisection to the width. Throws NoSignChange.
double smallest_root(const std::function<double(double)>& b, double step, double width,
                     double hi = 2.0);

class SpectrumModel {
 public:
  SpectrumModel(const TractBranch& branch, const SpectrumOptions& opts = {});

  const std::vector<double>& T_grid() const noexcept { return T_grid_; }
  const std::vector<MeansTable>& tables() const noexcept { return tables_; }
  const SpectrumOptions& options() const noexcept { return opts_; }

  BetaInfinity beta_infinity(double t) const;
  double b_infinity(double t) const;
  /// Theta_f; throws NoSignChange.
  double theta() const;
  /// Curve on t_grid; theta_hat filled when a sign change exists.
  SpectrumCurve curve(std::span<const double> t_grid) const;

 private:
  std::vector<double> T_grid_;
  std::vector<MeansTable> tables_;
  SpectrumOptions opts_;
};

struct NegativeSpectrumReport {
  bool negative = false;
  std::vector<double> violations;  // grid t with b >= tolerance
};

/// b(t) < tol for all grid t > theta_hat + 0.05.
NegativeSpectrumReport negative_spectrum_check(const SpectrumCurve& curve, double tol = 0.02);

struct CompositeReport {
  double theta_inner = 0.0;
  double theta_composite = 0.0;
  std::vector<double> t_grid;
  std::vector<double> beta_inner;
  std::vector<double> beta_composite;
  bool theta_ok = false;
  bool beta_ok = false;
  bool passed() const noexcept { return theta_ok && beta_ok; }
};

/// Checks Theta_F <= Theta_f + 0.05 and beta_F(t) <= beta_f(t) + 0.05.
CompositeReport composite_spectrum_compare(const SpectrumModel& inner,
                                           const SpectrumModel& composite,
                                           std::span<const double> t_grid);

}  // namespace tractdyn
