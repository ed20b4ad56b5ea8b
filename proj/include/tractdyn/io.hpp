#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tractdyn/spectrum.hpp"
#include "tractdyn/transfer.hpp"

namespace tractdyn {

struct RunConfig {
  std::string function = "exp";  // JSON descriptor or shorthand
  double radius = 2.718281828459045;
  int T_jmin = 3;
  int T_jmax = 14;
  double t_min = 0.0;
  double t_max = 2.0;
  double t_step = 0.1;
  std::optional<std::vector<double>> t_list;  // overrides the range when present
  std::vector<double> plot_T = {1.0, 5.0, 20.0};
  int boundary_points = 400;
  int k_budget = (1 << 14) - 1;
  int branch_budget = 15;
  long long tree_nodes = 20000000;
  int n_max = 3;
  double quad_rel_tol = 1e-6;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency

  /// Throws InvalidArgument or InvalidGrid.
  void validate() const;
  std::vector<double> t_grid() const;
  SpectrumOptions spectrum_options() const;
  TransferOptions transfer_options() const;
  EntireTreeOptions tree_options() const;
};

/// Spectrum of a function with several tracts: beta_inf is the maximum of the
/// per-tract values.
class AtlasSpectrum {
 public:
  AtlasSpectrum(const TractAtlas& atlas, const SpectrumOptions& opts = {});

  const std::vector<SpectrumModel>& models() const noexcept { return models_; }
  double beta(double t) const;
  double b(double t) const { return beta(t) - t + 1.0; }
  /// Throws NoSignChange.
  double theta() const;
  /// drift and raw are those of the maximizing tract.
  SpectrumCurve curve(std::span<const double> t_grid) const;

 private:
  std::vector<SpectrumModel> models_;
};

nlohmann::json to_json(const RunConfig& c);
/// Unknown keys are rejected; missing keys keep their defaults.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// "%.6f"
std::string fixed6(double x);

/// Stroke-only SVG: the rescaled boundary polyline, the unit circle and a
/// cross at phi_T(1). y is flipped so the picture keeps the orientation of C.
std::string boundary_svg(const RescaledBoundary& b);
std::string boundary_csv(const RescaledBoundary& b);

std::string spectrum_csv(const SpectrumCurve& c);
nlohmann::json spectrum_json(const SpectrumCurve& c, const NegativeSpectrumReport& neg);

nlohmann::json transfer_json(const TransferSample& s);
nlohmann::json pressure_json(const EntirePressureCurve& c);

/// {"error": kind, "message": what}
nlohmann::json error_json(std::string_view kind, std::string_view message);

}  // namespace tractdyn
