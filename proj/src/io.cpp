#include "tractdyn/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tractdyn {

using nlohmann::json;

namespace {

bool sorted_strict(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (function.empty()) fail(ErrorKind::InvalidArgument, "empty function descriptor");
  if (!(radius >= 1.0) || !std::isfinite(radius))
    fail(ErrorKind::InvalidArgument, "radius must be at least 1");
  if (T_jmin < 0 || T_jmax < T_jmin || T_jmax > 40)
    fail(ErrorKind::InvalidGrid, "T grid needs 0 <= Tjmin <= Tjmax <= 40");
  const auto ts = t_grid();
  if (ts.empty()) fail(ErrorKind::InvalidGrid, "empty t grid");
  if (!sorted_strict(ts)) fail(ErrorKind::InvalidGrid, "t grid must increase");
  for (double t : ts)
    if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorKind::InvalidGrid, "t values must be >= 0");
  if (plot_T.empty()) fail(ErrorKind::InvalidGrid, "empty plot T list");
  for (double T : plot_T)
    if (!(T > 0.0) || !std::isfinite(T)) fail(ErrorKind::InvalidGrid, "plot T must be positive");
  if (boundary_points < 4) fail(ErrorKind::InvalidArgument, "boundary_points must be >= 4");
  if (k_budget < 1 || branch_budget < 1 || tree_nodes < 1 || n_max < 1)
    fail(ErrorKind::InvalidArgument, "budgets must be positive");
  if (branch_budget > 512) fail(ErrorKind::InvalidArgument, "branch budget is capped at 512");
  if (n_max > 4) fail(ErrorKind::InvalidArgument, "n_max is capped at 4");
  if (!(quad_rel_tol > 0.0)) fail(ErrorKind::InvalidArgument, "quadrature tolerance must be positive");
}

std::vector<double> RunConfig::t_grid() const {
  if (t_list) return *t_list;
  std::vector<double> out;
  if (!(t_step > 0.0) || !(t_max >= t_min)) return out;
  const long long n = std::llround(std::floor((t_max - t_min) / t_step + 1e-9));
  for (long long i = 0; i <= n; ++i) out.push_back(t_min + static_cast<double>(i) * t_step);
  return out;
}

SpectrumOptions RunConfig::spectrum_options() const {
  SpectrumOptions o;
  o.j_min = T_jmin;
  o.j_max = T_jmax;
  o.rel_tol = quad_rel_tol;
  return o;
}

TransferOptions RunConfig::transfer_options() const {
  TransferOptions o;
  o.k_budget = k_budget;
  return o;
}

EntireTreeOptions RunConfig::tree_options() const {
  EntireTreeOptions o;
  o.branch_budget = branch_budget;
  o.max_nodes = tree_nodes;
  return o;
}

AtlasSpectrum::AtlasSpectrum(const TractAtlas& atlas, const SpectrumOptions& opts) {
  for (const auto& b : atlas.tracts) models_.emplace_back(b, opts);
}

double AtlasSpectrum::beta(double t) const {
  double m = -INFINITY;
  for (const auto& M : models_) m = std::max(m, M.beta_infinity(t).value);
  return m;
}

double AtlasSpectrum::theta() const {
  const auto& o = models_.front().options();
  return smallest_root([this](double t) { return b(t); }, o.theta_step, o.theta_width);
}

SpectrumCurve AtlasSpectrum::curve(std::span<const double> t_grid) const {
  SpectrumCurve c;
  c.T_grid = models_.front().T_grid();
  for (double t : t_grid) {
    BetaInfinity best;
    best.value = -INFINITY;
    for (const auto& M : models_) {
      BetaInfinity bi = M.beta_infinity(t);
      if (bi.value > best.value) best = std::move(bi);
    }
    c.t_grid.push_back(t);
    c.beta_inf.push_back(best.value);
    c.b_inf.push_back(best.value - t + 1.0);
    c.drift.push_back(best.drift);
    c.raw.push_back(best.raw);
  }
  try {
    c.theta_hat = theta();
    c.theta_found = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoSignChange) throw;
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["function"] = c.function;
  j["radius"] = c.radius;
  j["T_jmin"] = c.T_jmin;
  j["T_jmax"] = c.T_jmax;
  j["t_min"] = c.t_min;
  j["t_max"] = c.t_max;
  j["t_step"] = c.t_step;
  if (c.t_list) j["t_grid"] = *c.t_list;
  j["plot_T"] = c.plot_T;
  j["boundary_points"] = c.boundary_points;
  j["k_budget"] = c.k_budget;
  j["branch_budget"] = c.branch_budget;
  j["tree_nodes"] = c.tree_nodes;
  j["n_max"] = c.n_max;
  j["quad_rel_tol"] = c.quad_rel_tol;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidArgument, "config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "function") c.function = v.is_string() ? v.get<std::string>() : v.dump();
      else if (key == "radius") c.radius = v.get<double>();
      else if (key == "T_jmin") c.T_jmin = v.get<int>();
      else if (key == "T_jmax") c.T_jmax = v.get<int>();
      else if (key == "t_min") c.t_min = v.get<double>();
      else if (key == "t_max") c.t_max = v.get<double>();
      else if (key == "t_step") c.t_step = v.get<double>();
      else if (key == "t_grid") c.t_list = v.get<std::vector<double>>();
      else if (key == "plot_T") c.plot_T = v.get<std::vector<double>>();
      else if (key == "boundary_points") c.boundary_points = v.get<int>();
      else if (key == "k_budget") c.k_budget = v.get<int>();
      else if (key == "branch_budget") c.branch_budget = v.get<int>();
      else if (key == "tree_nodes") c.tree_nodes = v.get<long long>();
      else if (key == "n_max") c.n_max = v.get<int>();
      else if (key == "quad_rel_tol") c.quad_rel_tol = v.get<double>();
      else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else fail(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("config: ") + e.what());
  }
  return run_config_from_json(j);
}

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  // avoid "-0.000000"
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::string boundary_svg(const RescaledBoundary& b) {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  for (Complex z : b.polyline) {
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, -z.imag());
    ymax = std::max(ymax, -z.imag());
  }
  const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin);
  xmin -= pad;
  ymin -= pad;
  const double w = xmax - xmin + pad;
  const double h = ymax - ymin + pad;
  const double stroke = 0.002 * std::max(w, h);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fixed6(xmin) << ' '
     << fixed6(ymin) << ' ' << fixed6(w) << ' ' << fixed6(h) << "\">\n";
  os << "<path fill=\"none\" stroke=\"black\" stroke-width=\"" << fixed6(stroke) << "\" d=\"";
  for (std::size_t i = 0; i < b.polyline.size(); ++i) {
    os << (i == 0 ? "M" : " L") << fixed6(b.polyline[i].real()) << ' '
       << fixed6(-b.polyline[i].imag());
  }
  os << "\"/>\n";
  os << "<path fill=\"none\" stroke=\"gray\" stroke-width=\"" << fixed6(stroke)
     << "\" d=\"M1.000000 0.000000 A1.000000 1.000000 0 1 0 -1.000000 0.000000 "
        "A1.000000 1.000000 0 1 0 1.000000 0.000000\"/>\n";
  const double m = 4.0 * stroke;
  const double mx = b.marker.real();
  const double my = -b.marker.imag();
  os << "<path fill=\"none\" stroke=\"red\" stroke-width=\"" << fixed6(stroke) << "\" d=\"M"
     << fixed6(mx - m) << ' ' << fixed6(my - m) << " L" << fixed6(mx + m) << ' ' << fixed6(my + m)
     << " M" << fixed6(mx - m) << ' ' << fixed6(my + m) << " L" << fixed6(mx + m) << ' '
     << fixed6(my - m) << "\"/>\n";
  os << "</svg>\n";
  return os.str();
}

std::string boundary_csv(const RescaledBoundary& b) {
  std::ostringstream os;
  os << "index,re,im\n";
  for (std::size_t i = 0; i < b.polyline.size(); ++i)
    os << i << ',' << g17(b.polyline[i].real()) << ',' << g17(b.polyline[i].imag()) << '\n';
  return os.str();
}

std::string spectrum_csv(const SpectrumCurve& c) {
  std::ostringstream os;
  os << "t,beta_inf,b_inf\n";
  for (std::size_t i = 0; i < c.t_grid.size(); ++i)
    os << g17(c.t_grid[i]) << ',' << g17(c.beta_inf[i]) << ',' << g17(c.b_inf[i]) << '\n';
  return os.str();
}

json spectrum_json(const SpectrumCurve& c, const NegativeSpectrumReport& neg) {
  json j;
  j["t_grid"] = c.t_grid;
  j["T_grid"] = c.T_grid;
  j["beta_inf"] = c.beta_inf;
  j["b_inf"] = c.b_inf;
  j["drift"] = c.drift;
  j["raw"] = c.raw;
  json s;
  s["theta_found"] = c.theta_found;
  if (c.theta_found) s["theta_hat"] = c.theta_hat;
  s["negative_spectrum"] = neg.negative;
  s["violations"] = neg.violations;
  s["max_drift"] = c.drift.empty() ? 0.0 : *std::max_element(c.drift.begin(), c.drift.end());
  j["summary"] = s;
  return j;
}

json transfer_json(const TransferSample& s) {
  json j;
  j["w"] = {s.w.real(), s.w.imag()};
  j["t"] = s.t;
  j["value"] = s.value;
  j["partial_sum"] = s.partial_sum;
  j["tail_estimate"] = s.tail_estimate;
  j["terms_used"] = s.terms_used;
  j["blocks"] = s.blocks;
  return j;
}

json pressure_json(const EntirePressureCurve& c) {
  json j;
  j["t_grid"] = c.t_grid;
  j["pressure"] = c.pressure;
  j["residual"] = c.residual;
  j["n_levels"] = c.n_levels;
  j["branch_budget"] = c.branch_budget;
  j["tree_nodes"] = c.tree_nodes;
  return j;
}

json error_json(std::string_view kind, std::string_view message) {
  json j;
  j["error"] = std::string(kind);
  j["message"] = std::string(message);
  return j;
}

}  // namespace tractdyn
