#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tractdyn/acceptance.hpp"
#include "tractdyn/io.hpp"
#include "tractdyn/parallel.hpp"
#include "tractdyn/poly_dynamics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tractdyn;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> function;
  std::optional<double> radius, tmin, tmax, tstep;
  std::optional<int> Tjmin, Tjmax;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::optional<int> k_budget, branch_budget, n_max;
  std::optional<long long> tree_nodes;
  std::vector<double> t_list;
};

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (const char* env = std::getenv("TRACTDYN_OUT")) c.out_dir = env;
  if (const char* env = std::getenv("TRACTDYN_THREADS")) {
    try {
      c.threads = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidArgument, "TRACTDYN_THREADS must be a count");
    }
  }
  if (o.function) c.function = *o.function;
  if (o.radius) c.radius = *o.radius;
  if (o.tmin) c.t_min = *o.tmin;
  if (o.tmax) c.t_max = *o.tmax;
  if (o.tstep) c.t_step = *o.tstep;
  if (o.tmin || o.tmax || o.tstep) c.t_list.reset();
  if (!o.t_list.empty()) c.t_list = o.t_list;
  if (o.Tjmin) c.T_jmin = *o.Tjmin;
  if (o.Tjmax) c.T_jmax = *o.Tjmax;
  if (o.out) c.out_dir = *o.out;
  if (o.threads) c.threads = *o.threads;
  if (o.seed) c.seed = *o.seed;
  if (o.k_budget) c.k_budget = *o.k_budget;
  if (o.branch_budget) c.branch_budget = *o.branch_budget;
  if (o.n_max) c.n_max = *o.n_max;
  if (o.tree_nodes) c.tree_nodes = *o.tree_nodes;
  c.validate();
  if (c.threads > 0) set_thread_count(c.threads);
  return c;
}

void write_file(const RunConfig& c, const std::string& name, const std::string& text) {
  fs::create_directories(c.out_dir);
  const fs::path p = fs::path(c.out_dir) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + p.string());
  out << text;
}

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

// max |f| on |z| = R; below R means f^-1 of {|w| > R} is backward invariant.
double circle_max(const EntireFunction& f, double R) {
  double m = 0.0;
  for (int k = 0; k < 1024; ++k) {
    const Complex z = std::polar(R, kTwoPi * k / 1024.0);
    m = std::max(m, std::exp(f.log_value(z).real()));
  }
  return m;
}

json header(const RunConfig& c, const TractAtlas& atlas) {
  json j;
  j["function"] = json::parse(atlas.function.descriptor());
  j["radius"] = c.radius;
  j["tracts"] = atlas.tracts.size();
  const double m = circle_max(atlas.function, c.radius);
  j["max_on_circle"] = m;
  j["backward_invariant"] = m < c.radius;
  return j;
}

Complex base_point(const std::vector<double>& w, const TractAtlas& atlas) {
  if (w.empty()) return default_transfer_point(atlas);
  return {w[0], w[1]};
}

int cmd_tract_plot(const RunConfig& c, int points) {
  const TractAtlas atlas = find_tracts(parse_function(c.function), c.radius);
  json files = json::array();
  for (std::size_t j = 0; j < atlas.tracts.size(); ++j) {
    for (double T : c.plot_T) {
      const RescaledBoundary b = trace_boundary(atlas.tracts[j], T, points);
      std::string stem = "tract";
      if (atlas.tracts.size() > 1) stem += std::to_string(j);
      stem += "_T" + g(T);
      write_file(c, stem + ".svg", boundary_svg(b));
      write_file(c, stem + ".csv", boundary_csv(b));
      files.push_back({{"tract", j}, {"T", T}, {"svg", stem + ".svg"}, {"csv", stem + ".csv"},
                       {"scale", b.scale}, {"marker", complex_json(b.marker)}});
    }
  }
  json out = header(c, atlas);
  out["plots"] = files;
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_spectrum(const RunConfig& c) {
  const TractAtlas atlas = find_tracts(parse_function(c.function), c.radius);
  const AtlasSpectrum S(atlas, c.spectrum_options());
  const SpectrumCurve curve = S.curve(c.t_grid());
  const NegativeSpectrumReport neg = negative_spectrum_check(curve);
  json j = spectrum_json(curve, neg);
  j["function"] = json::parse(atlas.function.descriptor());
  j["tracts"] = atlas.tracts.size();
  write_file(c, "spectrum.csv", spectrum_csv(curve));
  write_file(c, "spectrum.json", j.dump(2) + "\n");
  std::cout << j["summary"].dump(2) << '\n';
  return 0;
}

int cmd_transfer(const RunConfig& c, const std::vector<double>& w) {
  const TractAtlas atlas = find_tracts(parse_function(c.function), c.radius);
  const Complex z = base_point(w, atlas);
  json samples = json::array();
  bool diverged = false;
  for (double t : c.t_grid()) {
    try {
      samples.push_back(transfer_json(transfer_apply_point(atlas, t, z, c.transfer_options())));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DivergenceDetected && e.kind() != ErrorKind::InvalidArgument)
        throw;
      if (e.kind() == ErrorKind::DivergenceDetected) diverged = true;
      samples.push_back({{"w", complex_json(z)}, {"t", t}, {"error", to_string(e.kind())},
                         {"message", e.what()}});
    }
  }
  json j = header(c, atlas);
  j["samples"] = samples;
  write_file(c, "transfer.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << '\n';
  return diverged ? 3 : 0;
}

int cmd_pressure(const RunConfig& c, const std::vector<double>& w) {
  const TractAtlas atlas = find_tracts(parse_function(c.function), c.radius);
  const EntireTree tree(atlas, base_point(w, atlas), c.n_max, c.tree_options());
  EntirePressureCurve curve;
  curve.n_levels = c.n_max;
  curve.tree_nodes = tree.node_count();
  curve.branch_budget = (1 << (tree.blocks_per_tract() - 1)) - 1;
  json diverged = json::array();
  for (double t : c.t_grid()) {
    curve.t_grid.push_back(t);
    try {
      const PressureEstimate p = pressure_entire(tree, t, c.n_max);
      curve.pressure.push_back(p.value);
      curve.residual.push_back(p.residual);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DivergenceDetected) throw;
      curve.pressure.push_back(NAN);  // serialized as null
      curve.residual.push_back(NAN);
      diverged.push_back(t);
    }
  }
  json j = header(c, atlas);
  j["base_point"] = complex_json(base_point(w, atlas));
  j.update(pressure_json(curve));
  j["diverged_t"] = diverged;
  write_file(c, "pressure.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << '\n';
  return 0;
}

json poly_zero(const Polynomial& p, int depth) {
  const BowenZero z = bowen_zero_poly(p, depth);
  return {{"bowen_zero", z.value},
          {"bracket", {z.bracket_lo, z.bracket_hi}},
          {"depth", z.depth},
          {"base_point", complex_json(z.base_point)}};
}

int cmd_hypdim(const RunConfig& c, const std::string& poly, int depth,
               const std::vector<double>& w) {
  json j;
  if (!poly.empty()) {
    j["poly"] = poly;
    j.update(poly_zero(Polynomial::parse_shorthand(poly), depth));
    write_file(c, "hypdim.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  const TractAtlas atlas = find_tracts(parse_function(c.function), c.radius);
  const AtlasSpectrum S(atlas, c.spectrum_options());
  const double theta = S.theta();
  const EntireTree tree(atlas, base_point(w, atlas), c.n_max, c.tree_options());
  const EntireBowenZero h = bowen_zero_entire(tree, theta, c.n_max);
  j["theta_hat"] = theta;
  j["bowen_zero"] = h.h;
  json d = header(c, atlas);
  d["bracket"] = {h.lo, h.hi};
  d["base_point"] = complex_json(base_point(w, atlas));
  d["n_levels"] = c.n_max;
  d["branch_budget"] = (1 << (tree.blocks_per_tract() - 1)) - 1;
  d["tree_nodes"] = tree.node_count();
  if (atlas.function.family() == Family::Koenigs)
    d["polynomial"] = poly_zero(atlas.function.linearizer().polynomial(), depth);
  j["diagnostics"] = d;
  write_file(c, "hypdim.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_verify(const RunConfig& c, const std::vector<int>& only, unsigned rerun_threads,
               bool timings) {
  AcceptanceOptions a;
  a.seed = c.seed;
  a.radius = c.radius;
  a.T_jmin = c.T_jmin;
  a.T_jmax = c.T_jmax;
  a.k_budget = c.k_budget;
  a.branch_budget = c.branch_budget;
  a.tree_nodes = c.tree_nodes;
  a.only = only;
  a.rerun_threads = rerun_threads;
  const auto results = run_acceptance(a);
  const std::string report = format_report(results, timings);
  write_file(c, "verify.txt", report);
  std::cout << report;
  return all_passed(results, timings) ? 0 : 1;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidGrid:
      return 2;
    case ErrorKind::NoSignChange:
    case ErrorKind::DivergenceDetected:
      return 3;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermodynamic formalism for entire functions of bounded type"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config, "JSON run configuration");
  app.add_option("--function", o.function, "JSON descriptor or shorthand");
  app.add_option("--radius", o.radius, "R of the tracts f^-1({|w| > R})");
  app.add_option("--tmin", o.tmin);
  app.add_option("--tmax", o.tmax);
  app.add_option("--tstep", o.tstep);
  app.add_option("--t", o.t_list, "explicit t values (overrides the range)")->delimiter(',');
  app.add_option("--Tjmin", o.Tjmin, "T grid starts at 2^Tjmin");
  app.add_option("--Tjmax", o.Tjmax, "T grid ends at 2^Tjmax");
  app.add_option("--out", o.out, "output directory (env TRACTDYN_OUT)");
  app.add_option("--threads", o.threads, "worker threads (env TRACTDYN_THREADS)");
  app.add_option("--seed", o.seed);
  app.add_option("--k-budget", o.k_budget, "largest |k| per transfer sample");
  app.add_option("--branch-budget", o.branch_budget, "largest |k| per tree level");
  app.add_option("--tree-nodes", o.tree_nodes, "node budget of preimage trees");
  app.add_option("--n-max", o.n_max, "iterates used by the pressure fit (<= 4)");

  std::vector<double> plot_T;
  int points = 0;
  auto* plot = app.add_subcommand("tract-plot", "rescaled tract boundaries as SVG and CSV");
  plot->add_option("--T", plot_T, "scales T")->delimiter(',');
  plot->add_option("--points", points, "boundary points per curve");

  app.add_subcommand("spectrum", "integral means spectrum beta_inf, b_inf and Theta");

  std::vector<double> w;
  auto* transfer = app.add_subcommand("transfer", "L_t 1(w) on the t grid");
  transfer->add_option("--w", w, "base point re,im (default R e)")->delimiter(',')->expected(2);

  auto* pressure = app.add_subcommand("pressure", "pressure estimates from the preimage tree");
  pressure->add_option("--w", w, "base point re,im (default R e)")->delimiter(',')->expected(2);

  std::string poly;
  int depth = 14;
  auto* hypdim = app.add_subcommand("hypdim", "zero of the pressure above Theta");
  hypdim->add_option("--poly", poly, "polynomial shorthand: tree pressure of p instead");
  hypdim->add_option("--depth", depth, "depth of polynomial trees");
  hypdim->add_option("--w", w, "base point re,im (default R e)")->delimiter(',')->expected(2);

  std::vector<int> only;
  unsigned rerun_threads = 1;
  bool timings = false;
  auto* verify = app.add_subcommand("verify", "acceptance suite, one PASS/FAIL line per criterion");
  verify->add_option("--only", only, "criterion ids")->delimiter(',');
  verify->add_option("--rerun-threads", rerun_threads, "threads of the determinism rerun");
  verify->add_flag("--timings", timings, "append runtimes and enforce runtime bounds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << error_json("InvalidArgument", e.what()).dump() << '\n';
    return 2;
  }

  try {
    RunConfig c = resolve(o);
    if (!plot_T.empty()) c.plot_T = plot_T;
    if (points > 0) c.boundary_points = points;
    c.validate();
    if (*plot) return cmd_tract_plot(c, c.boundary_points);
    if (app.got_subcommand("spectrum")) return cmd_spectrum(c);
    if (*transfer) return cmd_transfer(c, w);
    if (*pressure) return cmd_pressure(c, w);
    if (*hypdim) return cmd_hypdim(c, poly, depth, w);
    if (*verify) return cmd_verify(c, only, rerun_threads, timings);
  } catch (const Error& e) {
    std::cout << error_json(to_string(e.kind()), e.what()).dump() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cout << error_json("InvalidArgument", e.what()).dump() << '\n';
    return 2;
  }
  return 2;
}
