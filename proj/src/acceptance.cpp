#include "tractdyn/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "tractdyn/bottcher.hpp"
#include "tractdyn/io.hpp"
#include "tractdyn/linearizer.hpp"
#include "tractdyn/parallel.hpp"
#include "tractdyn/poly_dynamics.hpp"
#include "tractdyn/sequences.hpp"
#include "tractdyn/spectrum.hpp"
#include "tractdyn/transfer.hpp"

namespace tractdyn {
namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string g6(double x) { return fmt("%.6g", x); }

std::string r17(double R) { return fmt("%.17g", R); }

SpectrumOptions spectrum_opts(const AcceptanceOptions& o) {
  SpectrumOptions s;
  s.j_min = o.T_jmin;
  s.j_max = o.T_jmax;
  return s;
}

std::vector<double> t_grid_02() {
  std::vector<double> ts;
  for (int k = 0; k <= 20; ++k) ts.push_back(0.1 * k);
  return ts;
}

Verdict transfer_closed_form(const AcceptanceOptions& o) {
  const TractAtlas atlas = find_tracts(parse_function("exp"), o.radius);
  TransferOptions to;
  to.k_budget = o.k_budget;
  Verdict v{true, ""};
  for (double b : {2.0, 4.0}) {
    const double exact = 1.0 / std::tanh(b / 2.0) / (2.0 * b);
    const double got = transfer_apply_point(atlas, 2.0, Complex(std::exp(b), 0.0), to).value;
    const double err = std::abs(got - exact);
    v.passed = v.passed && err < 1e-6;
    v.detail += "L(e^" + g6(b) + ")=" + fmt("%.9f", got) + " err=" + fmt("%.1e", err) + " ";
  }
  return v;
}

Verdict divergence_dichotomy(const AcceptanceOptions& o) {
  const TractAtlas atlas = find_tracts(parse_function("exp"), o.radius);
  TransferOptions to;
  to.k_budget = o.k_budget;
  Verdict v{true, ""};
  const Complex w(std::exp(2.0), 0.0);
  for (double t : {1.2, 1.5, 2.0, 0.5, 0.8}) {
    const bool expect_finite = t > 1.0;
    bool finite = false;
    try {
      finite = std::isfinite(transfer_apply_point(atlas, t, w, to).value);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DivergenceDetected) throw;
    }
    v.passed = v.passed && finite == expect_finite;
    v.detail += "t=" + g6(t) + (finite ? ":finite " : ":divergent ");
  }
  return v;
}

Verdict elementary_spectrum(const AcceptanceOptions& o) {
  Verdict v{true, ""};
  for (const char* f : {"exp", "0.25*exp(z)", "exp(z^2)"}) {
    const TractAtlas atlas = find_tracts(parse_function(f), o.radius);
    const AtlasSpectrum S(atlas, spectrum_opts(o));
    double worst = 0.0;
    for (double t : {0.5, 1.0, 1.5, 2.0}) worst = std::max(worst, std::abs(S.beta(t)));
    const double theta = S.theta();
    v.passed = v.passed && worst <= 0.05 && std::abs(theta - 1.0) <= 0.05;
    v.detail += std::string(f) + ": max|beta|=" + fmt("%.4f", worst) + " theta=" +
                fmt("%.4f", theta) + "; ";
  }
  return v;
}

TreeOptions poly_tree(const AcceptanceOptions& o) {
  TreeOptions t;
  t.node_budget = static_cast<std::size_t>(std::max<long long>(o.tree_nodes, 1));
  return t;
}

Verdict polynomial_pressure(const AcceptanceOptions& o) {
  Verdict v{true, ""};
  const Polynomial z2 = Polynomial::parse_shorthand("z^2");
  const Complex w(z2.escape_radius(), 0.0);
  const PreimageTree tree(z2, w, 14, poly_tree(o));
  double worst = 0.0;
  for (double t : {0.0, 0.5, 1.0, 1.5})
    worst = std::max(worst, std::abs(tree_pressure(tree, t).value - (1.0 - t) * std::log(2.0)));
  v.passed = worst < 1e-3;
  v.detail = "z^2 max|P-(1-t)log2|=" + fmt("%.1e", worst);
  const struct {
    const char* p;
    double tol;
  } zeros[] = {{"z^2", 0.01}, {"z^2-2", 0.05}, {"2z^2-1", 0.05}};
  for (const auto& z : zeros) {
    BowenZeroOptions bo;
    bo.tree = poly_tree(o);
    const double h = bowen_zero_poly(Polynomial::parse_shorthand(z.p), 14, bo).value;
    v.passed = v.passed && std::abs(h - 1.0) <= z.tol;
    v.detail += std::string(" zero(") + z.p + ")=" + fmt("%.4f", h);
  }
  return v;
}

Verdict appendix_identity(const AcceptanceOptions& o) {
  const Polynomial p = Polynomial::parse_shorthand("z^2-1");
  const BottcherMap h(p);
  const std::vector<double> ts = {0.5, 1.0, 1.5};
  const std::vector<double> radii = {1.1, 1.03, 1.01};
  const auto est = bottcher_spectrum(h, ts, radii);
  const PreimageTree tree(p, Complex(p.escape_radius(), 0.0), 14, poly_tree(o));
  Verdict v{true, ""};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double target = ts[i] - 1.0 + tree_pressure(tree, ts[i]).value / std::log(2.0);
    const double err = std::abs(est.beta[i] - target);
    v.passed = v.passed && err < 0.05;
    v.detail += "t=" + g6(ts[i]) + ": beta_h=" + fmt("%.4f", est.beta[i]) + " target=" +
                fmt("%.4f", target) + " ";
  }
  return v;
}

Verdict koenigs_golden(const AcceptanceOptions& o) {
  Halton2 seq(o.seed);
  std::vector<Complex> pts;
  for (int i = 0; i < 200; ++i) {
    const auto [u, s] = seq.next();
    pts.push_back(std::polar(2.0 * std::sqrt(u), kTwoPi * s));
  }
  const KoenigsLinearizer e(Polynomial::parse_shorthand("z^2"), 1.0);
  const Polynomial cheb = Polynomial::parse_shorthand("2z^2-1");
  const KoenigsLinearizer c(cheb, 1.0);
  double err_e = 0.0, err_c = 0.0, fe = 0.0;
  for (Complex z : pts) {
    err_e = std::max(err_e, std::abs(e(z) - std::exp(z)));
    // sum 2^n z^n / (2n)!
    Complex term = 1.0, sum = 1.0;
    for (int n = 1; n < 200 && std::abs(term) > 1e-30; ++n) {
      term *= 2.0 * z / (static_cast<double>(2 * n - 1) * (2 * n));
      sum += term;
    }
    err_c = std::max(err_c, std::abs(c(z) - sum));
    for (const KoenigsLinearizer* L : {&e, &c}) {
      const Complex fz = (*L)(z);
      fe = std::max(fe, std::abs((*L)(L->lambda() * z) - L->polynomial()(fz)));
    }
  }
  Verdict v;
  v.passed = err_e < 1e-9 && err_c < 1e-8 && fe < 1e-9;
  v.detail = "exp err=" + fmt("%.1e", err_e) + " cosh err=" + fmt("%.1e", err_c) +
             " functional residual=" + fmt("%.1e", fe);
  return v;
}

Verdict bottcher_golden(const AcceptanceOptions&) {
  double golden = 0.0, residual = 0.0;
  const BottcherMap j(Polynomial::parse_shorthand("z^2-2"));
  for (const char* ps : {"z^2", "z^2-1", "z^2-2", "2z^2-1", "z^3+0.3z"}) {
    const Polynomial p = Polynomial::parse_shorthand(ps);
    const BottcherMap h(p);
    for (double r : {1.2, 2.0, 4.0})
      for (int k = 0; k < 64; ++k) {
        const Complex z = std::polar(r, kTwoPi * (k + 0.5) / 64);
        const Complex hz = h(z);
        residual = std::max(residual, std::abs(h(std::pow(z, p.degree())) - p(hz)));
        if (std::string_view(ps) == "z^2-2")
          golden = std::max(golden, std::abs(j(z) - (z + 1.0 / z)));
      }
  }
  Verdict v;
  v.passed = golden < 1e-8 && residual < 1e-8;
  v.detail = "z+1/z err=" + fmt("%.1e", golden) + " conjugacy residual=" + fmt("%.1e", residual);
  return v;
}

Verdict eremenko_lyubich(const AcceptanceOptions& o) {
  Verdict v{true, ""};
  for (const auto& f : acceptance_handles(o.radius)) {
    const TractAtlas atlas = find_tracts(parse_function(f), o.radius);
    long long violations = 0;
    double worst = 0.0;
    for (const auto& b : atlas.tracts) {
      // tract over R: phi_R(eta) = phi(eta + c)
      const double c = std::log(o.radius) - b.log_scale();
      const double lo = b.options().min_offset;
      Halton2 seq(o.seed);
      std::vector<double> ratio(static_cast<std::size_t>(o.el_samples));
      std::vector<Complex> etas(ratio.size());
      for (auto& eta : etas) {
        const auto [u, s] = seq.next();
        eta = Complex(lo * std::pow(1e4 / lo, u), 1e4 * (2.0 * s - 1.0));
      }
      parallel_for(etas.size(), [&](std::size_t i) {
        const auto pv = b.phi_with_derivative(etas[i] + c);
        ratio[i] = std::abs(pv.dz / pv.z) * etas[i].real() / (4.0 * kPi);
      });
      for (double r : ratio) {
        worst = std::max(worst, r);
        if (r > 1.0) ++violations;
      }
    }
    v.passed = v.passed && violations == 0;
    v.detail += f + ": " + std::to_string(violations) + " (max ratio " + fmt("%.3f", worst) +
                "); ";
  }
  return v;
}

Verdict spectrum_shape(const AcceptanceOptions& o) {
  Verdict v{true, ""};
  const auto ts = t_grid_02();
  for (const auto& f : acceptance_handles(o.radius)) {
    const TractAtlas atlas = find_tracts(parse_function(f), o.radius);
    const AtlasSpectrum S(atlas, spectrum_opts(o));
    std::vector<double> beta;
    for (double t : ts) beta.push_back(S.beta(t));
    double convex = 0.0;
    for (std::size_t i = 1; i + 1 < beta.size(); ++i)
      convex = std::max(convex, beta[i] - 0.5 * (beta[i - 1] + beta[i + 1]));
    const double b0 = beta.front() + 1.0;
    const double b2 = beta.back() - 1.0;
    const bool ok = std::abs(beta.front()) <= 1e-3 && std::abs(b0 - 1.0) <= 0.02 && b2 <= 0.05 &&
                    convex <= 1e-3;
    v.passed = v.passed && ok;
    v.detail += f + ": beta(0)=" + fmt("%.1e", beta.front()) + " b(2)=" + fmt("%.4f", b2) +
                " convexity=" + fmt("%.1e", convex) + "; ";
  }
  return v;
}

Verdict linearizer_scaling(const AcceptanceOptions& o) {
  const std::string f = "koenigs(z^2,1,disjoint=" + r17(o.radius) + ")";
  const TractAtlas atlas = find_tracts(parse_function(f), o.radius);
  TransferOptions to;
  to.k_budget = o.k_budget;
  const std::vector<double> s = {2, 4, 8, 16, 32};
  const DecayReport r = decay_check(atlas, 2.0, 2.0, 1.0, s, to);
  Verdict v;
  v.passed = r.band <= 10.0;
  v.detail = "sup/inf of L*log|w| = " + fmt("%.4f", r.band);
  return v;
}

Verdict composite_model(const AcceptanceOptions& o) {
  const auto ts = t_grid_02();
  const auto so = spectrum_opts(o);
  const TractAtlas inner = find_tracts(parse_function("exp(z-6)"), o.radius);
  const TractAtlas comp = find_tracts(parse_function("composite(exp(z-6))"), o.radius);
  const SpectrumModel mi(inner.tracts.front(), so);
  const SpectrumModel mc(comp.tracts.front(), so);
  const CompositeReport r = composite_spectrum_compare(mi, mc, ts);
  double gap = -INFINITY;
  for (std::size_t i = 0; i < ts.size(); ++i)
    gap = std::max(gap, r.beta_composite[i] - r.beta_inner[i]);
  Verdict v;
  v.passed = r.passed();
  v.detail = "theta_F=" + fmt("%.4f", r.theta_composite) + " theta_f=" +
             fmt("%.4f", r.theta_inner) + " max(beta_F-beta_f)=" + fmt("%.4f", gap);
  return v;
}

std::vector<std::string> render_plots(const std::string& f, double R, int points) {
  const TractAtlas atlas = find_tracts(parse_function(f), R);
  std::vector<std::string> out;
  for (double T : {1.0, 5.0, 20.0}) out.push_back(boundary_svg(trace_boundary(atlas.tracts.front(), T, points)));
  return out;
}

Verdict figure_reproduction(const AcceptanceOptions& o) {
  const std::string f = "koenigs(z^2-1,auto,disjoint=" + r17(o.radius) + ")";
  const TractAtlas atlas = find_tracts(parse_function(f), o.radius);
  Verdict v{true, ""};
  double marker = 0.0;
  for (double T : {1.0, 5.0, 20.0}) {
    const RescaledBoundary b = trace_boundary(atlas.tracts.front(), T, 400);
    const bool closed = b.polyline.size() > 3 && b.polyline.front() == b.polyline.back();
    marker = std::max(marker, std::abs(std::abs(b.marker) - 1.0));
    v.passed = v.passed && closed;
  }
  const bool same = render_plots(f, o.radius, 400) == render_plots(f, o.radius, 400);
  v.passed = v.passed && marker <= 1e-6 && same;
  v.detail = "max||phi_T(1)|-1|=" + fmt("%.1e", marker) + (same ? " identical" : " differ");
  return v;
}

struct Spec {
  int id;
  const char* name;
  double budget;
  std::function<Verdict(const AcceptanceOptions&)> run;
};

const std::vector<Spec>& specs() {
  static const std::vector<Spec> s = {
      {1, "transfer closed form", 1.0, transfer_closed_form},
      {2, "divergence dichotomy", 5.0, divergence_dichotomy},
      {3, "elementary spectrum", 180.0, elementary_spectrum},
      {4, "polynomial tree pressure", 30.0, polynomial_pressure},
      {5, "appendix identity", 120.0, appendix_identity},
      {6, "Koenigs golden functions", 5.0, koenigs_golden},
      {7, "Boettcher golden function", 5.0, bottcher_golden},
      {8, "Eremenko-Lyubich bound", 30.0, eremenko_lyubich},
      {9, "spectrum shape", 0.0, spectrum_shape},
      {10, "linearizer transfer scaling", 10.0, linearizer_scaling},
      {11, "composite model", 120.0, composite_model},
      {12, "figure reproduction", 60.0, figure_reproduction},
  };
  return s;
}

}  // namespace

std::vector<std::string> acceptance_handles(double radius) {
  const std::string R = r17(radius);
  return {"exp",
          "0.25*exp(z)",
          "exp(z^2)",
          "koenigs(z^2,1,disjoint=" + R + ")",
          "koenigs(2z^2-1,1,0.25)",
          "koenigs(z^2-1,auto,disjoint=" + R + ")",
          "composite(exp(z-6))"};
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  const auto& all = specs();
  const auto it = std::find_if(all.begin(), all.end(), [id](const Spec& s) { return s.id == id; });
  if (it == all.end()) fail(ErrorKind::InvalidArgument, "no criterion " + std::to_string(id));
  CriterionResult r;
  r.id = id;
  r.name = it->name;
  r.budget_seconds = it->budget;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Verdict v = it->run(opts);
    r.passed = v.passed;
    r.detail = v.detail;
  } catch (const Error& e) {
    r.passed = false;
    r.detail = std::string(to_string(e.kind())) + ": " + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  while (!r.detail.empty() && (r.detail.back() == ' ' || r.detail.back() == ';'))
    r.detail.pop_back();
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<int> ids = opts.only;
  if (ids.empty())
    for (const auto& s : specs()) ids.push_back(s.id);
  std::vector<CriterionResult> out;
  for (int id : ids)
    if (id != 13) out.push_back(run_criterion(id, opts));

  CriterionResult det;
  det.id = 13;
  det.name = "determinism";
  const auto t0 = std::chrono::steady_clock::now();
  const unsigned saved = thread_count();
  set_thread_count(opts.rerun_threads);
  std::vector<CriterionResult> again;
  for (const auto& r : out) again.push_back(run_criterion(r.id, opts));
  set_thread_count(saved);
  const bool same = format_report(out, false) == format_report(again, false);
  det.passed = same;
  det.detail = "rerun with " + std::to_string(opts.rerun_threads) + " thread(s): " +
               (same ? "byte-identical report" : "reports differ");
  det.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.push_back(det);
  return out;
}

std::string format_report(const std::vector<CriterionResult>& results, bool with_timings) {
  std::ostringstream os;
  for (const auto& r : results) {
    const bool in_time = r.budget_seconds <= 0.0 || r.seconds < r.budget_seconds;
    const bool pass = r.passed && (!with_timings || in_time);
    os << (pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail;
    if (with_timings) {
      os << " (" << fmt("%.2f", r.seconds) << " s";
      if (r.budget_seconds > 0.0) os << ", limit " << g6(r.budget_seconds) << " s";
      os << ")";
    }
    os << '\n';
  }
  return os.str();
}

bool all_passed(const std::vector<CriterionResult>& results, bool with_timings) {
  for (const auto& r : results) {
    const bool in_time = r.budget_seconds <= 0.0 || r.seconds < r.budget_seconds;
    if (!r.passed || (with_timings && !in_time)) return false;
  }
  return true;
}

}  // namespace tractdyn
