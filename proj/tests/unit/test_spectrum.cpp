#include <doctest.h>

#include <cmath>

#include "tractdyn/spectrum.hpp"

using namespace tractdyn;

namespace {

const double kE = std::exp(1.0);

SpectrumOptions small_grid() {
  SpectrumOptions o;
  o.j_min = 3;
  o.j_max = 9;
  return o;
}

// int over [-2,-1] u [1,2] of g(y), composite Simpson
template <class G>
double simpson_I(G g, int n = 20000) {
  double s = 0.0;
  for (double sign : {-1.0, 1.0}) {
    const double h = 1.0 / n;
    double acc = g(sign * 1.0) + g(sign * 2.0);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(sign * (1.0 + i * h));
    s += acc * h / 3.0;
  }
  return s;
}

}  // namespace

TEST_CASE("identity tract: J = 2 at every scale") {
  const TractAtlas atlas = find_tracts(parse_function("exp"), kE);
  const auto opts = small_grid();
  const auto T = default_T_grid(opts);
  REQUIRE(T.size() == 7);
  CHECK(T.front() == 8.0);
  const auto tables = diagonal_tables(atlas.tracts[0], T, opts);
  for (double t : {0.5, 1.3, 2.0}) {
    const BetaInfinity bi = beta_infinity(tables, t);
    for (std::size_t i = 0; i < T.size(); ++i)
      CHECK(bi.raw[i] == doctest::Approx(std::log(2.0) / std::log(T[i])).epsilon(1e-9));
    CHECK(std::abs(bi.value) < 1e-9);
    CHECK(bi.drift < 1e-9);
  }
}

TEST_CASE("square-root tract against a Simpson oracle") {
  // phi_T(xi) = sqrt(xi), |phi_T'(r + iy)| = 1 / (2 |r + iy|^(1/2))
  const TractAtlas atlas = find_tracts(parse_function("exp(z^2)"), kE);
  const double T = 64.0, r = 1.0 / 64.0;
  for (double t : {0.5, 1.0, 1.7}) {
    const double J = simpson_I([&](double y) {
      return std::pow(0.5 / std::sqrt(std::abs(Complex(r, y))), t);
    });
    const double oracle = std::log(J) / std::log(1.0 / r);
    CHECK(integral_means(atlas.tracts[0], T, r, t) == doctest::Approx(oracle).epsilon(1e-6));
    const MeansTable table(atlas.tracts[0], T, r);
    CHECK(table.beta(t) == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("means table preconditions") {
  const TractAtlas atlas = find_tracts(parse_function("exp"), kE);
  CHECK_THROWS_AS(MeansTable(atlas.tracts[0], 0.5, 0.5), Error);
  CHECK_THROWS_AS(MeansTable(atlas.tracts[0], 8.0, 1.5), Error);
  CHECK_THROWS_AS(MeansTable(atlas.tracts[0], 8.0, 0.001), Error);
}

TEST_CASE("smallest root") {
  CHECK(smallest_root([](double t) { return 1.0 - 0.8 * t; }, 0.1, 1e-3) ==
        doctest::Approx(1.25).epsilon(1e-3));
  // first of two roots
  CHECK(smallest_root([](double t) { return (t - 0.55) * (t - 1.5); }, 0.1, 1e-4) ==
        doctest::Approx(0.55).epsilon(1e-3));
  try {
    smallest_root([](double t) { return 1.0 + t; }, 0.1, 1e-3);
    FAIL("expected NoSignChange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoSignChange);
  }
}

TEST_CASE("elementary functions have Theta = 1 and a negative spectrum") {
  for (const char* f : {"exp", "0.25*exp(z)"}) {
    const TractAtlas atlas = find_tracts(parse_function(f), kE);
    const SpectrumModel M(atlas.tracts[0], small_grid());
    CHECK(M.theta() == doctest::Approx(1.0).epsilon(0.05));
    const std::vector<double> ts = {0.0, 0.5, 1.0, 1.5, 2.0};
    const SpectrumCurve c = M.curve(ts);
    CHECK(c.theta_found);
    CHECK(std::abs(c.beta_inf[0]) < 1e-3);
    CHECK(c.b_inf[0] == doctest::Approx(1.0).epsilon(0.02));
    CHECK(negative_spectrum_check(c).negative);
  }
}

TEST_CASE("negative spectrum check flags positive b above theta") {
  SpectrumCurve c;
  c.t_grid = {0.5, 1.0, 1.5, 2.0};
  c.b_inf = {0.5, 0.0, 0.1, -0.5};
  c.theta_hat = 1.0;
  c.theta_found = true;
  const auto rep = negative_spectrum_check(c);
  CHECK_FALSE(rep.negative);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0] == 1.5);
}
