#include <doctest.h>

#include <cmath>

#include "tractdyn/bottcher.hpp"
#include "tractdyn/linearizer.hpp"
#include "tractdyn/sequences.hpp"

using namespace tractdyn;

namespace {

std::vector<Complex> disc_points(int n, double radius) {
  Halton2 seq(7);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) {
    const auto [u, v] = seq.next();
    out.push_back(std::polar(radius * std::sqrt(u), kTwoPi * v));
  }
  return out;
}

// sum 2^n z^n / (2n)!
Complex cosh_series(Complex z) {
  Complex term = 1.0, sum = 1.0;
  for (int n = 1; n < 200; ++n) {
    term *= 2.0 * z / (static_cast<double>(2 * n - 1) * (2 * n));
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("Koenigs coefficients of z^2 at 1 are 1/n!") {
  const auto a = koenigs_coefficients(Polynomial::parse_shorthand("z^2"), 1.0, 20);
  double fact = 1.0;
  for (int n = 1; n <= 20; ++n) {
    fact *= n;
    CHECK(std::abs(a[n - 1] - 1.0 / fact) < 1e-15 * std::max(1.0, 1.0 / fact));
  }
}

TEST_CASE("linearizer of z^2 is exp") {
  const KoenigsLinearizer L(Polynomial::parse_shorthand("z^2"), 1.0);
  for (Complex z : disc_points(200, 2.0)) {
    const auto v = L.eval(z);
    CHECK(std::abs(v.value - std::exp(z)) < 1e-9);
    CHECK(std::abs(v.deriv - std::exp(z)) < 1e-9);
  }
  // far out only the logarithm is representable
  const Complex z(2000.0, 3.0);
  const auto lv = L.log_eval(z);
  CHECK(std::abs(wrap_log(lv.log_value - z)) < 1e-9);
  CHECK(std::abs(lv.dlog - 1.0) < 1e-9);
}

TEST_CASE("linearizer of 2z^2 - 1 is cosh(2 sqrt(z/2))") {
  const KoenigsLinearizer L(Polynomial::parse_shorthand("2z^2-1"), 1.0);
  CHECK(std::abs(L.lambda() - 4.0) < 1e-14);
  for (Complex z : disc_points(200, 2.0)) CHECK(std::abs(L(z) - cosh_series(z)) < 1e-8);
}

TEST_CASE("functional equation f(lambda z) = p(f(z))") {
  for (const char* ps : {"z^2-1", "z^3+0.3z", "z^2-0.5"}) {
    const Polynomial p = Polynomial::parse_shorthand(ps);
    const KoenigsLinearizer L(p, default_koenigs_point(p));
    CHECK(std::abs(L(0.0) - L.z0()) < 1e-14);
    for (Complex z : disc_points(50, 1.0)) {
      const Complex fz = L(z);
      CHECK(std::abs(L(L.lambda() * z) - p(fz)) < 1e-9 * (1.0 + std::abs(p(fz))));
    }
  }
}

TEST_CASE("linearizer preconditions") {
  const Polynomial z2 = Polynomial::parse_shorthand("z^2");
  try {
    KoenigsLinearizer(z2, 0.0);
    FAIL("expected NotRepelling");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotRepelling);
  }
  try {
    KoenigsLinearizer(z2, 0.5);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("disjoint type scaling keeps the disc inside") {
  const double R = std::exp(1.0);
  const KoenigsLinearizer L(Polynomial::parse_shorthand("z^2-1"),
                            default_koenigs_point(Polynomial::parse_shorthand("z^2-1")));
  const KoenigsLinearizer D = make_disjoint_type(L, R);
  CHECK(std::abs(D.kappa()) < 1.0);
  for (int k = 0; k < 256; ++k) CHECK(std::abs(D(std::polar(R, kTwoPi * k / 256))) <= R);
}

TEST_CASE("Boettcher map of z^2 - 2 is z + 1/z") {
  const BottcherMap h(Polynomial::parse_shorthand("z^2-2"));
  for (double r : {1.2, 2.0, 4.0})
    for (int k = 0; k < 32; ++k) {
      const Complex z = std::polar(r, kTwoPi * (k + 0.25) / 32);
      const auto v = h.eval(z);
      CHECK(std::abs(v.h - (z + 1.0 / z)) < 1e-8);
      CHECK(std::abs(v.dh - (1.0 - 1.0 / (z * z))) < 1e-7);
    }
}

TEST_CASE("Boettcher conjugacy h(z^d) = p(h(z))") {
  for (const char* ps : {"z^2-1", "2z^2-1", "z^3+0.3z", "z^2+0.2"}) {
    const Polynomial p = Polynomial::parse_shorthand(ps);
    const BottcherMap h(p);
    for (double r : {1.1, 1.5, 3.0})
      for (int k = 0; k < 16; ++k) {
        const Complex z = std::polar(r, kTwoPi * (k + 0.5) / 16);
        CHECK(std::abs(h(std::pow(z, p.degree())) - p(h(z))) < 1e-8 * (1.0 + std::abs(p(h(z)))));
      }
  }
}

TEST_CASE("circle means of the identity") {
  const BottcherMap h(Polynomial::parse_shorthand("z^2"));
  for (double t : {0.5, 2.0})
    CHECK(bottcher_circle_means(h, 1.3, t, 0.0, kTwoPi) == doctest::Approx(kTwoPi * 1.3).epsilon(1e-8));
}

TEST_CASE("growth fit recovers a planted exponent") {
  const std::vector<double> radii = {1.1, 1.03, 1.01};
  std::vector<std::vector<double>> logs(1);
  for (double r : radii) logs[0].push_back(0.3 * std::abs(std::log(r - 1.0)) + 0.7);
  const auto beta = fit_growth_exponents(radii, logs, 0.5);
  CHECK(beta[0] == doctest::Approx(0.3).epsilon(1e-9));
}
