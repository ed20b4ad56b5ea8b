#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tractdyn/poly_dynamics.hpp"
#include "tractdyn/roots.hpp"

using namespace tractdyn;

namespace {
bool by_re_im(Complex a, Complex b) {
  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}
}  // namespace

TEST_CASE("parse and print polynomials") {
  const Polynomial p = Polynomial::parse_shorthand("2z^2 - 1");
  CHECK(p.degree() == 2);
  CHECK(p(Complex(0.5, 0.0)) == Complex(-0.5, 0.0));
  CHECK(Polynomial::parse_shorthand(p.to_shorthand()) == p);
  CHECK_THROWS_AS(Polynomial({1.0, 2.0}), Error);
  CHECK_THROWS_AS(Polynomial::parse_shorthand("z^2+"), Error);
}

TEST_CASE("Aberth roots of a product") {
  // (z - 1)(z - 2)(z + 3i) = z^3 + (-3 + 3i) z^2 + (2 - 9i) z + 6i
  const std::vector<Complex> c = {{0, 6}, {2, -9}, {-3, 3}, {1, 0}};
  auto r = aberth_roots(c);
  std::sort(r.begin(), r.end(), by_re_im);
  REQUIRE(r.size() == 3);
  CHECK(std::abs(r[0] - Complex(0, -3)) < 1e-12);
  CHECK(std::abs(r[1] - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(r[2] - Complex(2, 0)) < 1e-12);
}

TEST_CASE("preimages solve p(z) = w") {
  const Polynomial p = Polynomial::parse_shorthand("z^3+0.3z-1");
  const Complex w(2.5, -1.0);
  const auto pre = preimages(p, w);
  REQUIRE(pre.size() == 3);
  for (Complex z : pre) CHECK(std::abs(p(z) - w) < 1e-10 * (1.0 + std::abs(w)));
}

TEST_CASE("fixed points of z^2") {
  const auto fp = find_repelling_fixed_points(Polynomial::parse_shorthand("z^2"));
  int repelling = 0;
  for (const auto& r : fp) {
    CHECK(std::abs(r.multiplier - 2.0 * r.location) < 1e-12);
    if (r.is_repelling) {
      ++repelling;
      CHECK(std::abs(r.location - 1.0) < 1e-12);
    }
  }
  CHECK(repelling == 1);
}

TEST_CASE("tree pressure of z^2 is (1 - t) log 2") {
  const Polynomial p = Polynomial::parse_shorthand("z^2");
  const PreimageTree tree(p, Complex(p.escape_radius(), 0.0), 12);
  CHECK(tree.level(12).size() == 4096);
  for (double t : {0.0, 0.5, 1.0, 1.5})
    CHECK(std::abs(tree_pressure(tree, t).value - (1.0 - t) * std::log(2.0)) < 1e-3);
}

TEST_CASE("Bowen zeros of exceptional polynomials") {
  CHECK(std::abs(bowen_zero_poly(Polynomial::parse_shorthand("z^2"), 14).value - 1.0) < 0.01);
  CHECK(std::abs(bowen_zero_poly(Polynomial::parse_shorthand("z^2-2"), 14).value - 1.0) < 0.05);
  CHECK(std::abs(bowen_zero_poly(Polynomial::parse_shorthand("2z^2-1"), 14).value - 1.0) < 0.05);
}

TEST_CASE("node budget is enforced") {
  TreeOptions o;
  o.node_budget = 100;
  const Polynomial p = Polynomial::parse_shorthand("z^2-1");
  try {
    PreimageTree(p, Complex(3.0, 0.0), 10, o);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BudgetExceeded);
  }
}

TEST_CASE("Poincare level sums equal tree sums") {
  const Polynomial p = Polynomial::parse_shorthand("z^2-1");
  const Complex w(3.0, 0.0);
  const auto sums = poincare_series_partial(p, 1.3, w, 5);
  const PreimageTree tree(p, w, 5);
  REQUIRE(sums.size() == 5);
  for (int n = 1; n <= 5; ++n) CHECK(std::log(sums[n - 1]) == doctest::Approx(tree.log_sum(n, 1.3)).epsilon(1e-12));
}
