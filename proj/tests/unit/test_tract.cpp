#include <doctest.h>

#include <cmath>

#include "tractdyn/sequences.hpp"
#include "tractdyn/tract.hpp"

using namespace tractdyn;

namespace {

const double kE = std::exp(1.0);

std::vector<Complex> sample_xi(int n, std::uint64_t seed) {
  Halton2 seq(seed);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) {
    const auto [u, v] = seq.next();
    out.emplace_back(0.05 * std::pow(4000.0, u), 400.0 * (2.0 * v - 1.0));
  }
  return out;
}

}  // namespace

TEST_CASE("tract of exp: phi is a translate of the identity") {
  const TractAtlas atlas = find_tracts(parse_function("exp"), kE);
  REQUIRE(atlas.tracts.size() == 1);
  const auto& b = atlas.tracts[0];
  CHECK(b.log_scale() == 0.0);
  for (Complex xi : sample_xi(40, 1)) {
    const auto v = b.phi_with_derivative(xi);
    CHECK(std::abs(wrap_log(v.z - xi)) < 1e-9);
    CHECK(std::abs(v.dz - 1.0) < 1e-9);
  }
}

TEST_CASE("tract of exp/4 is shifted by log 4") {
  const TractAtlas atlas = find_tracts(parse_function("0.25*exp(z)"), 1.0);
  REQUIRE(atlas.tracts.size() == 1);
  for (Complex xi : sample_xi(20, 2))
    CHECK(std::abs(wrap_log(atlas.tracts[0].phi(xi) - xi - std::log(4.0))) < 1e-9);
}

TEST_CASE("two tracts of exp(z^2): phi^2 = xi") {
  const TractAtlas atlas = find_tracts(parse_function("exp(z^2)"), kE);
  REQUIRE(atlas.tracts.size() == 2);
  for (const auto& b : atlas.tracts)
    for (Complex xi : sample_xi(20, 3)) {
      const auto v = b.phi_with_derivative(xi);
      CHECK(std::abs(wrap_log(v.z * v.z - xi)) < 1e-8);
      CHECK(std::abs(2.0 * v.z * v.dz - 1.0) < 1e-8);
    }
  // the tracts are the two halves of the real axis
  CHECK(atlas.tracts[0].phi(Complex(4.0, 0.0)).real() * atlas.tracts[1].phi(Complex(4.0, 0.0)).real() < 0.0);
}

TEST_CASE("Koenigs tract satisfies f(phi(xi)) = exp(log_scale + xi)") {
  const TractAtlas atlas =
      find_tracts(parse_function("koenigs(z^2-1,auto,disjoint=2.718281828459045)"), kE);
  REQUIRE(!atlas.tracts.empty());
  for (const auto& b : atlas.tracts)
    for (Complex xi : sample_xi(30, 4)) CHECK(b.log_residual(b.phi(xi), xi) < 1e-8);
}

TEST_CASE("phi does not depend on the query order") {
  const auto f = parse_function("koenigs(2z^2-1,1,0.25)");
  const TractAtlas a = find_tracts(f, kE);
  const TractAtlas b = find_tracts(f, kE);
  auto xs = sample_xi(30, 5);
  std::vector<Complex> fwd, bwd(xs.size());
  for (Complex xi : xs) fwd.push_back(a.tracts[0].phi(xi));
  for (std::size_t i = xs.size(); i-- > 0;) bwd[i] = b.tracts[0].phi(xs[i]);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(fwd[i] == bwd[i]);
}

TEST_CASE("expansion bound |phi'/phi| <= 4 pi / Re xi") {
  for (const char* f : {"exp", "exp(z^2)", "koenigs(z^2-1,auto,disjoint=2.718281828459045)"}) {
    const TractAtlas atlas = find_tracts(parse_function(f), kE);
    for (const auto& b : atlas.tracts) {
      const double c = 1.0 - b.log_scale();
      for (Complex eta : sample_xi(200, 6)) {
        const auto v = b.phi_with_derivative(eta + c);
        CHECK(std::abs(v.dz / v.z) <= 4.0 * kPi / eta.real());
      }
    }
  }
}

TEST_CASE("rescaled boundary is closed and marked at modulus 1") {
  const TractAtlas atlas = find_tracts(parse_function("exp"), kE);
  for (double T : {1.0, 5.0, 20.0}) {
    const RescaledBoundary rb = trace_boundary(atlas.tracts[0], T, 100);
    CHECK(rb.polyline.size() == 101);
    CHECK(rb.polyline.front() == rb.polyline.back());
    CHECK(std::abs(std::abs(rb.marker) - 1.0) < 1e-12);
    CHECK(std::abs(rescaled_map(atlas.tracts[0], T, 1.0) - rb.marker) < 1e-12);
    // phi(xi) = xi: the corner eps - 4i maps to (eps - 4i) T / T
    CHECK(std::abs(rb.polyline.front() - Complex(rb.offset, -4.0)) < 1e-9);
  }
}

TEST_CASE("modulus ratio on the annulus of the identity tract") {
  // |xi| over Q_T \ Q_{T/8}: max 4 sqrt2 T at the corner, min T/2 on the inner edge
  const TractAtlas atlas = find_tracts(parse_function("exp"), kE);
  CHECK(check_condition_42(atlas.tracts[0], 16.0, 500) == doctest::Approx(8.0 * std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("superlevel segments") {
  const auto f = parse_function("exp");
  CHECK(segment_in_superlevel(f, Complex(2.0, 0.0), Complex(3.0, 10.0), kE));
  CHECK_FALSE(segment_in_superlevel(f, Complex(2.0, 0.0), Complex(-3.0, 0.0), kE));
}

TEST_CASE("Holder fit recovers a planted envelope") {
  std::vector<HolderPair> pairs;
  for (int i = 0; i < 200; ++i) {
    const double d = std::pow(10.0, -3.0 + 3.0 * i / 199.0);
    pairs.push_back({d, 2.0 * std::sqrt(d)});
    pairs.push_back({d, 0.5 * std::sqrt(d)});
  }
  pairs.push_back({0.0, 1.0});
  const HolderEstimate est = fit_holder(pairs);
  CHECK(est.alpha == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(est.H == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(est.pairs_rejected == 1);
}

TEST_CASE("Holder exponent of a smooth tract is 1") {
  const TractAtlas atlas = find_tracts(parse_function("exp"), kE);
  const HolderEstimate est = estimate_holder(atlas.tracts[0], 8.0, 1000);
  CHECK(est.alpha == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("square-root tract: halved log ratio and Holder exponent") {
  const TractAtlas atlas = find_tracts(parse_function("exp(z^2)"), kE);
  const double ratio = check_condition_42(atlas.tracts[0], 16.0, 500);
  CHECK(ratio == doctest::Approx(std::sqrt(8.0 * std::sqrt(2.0))).epsilon(1e-5));
  const HolderEstimate est = estimate_holder(atlas.tracts[0], 8.0, 1000);
  CHECK(est.alpha >= 0.48);
  CHECK(est.alpha <= 1.0);
}
