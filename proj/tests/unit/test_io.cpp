#include <doctest.h>

#include <atomic>
#include <cmath>
#include <regex>

#include "tractdyn/io.hpp"
#include "tractdyn/parallel.hpp"

using namespace tractdyn;
using nlohmann::json;

TEST_CASE("config round trip is bit exact") {
  RunConfig c;
  c.function = "koenigs(z^2-1,auto,disjoint=2.718281828459045)";
  c.radius = 0.1 + 0.2 + 2.0;
  c.t_step = 0.1;
  c.t_list = std::vector<double>{1.0 / 3.0, 0.7, 2.0};
  c.seed = 18446744073709551615ull;
  const RunConfig d = run_config_from_json(json::parse(to_json(c).dump()));
  CHECK(d.function == c.function);
  CHECK(d.radius == c.radius);
  CHECK(d.t_step == c.t_step);
  CHECK(*d.t_list == *c.t_list);
  CHECK(d.seed == c.seed);
  CHECK(to_json(d).dump() == to_json(c).dump());
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(run_config_from_json(json{{"colour", 1}}), Error);
  RunConfig c;
  c.t_list = std::vector<double>{};
  try {
    c.validate();
    FAIL("expected InvalidGrid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidGrid);
  }
  c.t_list = std::vector<double>{1.0, 0.5};
  CHECK_THROWS_AS(c.validate(), Error);
  c.t_list.reset();
  c.plot_T = {0.0};
  CHECK_THROWS_AS(c.validate(), Error);
  c.plot_T = {1.0};
  c.k_budget = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("t grid from a range") {
  RunConfig c;
  const auto ts = c.t_grid();
  REQUIRE(ts.size() == 21);
  CHECK(ts.front() == 0.0);
  CHECK(ts.back() == doctest::Approx(2.0));
}

TEST_CASE("svg uses six-decimal stroke paths") {
  RescaledBoundary b;
  b.polyline = {{0.5, -4.0}, {4.0, -4.0}, {4.0, 4.0}, {0.5, -4.0}};
  b.marker = {1.0, 0.0};
  const std::string svg = boundary_svg(b);
  CHECK(svg.find("fill=\"none\"") != std::string::npos);
  CHECK(svg.find("<circle") == std::string::npos);
  CHECK(svg.find("M0.500000 4.000000 L4.000000 4.000000") != std::string::npos);
  // every number in the file carries six decimals
  const std::regex num(R"(-?[0-9]+\.[0-9]+)");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), num); it != std::sregex_iterator(); ++it) {
    const std::string s = it->str();
    CHECK(s.size() - s.find('.') - 1 == 6);
  }
  CHECK(fixed6(-1e-9) == "0.000000");
}

TEST_CASE("error records") {
  CHECK(error_json("InvalidGrid", "T must be positive").dump() ==
        R"({"error":"InvalidGrid","message":"T must be positive"})");
}

TEST_CASE("parallel loops fill slots independent of the worker count") {
  std::vector<double> a(1000), b(1000);
  set_thread_count(1);
  parallel_for(a.size(), [&](std::size_t i) { a[i] = std::sin(static_cast<double>(i)); });
  set_thread_count(4);
  parallel_for(b.size(), [&](std::size_t i) { b[i] = std::sin(static_cast<double>(i)); });
  CHECK(a == b);
  try {
    parallel_for(100, [](std::size_t i) {
      if (i == 17 || i == 80) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
  set_thread_count(0);
}
