#include <doctest.h>

#include "fpl/grid.hpp"

using namespace fpl;

TEST_CASE("uniform grid on the unit interval") {
  const Grid g = build_grid(0.0, 1.0, 3);
  CHECK(g.h == doctest::Approx(0.25));
  REQUIRE(g.nodes.size() == 5);
  const double expected[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 5; ++i) CHECK(g.nodes[i] == doctest::Approx(expected[i]).epsilon(1e-15));
  CHECK(g.interior().size() == 3);
}

TEST_CASE("spacing scales with the interval length") {
  CHECK(build_grid(0.0, 2.0, 3).h == doctest::Approx(0.5));
}

TEST_CASE("nodes are strictly increasing with uniform spacing") {
  for (int m : {1, 2, 7, 50}) {
    const Grid g = build_grid(-1.3, 2.9, m);
    for (int i = 0; i + 1 < g.nodes.size(); ++i) {
      CHECK(g.nodes[i + 1] > g.nodes[i]);
      CHECK(g.nodes[i + 1] - g.nodes[i] == doctest::Approx(g.h).epsilon(1e-12));
    }
    for (int i = 1; i <= m; ++i) CHECK((g.x(i) > g.a && g.x(i) < g.b));
  }
}

TEST_CASE("invalid grids are rejected") {
  CHECK_THROWS_WITH_AS(build_grid(0.0, 1.0, 0), "m must be >= 1", ConfigError);
  CHECK_THROWS_AS(build_grid(1.0, 1.0, 3), ConfigError);
  CHECK_THROWS_AS(build_grid(2.0, 1.0, 3), ConfigError);
}

TEST_CASE("regional offsets are k h for k = 1..m+1") {
  const DifferenceGrid d = build_difference_grid(build_grid(0.0, 1.0, 3), Variant::Regional);
  REQUIRE(d.size() == 4);
  const double expected[] = {0.25, 0.5, 0.75, 1.0};
  for (int k = 1; k <= 4; ++k) CHECK(d.offset(k) == doctest::Approx(expected[k - 1]));
}

TEST_CASE("full variant offsets reach the truncation radius") {
  const Grid g = build_grid(0.0, 1.0, 3);
  const DifferenceGrid d = build_difference_grid(g, Variant::Full, 2.0);
  CHECK(d.size() == 8);
  CHECK(d.offset(d.size()) <= 2.0 + 1e-12);
  // Exact multiples of h survive rounding.
  CHECK(build_difference_grid(build_grid(0.0, 1.0, 9), Variant::Full, 1.3).size() == 13);
}

TEST_CASE("full variant needs a radius larger than the domain") {
  const Grid g = build_grid(0.0, 1.0, 3);
  CHECK_THROWS_WITH_AS(build_difference_grid(g, Variant::Full),
                       "truncation radius required for the full variant", ConfigError);
  CHECK_THROWS_AS(build_difference_grid(g, Variant::Full, 1.0), ConfigError);
}

TEST_CASE("fractional parameter ranges") {
  FracParams fp;
  fp.s = 0.4;
  fp.variant = Variant::Regional;
  CHECK_THROWS_WITH_AS(fp.validate(), "regional variant requires 1/2<s<1", ConfigError);
  fp.variant = Variant::Full;
  CHECK_NOTHROW(fp.validate());
  fp.s = 0.75;
  fp.p = 1.5;
  CHECK_THROWS_AS(fp.validate(), ConfigError);
  fp.p = 2.0;
  fp.c_norm = 0.0;
  CHECK_THROWS_AS(fp.validate(), ConfigError);
}

TEST_CASE("variant names round-trip") {
  CHECK(variant_from_string(to_string(Variant::Regional)) == Variant::Regional);
  CHECK(variant_from_string(to_string(Variant::Full)) == Variant::Full);
  CHECK_THROWS_AS(variant_from_string("spectral"), ConfigError);
}
