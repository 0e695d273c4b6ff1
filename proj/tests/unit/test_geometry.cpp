#include <cmath>
#include <sstream>

#include "besovkit/geometry.hpp"
#include "doctest.h"

using namespace besovkit;

TEST_CASE("dyadic cube shape") {
  DyadicCube q{3, {5, -2}, 2};
  CHECK(q.side() == doctest::Approx(0.25));
  CHECK(q.center().x == doctest::Approx(0.625));
  CHECK(q.center().y == doctest::Approx(-0.25));
  const Box b = q.dilated(2.0);
  CHECK(b.hi.x - b.lo.x == doctest::Approx(0.5));
}

TEST_CASE("point and segment distances") {
  CHECK(distance_point_segment({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(distance_point_segment({3, 0}, {-1, 0}, {1, 0}) == doctest::Approx(2.0));
  CHECK(distance_point_box({2, 2}, Box{{0, 0}, {1, 1}}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(distance_segment_segment({0, 0}, {1, 1}, {0, 1}, {1, 0}) == doctest::Approx(0.0));
  auto c = clip_segment_box({-1, 0.5}, {2, 0.5}, Box{{0, 0}, {1, 1}});
  REQUIRE(c);
  CHECK((*c)[0] == doctest::Approx(1.0 / 3));
  CHECK((*c)[1] == doctest::Approx(2.0 / 3));
}

TEST_CASE("square membership and boundary distance") {
  auto sq = LipschitzDomain::unit_square();
  CHECK(sq.area() == doctest::Approx(1.0));
  CHECK(sq.perimeter() == doctest::Approx(4.0));
  CHECK(sq.contains({0.5, 0.5}));
  CHECK(sq.contains({0.0, 0.3}));
  CHECK_FALSE(sq.contains({1.1, 0.3}));
  CHECK(sq.distance_to_boundary({0.5, 0.25}) == doctest::Approx(0.25));
  CHECK(sq.segment_in_domain({0.1, 0.1}, {0.4, 0.0}, 2));
  CHECK_FALSE(sq.segment_in_domain({0.1, 0.1}, {0.5, 0.0}, 2));
}

TEST_CASE("L-shape rejects segments through the notch") {
  auto l = LipschitzDomain::l_shape();
  CHECK(l.area() == doctest::Approx(0.75));
  CHECK_FALSE(l.contains({0.75, 0.75}));
  CHECK(l.segment_in_domain({0.25, 0.75}, {0.25, 0.0}, 1));
  CHECK_FALSE(l.segment_in_domain({0.25, 0.9}, {0.5, -0.5}, 1));
}

TEST_CASE("graph domain respects its Lipschitz constant") {
  auto s = LipschitzDomain::sawtooth(4, 1.0, 0.75);
  CHECK(s.lipschitz_constant() == doctest::Approx(1.0));
  CHECK_THROWS_AS(LipschitzDomain::graph({{0, 0}, {1, 2}}, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("boundary samples carry the perimeter") {
  auto sq = LipschitzDomain::unit_square();
  double w = 0.0;
  for (const auto& b : sq.boundary_samples(0.01)) w += b.weight;
  CHECK(w == doctest::Approx(4.0));
  CHECK(sq.boundary_length_in_box(Box{{-0.1, -0.1}, {0.5, 0.5}}) == doctest::Approx(1.0));
  CHECK(sq.boundary_length_in_disk({0.5, 0.0}, 0.25) == doctest::Approx(0.5));
}

TEST_CASE("cubes meeting the boundary grow like 2^j") {
  auto sq = LipschitzDomain::unit_square();
  const auto a = cubes_meeting(sq, Carrier::boundary, 4).size();
  const auto b = cubes_meeting(sq, Carrier::boundary, 5).size();
  const double ratio = static_cast<double>(b) / static_cast<double>(a);
  CHECK(ratio > 1.7);
  CHECK(ratio < 2.3);
}

TEST_CASE("shell measures sum to the admissible set") {
  auto sq = LipschitzDomain::unit_square();
  auto sh = omega_h_shells(sq, {0.1, 0.0}, 2, 8, 9);
  double total = 0.0;
  for (double m : sh.by_level) total += m;
  CHECK(sh.admissible == doctest::Approx(0.8).epsilon(0.02));
  CHECK(total <= sh.admissible * (1 + 1e-9) * 2);
}

TEST_CASE("power gauge") {
  auto g = HGauge::power(1.0);
  CHECK(g(0.25) == doctest::Approx(0.25));
  CHECK(g.at_level(3) == doctest::Approx(0.125));
}

TEST_CASE("domain file round trip") {
  auto l = LipschitzDomain::l_shape();
  std::stringstream ss;
  write_domain(ss, l);
  auto back = parse_domain(ss);
  CHECK(back.area() == doctest::Approx(l.area()));
  std::istringstream bad("hexagon n=2\n0 0\n");
  CHECK_THROWS(parse_domain(bad));
}
