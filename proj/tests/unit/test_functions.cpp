#include <cmath>
#include <sstream>

#include "besovkit/functions.hpp"
#include "doctest.h"

using namespace besovkit;

TEST_CASE("sampling and bilinear evaluation") {
  auto f = SampledFunction::sample(Box{{0, 0}, {1, 1}}, 3, 2,
                                   [](Vec2 p) { return 2 * p.x + 3 * p.y; });
  CHECK(f.nx() == 9);
  CHECK(f.evaluate({0.3, 0.7}) == doctest::Approx(2.7));
  CHECK(f.evaluate_or_zero({1.5, 0.5}) == 0.0);
  CHECK_THROWS_AS(f.evaluate({1.5, 0.5}), std::out_of_range);
  CHECK_THROWS_AS(SampledFunction::zeros(Box{{0, 0}, {0.3, 1}}, 3, 2), std::invalid_argument);
}

TEST_CASE("second difference of a quadratic is constant") {
  auto f = SampledFunction::sample(Box{{0, 0}, {1, 1}}, 5, 2, [](Vec2 p) { return p.x * p.x; });
  auto sq = LipschitzDomain::unit_square();
  const double h = 0.125;
  auto vals = difference_values(f, {h, 0}, 2, Region(sq));
  REQUIRE(!vals.empty());
  for (double v : vals) CHECK(v == doctest::Approx(2 * h * h).epsilon(1e-9));
}

TEST_CASE("whole-space differences see the jump at the box edge") {
  auto f = SampledFunction::sample(Box{{0, 0}, {1, 0}}, 4, 1, [](Vec2) { return 1.0; });
  auto vals = difference_values(f, {0.25, 0}, 1, Region::whole_space());
  // nonzero only where exactly one of x, x + h lies in [0,1]
  double ones = 0.0;
  for (double v : vals) ones += std::abs(v) > 0.5 ? 1.0 : 0.0;
  CHECK(ones == doctest::Approx(8.0));
}

TEST_CASE("lp quasinorm is exactly homogeneous under powers of two") {
  std::vector<double> v{0.1, -0.7, 0.3, 2.5};
  std::vector<double> w;
  for (double x : v) w.push_back(8 * x);
  for (double p : {0.5, 1.0, 2.0, 3.0}) {
    CHECK(lp_of_values(w, p, 0.25) == 8 * lp_of_values(v, p, 0.25));
  }
  CHECK(lp_of_values(v, INFINITY, 1.0) == 2.5);
}

TEST_CASE("dilation keeps values and moves the box") {
  auto f = SampledFunction::sample(Box{{-1, -1}, {1, 1}}, 4, 2, [](Vec2 p) { return p.x; });
  auto g = f.dilated(2);
  CHECK(g.level() == 2);
  CHECK(g.box().hi.x == 4.0);
  CHECK(g.evaluate({2.0, 0.0}) == doctest::Approx(f.evaluate({0.5, 0.0})));
}

TEST_CASE("cardinal B-splines") {
  CHECK(bspline_eval(1, 0.5) == 1.0);
  CHECK(bspline_eval(2, 1.0) == doctest::Approx(1.0));
  CHECK(bspline_eval(3, 1.5) == doctest::Approx(0.75));
  CHECK(bspline_eval(4, 2.0) == doctest::Approx(2.0 / 3));
  double integral = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) integral += bspline_eval(5, (i + 0.5) * 5.0 / n) * 5.0 / n;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("directional derivatives of closed-form functions") {
  auto p = SmoothTestFunction::polynomial({{0, 1}, {2}});  // y + 2x
  CHECK(p.value({1, 1}) == doctest::Approx(3));
  CHECK(p.directional_derivative({0, 0}, {1, 1}, 1) == doctest::Approx(3));
  auto m = SmoothTestFunction::monomial_x(3);
  CHECK(m.directional_derivative({1, 0}, {2, 0}, 2) == doctest::Approx(24));
  auto s = SmoothTestFunction::sine({1, 0});
  CHECK(s.directional_derivative({0, 0}, {1, 0}, 1) == doctest::Approx(1));
}

TEST_CASE("difference equals the spline-weighted derivative integral") {
  auto m = SmoothTestFunction::monomial_x(3);
  for (int k = 1; k <= 4; ++k) {
    auto r = difference_spline_identity(m, {0.1, 0.2}, {0.3, 0.1}, k);
    CHECK(r.gap < 1e-10);
  }
  auto s = SmoothTestFunction::sine({3, -2}, 0.4);
  auto r = difference_spline_identity(s, {0.2, 0.1}, {0.05, 0.07}, 3);
  CHECK(r.gap < 1e-12);
}

TEST_CASE("grid round trip") {
  auto f = SampledFunction::sample(Box{{0, 0}, {1, 1}}, 2, 2, [](Vec2 p) { return p.x - p.y; });
  std::stringstream ss;
  write_grid(ss, f);
  auto g = read_grid(ss);
  CHECK(g.same_grid(f));
  CHECK(g.at(3, 1) == f.at(3, 1));
  std::istringstream bad("grid J=2 box=0,0,1,1 n=2\n1 2 3\n");
  CHECK_THROWS_AS(read_grid(bad), std::invalid_argument);
}
