#include <cmath>
#include <map>
#include <tuple>
#include <set>
#include <sstream>

#include "besovkit/whitney.hpp"
#include "doctest.h"

using namespace besovkit;

namespace {
bool closed_contains_helper(const Box& b, Vec2 x) {
  return x.x >= b.lo.x && x.x <= b.hi.x && x.y >= b.lo.y && x.y <= b.hi.y;
}
}  // namespace

TEST_CASE("accepted cubes satisfy the Whitney sandwich and are disjoint") {
  for (const auto& dom : {LipschitzDomain::unit_square(), LipschitzDomain::l_shape(),
                          LipschitzDomain::sawtooth()}) {
    auto cover = whitney_decompose(dom, 6);
    REQUIRE(!cover.cubes().empty());
    for (const auto& q : cover.cubes()) {
      CHECK(q.diam <= q.dist);
      CHECK(q.dist <= 4 * q.diam);
    }
    // disjoint: no accepted cell has an accepted ancestor
    std::set<std::tuple<int, std::int64_t, std::int64_t>> cells;
    for (const auto& q : cover.cubes()) cells.insert({q.k, q.a, q.b});
    CHECK(cells.size() == cover.cubes().size());
    for (const auto& q : cover.cubes()) {
      int k = q.k;
      std::int64_t a = q.a;
      std::int64_t b = q.b;
      while (k > 0) {
        --k;
        a = a >> 1;
        b = b >> 1;
        CHECK(cells.count({k, a, b}) == 0);
      }
    }
  }
}

TEST_CASE("accepted counts per level double near the boundary") {
  auto cover = whitney_decompose(LipschitzDomain::unit_square(), 8);
  std::map<int, int> by_level;
  for (const auto& q : cover.cubes()) ++by_level[q.cube.level];
  for (int j = 5; j <= 7; ++j) {
    const double r = static_cast<double>(by_level[j + 1]) / by_level[j];
    CHECK(r == doctest::Approx(2.0).epsilon(0.25));
  }
}

TEST_CASE("partition of unity and support") {
  auto cover = whitney_decompose(LipschitzDomain::l_shape(), 6);
  auto pts = sample_admissible_points(cover, 2000, 5);
  for (const Vec2& x : pts) {
    double s = 0.0;
    for (const auto& [i, w] : partition_weights(cover, x)) {
      s += w;
      CHECK(closed_contains_helper(cover.cubes()[i].support(), x));
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(partition_weights(cover, {0.75, 0.75}), std::out_of_range);
  CHECK_THROWS_AS(partition_weights(cover, {1e-4, 0.3}), std::out_of_range);
}

TEST_CASE("boundary averages") {
  auto sq = LipschitzDomain::unit_square();
  auto c = BoundaryFunction::sample(sq, 1.0 / 64, [](Vec2) { return 2.5; }, 0.0);
  DyadicCube q{4, {5, 1}, 2};
  CHECK(boundary_average(c, q, 3.0) == doctest::Approx(2.5).epsilon(1e-14));
  // a = x on the bottom edge, box symmetric about x = 5/16
  auto lin = BoundaryFunction::sample(sq, 1.0 / 64, [](Vec2 p) { return p.x; }, 1.0);
  CHECK(boundary_average(lin, q, 1.5) == doctest::Approx(5.0 / 16));
  CHECK_THROWS_AS(boundary_average(lin, DyadicCube{5, {16, 16}, 2}, 1.0), std::runtime_error);
  CHECK(lin.integral(0.0, 1.0) == doctest::Approx(0.5));
  CHECK(lin.measured_lipschitz() <= 1.0 + 1e-12);
}

TEST_CASE("extension reproduces constants and boundary values") {
  auto sq = LipschitzDomain::unit_square();
  auto cover = whitney_decompose(sq, 6, 8.0);
  auto c = BoundaryFunction::sample(sq, 1.0 / 128, [](Vec2) { return -1.25; }, 0.0);
  WhitneyExtender ext(cover, c);
  for (const Vec2& x : sample_admissible_points(cover, 300, 9)) {
    CHECK(ext(x) == doctest::Approx(-1.25).epsilon(1e-13));
  }
  auto g = BoundaryFunction::sample(sq, 1.0 / 128,
                                    [](Vec2 p) { return std::sin(3 * p.x) + p.y * p.y; }, 5.0);
  WhitneyExtender eg(cover, g);
  for (std::size_t k = 0; k < g.points().size(); k += 7) {
    CHECK(std::abs(eg(g.points()[k]) - g.values()[k]) <= 1e-10);
  }
  CHECK_THROWS_AS(eg({1e-4, 0.5}), std::out_of_range);
  CHECK(eg.value_or_project({1e-4, 0.5}) == doctest::Approx(g({0, 0.5})));
}

TEST_CASE("extension of a linear boundary function stays close to it") {
  auto sq = LipschitzDomain::unit_square();
  auto cover = whitney_decompose(sq, 7, 8.0);
  auto g = BoundaryFunction::sample(sq, 1.0 / 256, [](Vec2 p) { return p.x; }, 1.0);
  WhitneyExtender ext(cover, g);
  for (const Vec2& x : sample_admissible_points(cover, 300, 4)) {
    if (x.y > 0.25) continue;  // near the bottom edge only
    CHECK(std::abs(ext(x) - x.x) <= 6.0 * sq.distance_to_boundary(x));
  }
}

TEST_CASE("derivative report of a constant is zero") {
  auto sq = LipschitzDomain::unit_square();
  auto cover = whitney_decompose(sq, 5, 8.0);
  auto c = BoundaryFunction::sample(sq, 1.0 / 64, [](Vec2) { return 1.0; }, 0.0);
  WhitneyExtender ext(cover, c);
  auto rep = derivative_bound_report(ext, 1, sample_admissible_points(cover, 50, 1));
  CHECK(rep.constant == 0.0);
  CHECK(rep.used > 0);
}

TEST_CASE("cover dump") {
  auto cover = whitney_decompose(LipschitzDomain::unit_square(), 4);
  std::ostringstream out;
  write_cover(out, cover);
  const std::string s = out.str();
  CHECK(s.find("collar count=") != std::string::npos);
  CHECK(s.find(" nan\n") != std::string::npos);
}

TEST_CASE("default gamma can miss the boundary and the failure names the cube") {
  auto sq = LipschitzDomain::unit_square();
  auto cover = whitney_decompose(sq, 6);
  auto c = BoundaryFunction::sample(sq, 1.0 / 64, [](Vec2) { return 1.0; }, 0.0);
  CHECK_THROWS_WITH_AS(WhitneyExtender(cover, c), doctest::Contains("cube j="), std::runtime_error);
}
