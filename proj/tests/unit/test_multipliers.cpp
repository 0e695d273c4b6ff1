#include <cmath>
#include <limits>
#include <sstream>

#include "besovkit/multipliers.hpp"
#include "doctest.h"

using namespace besovkit;

TEST_CASE("line fit") {
  const auto f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_line({1}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(fit_line({1, 1}, {0, 2}), std::invalid_argument);
}

TEST_CASE("constant multipliers") {
  const Box box{{-1, -1}, {1, 1}};
  const auto fam = standard_test_family(box, 5, 2);
  REQUIRE(fam.members.size() == 10);
  for (const auto& f : fam.members) CHECK(f.max_abs() > 0.0);
  const BesovParams prm{0.5, 2, 2, 1, 4};
  const auto one = SampledFunction::sample(box, 5, 2, [](Vec2) { return 1.0; });
  const auto r1 = multiplier_ratio(one, fam, prm, Region::whole_space());
  CHECK(r1.ratio == 1.0);
  for (double c : {2.0, -0.25}) {
    const auto m = SampledFunction::sample(box, 5, 2, [c](Vec2) { return c; });
    CHECK(multiplier_ratio(m, fam, prm, Region::whole_space()).ratio == std::abs(c));
  }
  const auto m3 = SampledFunction::sample(box, 5, 2, [](Vec2) { return 3.0; });
  CHECK(multiplier_ratio(m3, fam, prm, Region::whole_space()).ratio == doctest::Approx(3.0).epsilon(1e-13));
  const auto other = SampledFunction::sample(box, 4, 2, [](Vec2) { return 1.0; });
  CHECK_THROWS_AS(multiplier_ratio(other, fam, prm, Region::whole_space()), std::invalid_argument);
}

TEST_CASE("indicator of the square") {
  const auto prof = chi_profile(LipschitzDomain::unit_square(), 2.0, {0.3, 0.5}, {1.0, 2.0,
                                std::numeric_limits<double>::infinity()}, 7);
  REQUIRE(prof.omegas.size() == 7);
  CHECK(prof.lp == doctest::Approx(1.0).epsilon(0.02));
  CHECK(prof.slope_fit.slope == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(prof.rows.size() == 2 * 3 * 7);

  const auto inf = chi_sweep(prof, 0.5, std::numeric_limits<double>::infinity());
  double lo = inf.back().value;
  double hi = lo;
  for (const auto& r : inf) {
    if (r.j_max >= 1) {
      lo = std::min(lo, r.value);
      hi = std::max(hi, r.value);
    }
  }
  CHECK(hi / lo <= 1.5);

  const auto l1 = chi_sweep(prof, 0.5, 1.0);
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& r : l1) {
    x.push_back(r.j_max);
    y.push_back(r.value);
  }
  CHECK(fit_line(x, y).r2 >= 0.9);
  const auto below = chi_sweep(prof, 0.3, 1.0);
  CHECK(below.back().value - below[below.size() - 2].value < l1.back().value - l1[l1.size() - 2].value);

  std::ostringstream os;
  write_chi_csv(os, prof);
  CHECK(os.str().rfind("sigma,p,q,r,J_max,value\n", 0) == 0);
  CHECK_THROWS_AS(chi_profile(LipschitzDomain::unit_square(), 2.0, {1.2}, {1.0}, 6), std::invalid_argument);
}

TEST_CASE("h-set condition sums") {
  const auto g = HGauge::power(1.0);
  for (double s : {0.2, 0.35, 0.5, 0.65, 0.8}) {
    const auto h = hset_condition_sum(g, s, 2, 2, 2, 3);
    CHECK(std::abs(h.per_j.back() - h.closed_form) <= 1e-12 * h.closed_form);
    CHECK(h.divergent == (s >= 0.5));
    CHECK(h.partial_sums.size() == 9);
  }
  const double inf = std::numeric_limits<double>::infinity();
  const auto b = hset_condition_sum(g, 0.5, 2, inf, 2, 3);
  CHECK(b.sup == doctest::Approx(1.0));
  CHECK(!b.divergent);
  CHECK(hset_condition_sum(g, 0.6, 2, inf, 2, 3).divergent);

  std::vector<double> tab(40);
  for (int j = 0; j < 40; ++j) tab[j] = std::exp2(-j);
  const auto t = hset_condition_sum(HGauge::tabulated(tab), 0.2, 2, 2, 2, 3, 32);
  CHECK(t.closed_form < 0.0);
  CHECK(t.sup == doctest::Approx(hset_condition_sum(g, 0.2, 2, 2, 2, 3, 32).sup));
  CHECK_THROWS_AS(hset_condition_sum(HGauge::tabulated(tab), 0.2, 2, 2, 2, 3, 64), std::invalid_argument);
}

TEST_CASE("self-similar membership") {
  const auto f = SampledFunction::sample(Box{{-3, -3}, {3, 3}}, 4, 2, [](Vec2 x) {
    const double r2 = x.x * x.x + x.y * x.y;
    return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
  });
  SelfsimilarConfig cfg;
  cfg.max_dilation = 1;
  cfg.grid_level = 4;
  const auto m = selfsimilar_membership(f, {0.5, 2, 2, 1, 3}, cfg);
  CHECK(m.linf == doctest::Approx(1.0));
  CHECK(m.selfsimilar.value > 0.0);
  CHECK(m.holds(m.linf_ratio));
  CHECK(!m.holds(0.5 * m.linf_ratio));
}
