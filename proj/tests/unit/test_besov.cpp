#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "besovkit/besov.hpp"
#include "doctest.h"

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

using namespace besovkit;

namespace {

double smooth_bump(Vec2 x, double radius) {
  const double r2 = (x.x * x.x + x.y * x.y) / (radius * radius);
  return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((BesovParams{1.5, 2, 2, 1, 4}.validate()), std::invalid_argument);
  CHECK_NOTHROW((BesovParams{0.5, 0.5, kInf, 1, 4}.validate()));
}

TEST_CASE("modulus of an interval indicator is (2t)^{1/p}") {
  auto chi = SampledFunction::sample(Box{{-1, 0}, {1, 0}}, 12, 1,
                                     [](Vec2 x) { return std::abs(x.x) <= 0.5 ? 1.0 : 0.0; });
  for (double p : {0.5, 1.0, 2.0}) {
    BesovParams prm{0.1, p, 2, 1, 8};
    for (int j = 3; j <= 8; ++j) {
      const double t = std::ldexp(1.0, -j);
      const double w = modulus_of_smoothness(chi, t, prm, Region::whole_space());
      CHECK(w == doctest::Approx(std::pow(2 * t, 1 / p)).epsilon(0.05));
    }
  }
}

TEST_CASE("constants have zero modulus and norm |Omega|^{1/p}") {
  auto sq = LipschitzDomain::unit_square();
  auto one = SampledFunction::sample(Box{{0, 0}, {1, 1}}, 5, 2, [](Vec2) { return 1.0; });
  BesovParams prm{0.5, 2, 2, 1, 4};
  CHECK(modulus_of_smoothness(one, 0.5, prm, Region(sq)) == 0.0);
  CHECK(besov_norm_differences(one, prm, Region(sq)) == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(modulus_of_smoothness(one, 1.5, prm, Region(sq)), std::invalid_argument);
}

TEST_CASE("norm is nonincreasing in q") {
  auto f = SampledFunction::sample(Box{{-1, -1}, {1, 1}}, 6, 2,
                                   [](Vec2 x) { return smooth_bump(x, 0.6); });
  double prev = kInf;
  for (double q : {0.5, 1.0, 2.0, 4.0, kInf}) {
    const double v = besov_norm_differences(f, BesovParams{0.5, 2, q, 1, 5}, Region::whole_space());
    CHECK(v <= prev * (1 + 1e-12));
    prev = v;
  }
}

TEST_CASE("sequence norm examples") {
  CoefficientArray a(Carrier::domain, 2);
  a.set(0, {0, 0}, 1.0);
  CHECK(seq_norm_domain(a, 0.7, 0.5, 3.0) == doctest::Approx(1.0));
  CoefficientArray b(Carrier::domain, 2);
  for (int j = 0; j <= 5; ++j) b.set(j, {j, 1}, 1.0);
  CHECK(seq_norm_domain(b, 1.0, 2.0, 1.5) == doctest::Approx(std::pow(6.0, 1 / 1.5)));
  CHECK_THROWS_AS(seq_norm_boundary(b, 1, 2, 2), std::invalid_argument);
}

TEST_CASE("p = q sequence norm equals the flat sum") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  CoefficientArray a(Carrier::domain, 2);
  for (int j = 0; j < 4; ++j)
    for (int m = 0; m < 5; ++m) a.set(j, {m, -m}, u(rng));
  const double s = 0.4;
  const double p = 1.5;
  double flat = 0.0;
  for (const auto& [j, level] : a.levels())
    for (const auto& [m, v] : level) flat += std::pow(std::exp2(j * (s - 2 / p)) * std::abs(v), p);
  CHECK(seq_norm_domain(a, s, p, p) == doctest::Approx(std::pow(flat, 1 / p)).epsilon(1e-12));
}

TEST_CASE("boundary norm never exceeds the lifted domain norm") {
  auto sq = LipschitzDomain::unit_square();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    CoefficientArray a(Carrier::domain, 2);
    for (int j = 0; j <= 3; ++j)
      for (const auto& m : cubes_meeting(sq, Carrier::domain, j)) a.set(j, m, u(rng));
    const auto g = a.restricted_to_boundary(sq);
    for (double p : {0.5, 2.0, kInf}) {
      for (double q : {0.5, 1.0, kInf}) {
        CHECK(seq_norm_boundary(g, 0.3, p, q, &sq) <= seq_norm_domain(a, 0.3 + 1 / p, p, q));
      }
    }
  }
}

TEST_CASE("coefficient serialization round trip") {
  CoefficientArray a(Carrier::boundary, 2);
  a.set(2, {3, -1}, 0.25);
  a.set(0, {0, 0}, -1.5);
  std::stringstream ss;
  write_coefficients(ss, a);
  auto b = read_coefficients(ss);
  CHECK(b.carrier() == Carrier::boundary);
  CHECK(b.get(2, {3, -1}) == 0.25);
  CHECK(b.nonzero_count() == 2);
  std::istringstream bad("coefficients carrier=domain n=2\n1 2 x\n");
  CHECK_THROWS_AS(read_coefficients(bad), std::invalid_argument);
}

TEST_CASE("identity dilation gives homogeneity ratio one") {
  auto f = SampledFunction::sample(Box{{-1, -1}, {1, 1}}, 5, 2,
                                   [](Vec2 x) { return smooth_bump(x, 0.9); });
  auto r = homogeneity_ratio(f, 0, BesovParams{0.5, 2, 2, 1, 8});
  CHECK(r.ratio == 1.0);
  CHECK_THROWS_AS(homogeneity_ratio(f, 1, BesovParams{0.5, 2, 2, 1, 8}), std::invalid_argument);
}

TEST_CASE("self-similar window is a partition of unity") {
  CHECK(SelfsimilarConfig::partition_defect(Box{{-2, -2}, {2, 2}}, 2, 5) < 1e-12);
  CHECK(partition_profile(0.0) == doctest::Approx(1.0));
  CHECK(partition_profile(1.0) == 0.0);
}

TEST_CASE("self-similar norm of a constant equals the window norm") {
  BesovParams prm{0.5, 2, 2, 1, 3};
  SelfsimilarConfig cfg;
  cfg.max_dilation = 1;
  cfg.grid_level = 4;
  cfg.translations = {{0, 0}, {1, 0}};
  auto res = selfsimilar_norm([](Vec2) { return 1.0; }, prm, cfg);
  auto w = SampledFunction::sample(Box{{-1, -1}, {1, 1}}, 4, 2, [](Vec2 x) { return window(x, 2); });
  CHECK(res.value == doctest::Approx(besov_norm_differences(w, prm, Region::whole_space())));
  auto small = SampledFunction::sample(Box{{-1, -1}, {1, 1}}, 4, 2, [](Vec2) { return 1.0; });
  CHECK_THROWS_AS(selfsimilar_norm(small, prm, cfg), std::invalid_argument);
}

TEST_CASE("Gagliardo-Nirenberg with equal parameters is an identity") {
  auto f = SampledFunction::sample(Box{{-1, -1}, {1, 1}}, 5, 2,
                                   [](Vec2 x) { return smooth_bump(x, 0.7); });
  BesovParams a{0.4, 2, 2, 1, 4};
  auto r = gn_check(f, a, a, 0.5, Region::whole_space());
  CHECK(r.ratio == 1.0);
  BesovParams b{0.8, 2, 2, 1, 4};
  auto r2 = gn_check(f, a, b, 0.5, Region::whole_space());
  CHECK(r2.interpolated.s == doctest::Approx(0.6));
  CHECK(r2.ratio < 2.0);
}
