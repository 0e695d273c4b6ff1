#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "besovkit/atoms.hpp"
#include "besovkit/besov.hpp"
#include "besovkit/multipliers.hpp"
#include "suites.hpp"

namespace besovkit::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double bump(Vec2 x, double radius) {
  const double r2 = (x.x * x.x + x.y * x.y) / (radius * radius);
  return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
}

std::vector<std::pair<double, double>> pairs_from(const std::vector<double>& flat, const std::string& key) {
  if (flat.size() % 2 != 0) throw ConfigError("config: '" + key + "' needs an even number of entries");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < flat.size(); i += 2) out.emplace_back(flat[i], flat[i + 1]);
  return out;
}

}  // namespace

void run_homogeneity(Suite& s) {
  const auto ss = s.list("s", {0.3, 0.7});
  const auto pq = pairs_from(s.list("pq", {2, 2, 1, kInf, 0.5, 0.5}), "pq");
  const int k_max = s.integer("k_max", 5);
  const int level = s.integer("grid_level", 6);
  const int j_max = s.integer("j_max", 8);
  const double radius = s.num("bump_radius", 0.9);
  const double slope_tol = s.num("slope_tolerance", 0.15);
  const double spread_tol = s.num("spread_tolerance", 4.0);
  s.columns({"s", "p", "q", "k", "lambda", "dilated_norm", "original_norm", "ratio"});

  struct Job {
    double sv, p, q;
    int k;
  };
  std::vector<Job> jobs;
  for (double sv : ss)
    for (const auto& [p, q] : pq)
      for (int k = 0; k <= k_max; ++k) jobs.push_back({sv, p, q, k});
  std::vector<HomogeneityResult> out(jobs.size());
  parallel_for(jobs.size(), s.options, [&](std::size_t t) {
    const Job& jb = jobs[t];
    const double side = std::ldexp(1.0, -jb.k);
    const auto f = SampledFunction::sample(Box{{-side, -side}, {side, side}}, level + jb.k, 2,
                                           [&](Vec2 x) { return bump(x, radius * side); });
    out[t] = homogeneity_ratio(f, jb.k, BesovParams{jb.sv, jb.p, jb.q, 1, j_max});
  });

  double worst_slope = 0.0;
  double worst_spread = 1.0;
  const std::size_t per = static_cast<std::size_t>(k_max) + 1;
  for (std::size_t g = 0; g < jobs.size() / per; ++g) {
    std::vector<double> x;
    std::vector<double> y;
    double lo = kInf;
    double hi = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      const Job& jb = jobs[g * per + i];
      const auto& r = out[g * per + i];
      s.row({fmt(jb.sv), fmt(jb.p), fmt(jb.q), std::to_string(jb.k), fmt(std::ldexp(1.0, -jb.k)),
             fmt(r.dilated_norm), fmt(r.original_norm), fmt(r.ratio)});
      x.push_back(-jb.k);
      y.push_back(std::log2(r.ratio));
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    if (per >= 2) worst_slope = std::max(worst_slope, std::abs(fit_line(x, y).slope));
    worst_spread = std::max(worst_spread, hi / lo);
  }
  s.check("log_slope", worst_slope <= slope_tol, "max|slope|=" + fmt(worst_slope));
  s.check("spread", worst_spread <= spread_tol, "max(max/min)=" + fmt(worst_spread));
}

void run_modulus_closed_form(Suite& s) {
  const auto ps = s.list("p", {0.5, 1.0, 2.0});
  const int j_lo = s.integer("j_min", 3);
  const int j_hi = s.integer("j_max", 8);
  const int level = s.integer("grid_level", 12);
  const double tol = s.num("relative_tolerance", 0.05);
  s.columns({"p", "t", "omega", "closed_form", "relative_error"});
  const auto chi = SampledFunction::sample(Box{{-1, 0}, {1, 0}}, level, 1,
                                           [](Vec2 x) { return std::abs(x.x) <= 0.5 ? 1.0 : 0.0; });
  double worst = 0.0;
  for (double p : ps) {
    const BesovParams prm{0.1, p, 2, 1, j_hi};
    for (int j = j_lo; j <= j_hi; ++j) {
      const double t = std::ldexp(1.0, -j);
      const double w = modulus_of_smoothness(chi, t, prm, Region::whole_space());
      const double exact = std::pow(2.0 * t, 1.0 / p);
      const double err = std::abs(w - exact) / exact;
      worst = std::max(worst, err);
      s.row({fmt(p), fmt(t), fmt(w), fmt(exact), fmt(err)});
    }
  }
  s.check("closed_form", worst <= tol, "max relative error=" + fmt(worst));
}

void run_hidr_identity(Suite& s) {
  const int poly_count = s.integer("polynomials", 20);
  const int degree = s.integer("degree", 5);
  const int k_max = s.integer("k_max", 3);
  const int sines = s.integer("sines", 20);
  const int sine_k = s.integer("sine_k", 3);
  const int nodes = s.integer("nodes", 10000);
  const double poly_tol = s.num("polynomial_tolerance", 1e-8);
  const double sine_tol = s.num("sine_tolerance", 1e-6);
  s.columns({"family", "index", "k", "x", "y", "h_x", "h_y", "lhs", "rhs", "gap"});

  std::mt19937_64 rng(s.seed(400));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_point = [&] { return Vec2{u(rng), u(rng)}; };
  auto random_shift = [&] { return Vec2{0.5 * u(rng), 0.5 * u(rng)}; };
  double poly_gap = 0.0;
  for (int i = 0; i < poly_count; ++i) {
    std::vector<std::vector<double>> c(static_cast<std::size_t>(degree) + 1);
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) c[a].push_back(u(rng));
    }
    const auto f = SmoothTestFunction::polynomial(c);
    const Vec2 x = random_point();
    const Vec2 h = random_shift();
    for (int k = 1; k <= k_max; ++k) {
      const auto r = difference_spline_identity(f, x, h, k, nodes);
      poly_gap = std::max(poly_gap, r.gap);
      s.row({"polynomial", std::to_string(i), std::to_string(k), fmt(x.x), fmt(x.y), fmt(h.x), fmt(h.y),
             fmt(r.lhs), fmt(r.rhs), fmt(r.gap)});
    }
  }
  double sine_gap = 0.0;
  for (int i = 0; i < sines; ++i) {
    const Vec2 w{4.0 * u(rng), 4.0 * u(rng)};
    const auto f = SmoothTestFunction::sine(w, M_PI * u(rng));
    const Vec2 x = random_point();
    const Vec2 h = random_shift();
    const auto r = difference_spline_identity(f, x, h, sine_k, nodes);
    sine_gap = std::max(sine_gap, r.gap);
    s.row({"sine", std::to_string(i), std::to_string(sine_k), fmt(x.x), fmt(x.y), fmt(h.x), fmt(h.y),
           fmt(r.lhs), fmt(r.rhs), fmt(r.gap)});
  }
  s.check("polynomials", poly_gap <= poly_tol, "max gap=" + fmt(poly_gap));
  s.check("sines", sine_gap <= sine_tol, "max gap=" + fmt(sine_gap));
}

void run_gn_check(Suite& s) {
  const auto thetas = s.list("theta", {0.25, 0.5, 0.75});
  const auto a = s.list("params0", {0.2, 2, 2});
  const auto b = s.list("params1", {0.8, 1, kInf});
  const int level = s.integer("grid_level", 6);
  const int j_max = s.integer("j_max", 5);
  const double bound = s.num("constant", 4.0);
  if (a.size() != 3 || b.size() != 3) throw ConfigError("config: params0/params1 are s,p,q triples");
  s.columns({"function", "theta", "s", "p", "q", "lhs", "rhs", "ratio"});
  const BesovParams p0{a[0], a[1], a[2], 1, j_max};
  const BesovParams p1{b[0], b[1], b[2], 1, j_max};
  const Box box{{-1, -1}, {1, 1}};
  const auto fam = standard_test_family(box, level, 2);
  double worst = 0.0;
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    for (double th : thetas) {
      const auto r = gn_check(fam.members[i], p0, p1, th, Region::whole_space());
      worst = std::max(worst, r.ratio);
      s.row({std::to_string(i), fmt(th), fmt(r.interpolated.s), fmt(r.interpolated.p), fmt(r.interpolated.q),
             fmt(r.lhs), fmt(r.rhs), fmt(r.ratio)});
    }
  }
  s.result.parameters.emplace_back("family", fam.name);
  s.check("interpolation", worst <= bound, "max lhs/rhs=" + fmt(worst));
}

void run_trace_embedding(Suite& s) {
  const int arrays = s.integer("arrays", 1000);
  const int levels = s.integer("levels", 3);
  const auto ss = s.list("s", {0.1, 0.5, 0.9});
  const auto ps = s.list("p", {0.5, 2, kInf});
  const auto qs = s.list("q", {0.5, 2, kInf});
  s.columns({"s", "p", "q", "trials", "failures", "max_ratio"});
  const auto dom = LipschitzDomain::unit_square();
  std::vector<std::vector<std::array<std::int64_t, 2>>> cubes;
  for (int j = 0; j <= levels; ++j) cubes.push_back(cubes_meeting(dom, Carrier::domain, j));

  const std::size_t combos = ss.size() * ps.size() * qs.size();
  std::vector<int> failures(combos, 0);
  std::vector<double> max_ratio(combos, 0.0);
  std::mt19937_64 rng(s.seed(500));
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> keep(0.0, 1.0);
  for (int t = 0; t < arrays; ++t) {
    CoefficientArray a(Carrier::domain, 2);
    const double density = keep(rng);
    for (int j = 0; j <= levels; ++j) {
      for (const auto& m : cubes[static_cast<std::size_t>(j)]) {
        if (keep(rng) < density) a.set(j, m, nd(rng) * std::exp2(-j * keep(rng)));
      }
    }
    const auto g = a.restricted_to_boundary(dom);
    std::size_t c = 0;
    for (double sv : ss) {
      for (double p : ps) {
        for (double q : qs) {
          const double lhs = seq_norm_boundary(g, sv, p, q, &dom);
          const double rhs = seq_norm_domain(a, sv + (std::isinf(p) ? 0.0 : 1.0 / p), p, q);
          if (!(lhs <= rhs)) ++failures[c];
          if (rhs > 0.0) max_ratio[c] = std::max(max_ratio[c], lhs / rhs);
          ++c;
        }
      }
    }
  }
  int total = 0;
  std::size_t c = 0;
  for (double sv : ss) {
    for (double p : ps) {
      for (double q : qs) {
        s.row({fmt(sv), fmt(p), fmt(q), std::to_string(arrays), std::to_string(failures[c]), fmt(max_ratio[c])});
        total += failures[c];
        ++c;
      }
    }
  }
  s.check("embedding", total == 0, "failures=" + std::to_string(total) + " of " +
                                       std::to_string(arrays * static_cast<int>(combos)));
}

void run_todo3(Suite& s) {
  const int arrays = s.integer("arrays", 100);
  const auto alphas = s.list("alpha", {1, 1.5, 2, 4});
  const auto epss = s.list("eps", {0.1, 0.5});
  const int j_max = s.integer("j_max", 12);
  s.columns({"array", "J", "alpha", "eps", "lhs", "rhs", "constant", "holds"});
  std::mt19937_64 rng(s.seed(600));
  std::exponential_distribution<double> ex(1.0);
  std::uniform_int_distribution<int> depth(0, j_max);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int failures = 0;
  int total = 0;
  for (int t = 0; t < arrays; ++t) {
    const int J = depth(rng);
    const double decay = 2.0 * u(rng) - 0.5;
    std::vector<std::vector<double>> g;
    for (int j = 0; j <= J; ++j) {
      g.emplace_back();
      for (int k = 0; k <= j; ++k) g.back().push_back(ex(rng) * std::exp2(-decay * k));
    }
    for (double al : alphas) {
      for (double eps : epss) {
        const auto r = todo3_check(g, al, eps);
        ++total;
        if (!r.holds) ++failures;
        s.row({std::to_string(t), std::to_string(J), fmt(al), fmt(eps), fmt(r.lhs), fmt(r.rhs), fmt(r.constant),
               fmt_bool(r.holds)});
      }
    }
  }
  s.check("inequality", failures == 0,
          "failures=" + std::to_string(failures) + " of " + std::to_string(total));
}

}  // namespace besovkit::detail
