#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "besovkit/whitney.hpp"
#include "suites.hpp"

namespace besovkit::detail {

namespace {

LipschitzDomain domain_by_name(const std::string& name) {
  if (name == "square") return LipschitzDomain::unit_square();
  if (name == "lshape") return LipschitzDomain::l_shape();
  if (name == "sawtooth") return LipschitzDomain::sawtooth();
  try {
    return load_domain(name);
  } catch (const std::exception& e) {
    throw ConfigError("unknown domain '" + name + "' (square, lshape, sawtooth or a domain file): " + e.what());
  }
}

bool closed_contains(const Box& b, Vec2 x) {
  return x.x >= b.lo.x && x.x <= b.hi.x && x.y >= b.lo.y && x.y <= b.hi.y;
}

std::size_t disjoint_violations(const WhitneyCover& cover) {
  std::set<std::tuple<int, std::int64_t, std::int64_t>> cells;
  for (const auto& q : cover.cubes()) cells.insert({q.k, q.a, q.b});
  std::size_t bad = cover.cubes().size() - cells.size();
  for (const auto& q : cover.cubes()) {
    int k = q.k;
    std::int64_t a = q.a;
    std::int64_t b = q.b;
    while (k > 0) {
      --k;
      a >>= 1;
      b >>= 1;
      if (cells.count({k, a, b})) ++bad;
    }
  }
  return bad;
}

double variation(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*hi == 0.0) return 0.0;
  return *lo > 0.0 ? *hi / *lo - 1.0 : INFINITY;
}

struct RandomBoundaryFunction {
  double c[3], wx[3], wy[3], phase[3];
  double lipschitz = 0.0;

  RandomBoundaryFunction(std::uint64_t seed, double max_frequency) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 3; ++k) {
      c[k] = nd(rng);
      const double r = max_frequency * std::sqrt(u(rng));
      const double th = 2.0 * M_PI * u(rng);
      wx[k] = r * std::cos(th);
      wy[k] = r * std::sin(th);
      phase[k] = 2.0 * M_PI * u(rng);
      lipschitz += std::abs(c[k]) * r;
    }
  }
  double operator()(Vec2 x) const {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += c[k] * std::sin(wx[k] * x.x + wy[k] * x.y + phase[k]);
    return s;
  }
};

}  // namespace

void run_whitney_invariants(Suite& s) {
  const auto domains = s.words("domains", {"square", "lshape", "sawtooth"});
  const auto levels = s.ints("j_max", {5, 6, 7});
  const int points = s.integer("points", 10000);
  const double pu_tol = s.num("partition_tolerance", 1e-12);
  s.columns({"domain", "j_max", "cubes", "collar", "sandwich_violations", "disjoint_violations",
             "overlap_N0", "partition_defect", "support_violations"});

  struct Cell {
    std::size_t cubes = 0, collar = 0, sandwich = 0, disjoint = 0, support = 0;
    int n0 = 0;
    double pu = 0.0;
  };
  std::vector<LipschitzDomain> doms;
  for (const auto& d : domains) doms.push_back(domain_by_name(d));
  std::vector<Cell> cells(doms.size() * levels.size());
  parallel_for(cells.size(), s.options, [&](std::size_t t) {
    const std::size_t di = t / levels.size();
    const int J = levels[t % levels.size()];
    const auto cover = whitney_decompose(doms[di], J);
    Cell& c = cells[t];
    c.cubes = cover.cubes().size();
    c.collar = cover.collar().size();
    for (const auto& q : cover.cubes()) {
      if (!(q.diam <= q.dist && q.dist <= 4.0 * q.diam)) ++c.sandwich;
    }
    c.disjoint = disjoint_violations(cover);
    for (const Vec2& x : sample_domain_points(doms[di], points, s.seed(10 + di))) {
      c.n0 = std::max(c.n0, cover.overlap(x));
    }
    for (const Vec2& x : sample_admissible_points(cover, points, s.seed(20 + di))) {
      double sum = 0.0;
      for (const auto& [i, w] : partition_weights(cover, x)) {
        sum += w;
        if (!closed_contains(cover.cubes()[i].support(), x)) ++c.support;
      }
      c.pu = std::max(c.pu, std::abs(sum - 1.0));
    }
  });

  std::size_t sandwich = 0, disjoint = 0, support = 0;
  double pu = 0.0;
  bool overlap_stable = true;
  std::string overlap_detail;
  for (std::size_t di = 0; di < doms.size(); ++di) {
    std::set<int> n0s;
    for (std::size_t li = 0; li < levels.size(); ++li) {
      const Cell& c = cells[di * levels.size() + li];
      s.row({domains[di], std::to_string(levels[li]), std::to_string(c.cubes), std::to_string(c.collar),
             std::to_string(c.sandwich), std::to_string(c.disjoint), std::to_string(c.n0), fmt(c.pu),
             std::to_string(c.support)});
      sandwich += c.sandwich;
      disjoint += c.disjoint;
      support += c.support;
      pu = std::max(pu, c.pu);
      n0s.insert(c.n0);
    }
    overlap_stable = overlap_stable && n0s.size() == 1;
    overlap_detail += domains[di] + ":N0=";
    for (int n : n0s) overlap_detail += std::to_string(n) + (n == *n0s.rbegin() ? " " : "/");
  }
  s.check("sandwich", sandwich == 0, "violations=" + std::to_string(sandwich));
  s.check("disjoint", disjoint == 0, "violations=" + std::to_string(disjoint));
  s.check("overlap", overlap_stable, overlap_detail);
  s.check("partition", pu <= pu_tol, "max|sum psi - 1|=" + fmt(pu));
  s.check("support", support == 0, "violations=" + std::to_string(support));
}

void run_extension_bounds(Suite& s) {
  const auto domains = s.words("domains", {"square"});
  const auto levels = s.ints("j_max", {5, 6, 7});
  const int functions = s.integer("functions", 5);
  const double freq = s.num("max_frequency", 2.0);
  const std::string sampling = s.config.get(s.name, "sampling", "lattice");
  if (sampling != "lattice" && sampling != "random") throw ConfigError("config: sampling is lattice or random");
  s.result.parameters.emplace_back("sampling", sampling);
  const int per_cube = s.integer("points_per_cube", 256);
  const double gamma = s.num("gamma", 8.0);
  const double var_tol = s.num("variation_tolerance", 0.30);
  const double trace_tol = s.num("trace_tolerance", 1e-10);
  s.columns({"domain", "function", "j_max", "lipschitz", "c1", "c2", "c_mu", "trace_error", "points_used",
             "points_skipped"});

  struct Cell {
    double lip = 0, c1 = 0, c2 = 0, cmu = 0, tr = 0;
    std::size_t used = 0, skipped = 0;
  };
  std::vector<LipschitzDomain> doms;
  for (const auto& d : domains) doms.push_back(domain_by_name(d));
  const std::size_t nf = static_cast<std::size_t>(functions);
  std::vector<Cell> cells(doms.size() * nf * levels.size());
  parallel_for(doms.size() * nf, s.options, [&](std::size_t t) {
    const std::size_t di = t / nf;
    const std::size_t fi = t % nf;
    const RandomBoundaryFunction g(s.seed(100 + fi), freq);
    for (std::size_t li = 0; li < levels.size(); ++li) {
      const int J = levels[li];
      const auto cover = whitney_decompose(doms[di], J, gamma);
      const auto sampled = BoundaryFunction::sample(doms[di], std::ldexp(1.0, -J - 2), g, g.lipschitz);
      const BoundaryFunction a(doms[di], sampled.arclengths(), sampled.values(), sampled.measured_lipschitz());
      const WhitneyExtender ext(cover, a);
      const auto pts = sampling == "random"
                           ? sample_points_per_cube(cover, per_cube, s.seed(200 + J))
                           : lattice_points_per_cube(cover, static_cast<int>(std::lround(std::sqrt(per_cube))));
      const auto r1 = derivative_bound_report(ext, 1, pts);
      const auto r2 = derivative_bound_report(ext, 2, pts);
      Cell& c = cells[t * levels.size() + li];
      c.lip = a.lipschitz();
      c.c1 = r1.constant;
      c.c2 = r2.constant;
      c.cmu = mu_difference_constant_pairs(ext);
      for (std::size_t k = 0; k < a.points().size(); ++k) {
        c.tr = std::max(c.tr, std::abs(ext(a.points()[k]) - a.values()[k]));
      }
      c.used = r1.used;
      c.skipped = r1.skipped;
    }
  });

  double v1 = 0, v2 = 0, vmu = 0, tr = 0;
  for (std::size_t t = 0; t < doms.size() * nf; ++t) {
    std::vector<double> a1, a2, amu;
    for (std::size_t li = 0; li < levels.size(); ++li) {
      const Cell& c = cells[t * levels.size() + li];
      s.row({domains[t / nf], std::to_string(t % nf), std::to_string(levels[li]), fmt(c.lip), fmt(c.c1),
             fmt(c.c2), fmt(c.cmu), fmt(c.tr), std::to_string(c.used), std::to_string(c.skipped)});
      a1.push_back(c.c1);
      a2.push_back(c.c2);
      amu.push_back(c.cmu);
      tr = std::max(tr, c.tr);
    }
    v1 = std::max(v1, variation(a1));
    v2 = std::max(v2, variation(a2));
    vmu = std::max(vmu, variation(amu));
  }
  s.check("c1_stable", v1 <= var_tol, "max(max/min-1)=" + fmt(v1));
  s.check("c2_stable", v2 <= var_tol, "max(max/min-1)=" + fmt(v2));
  s.check("mu_stable", vmu <= var_tol, "max(max/min-1)=" + fmt(vmu));
  s.check("trace", tr <= trace_tol, "max|Tr Ext a - a|=" + fmt(tr));
}

void run_geom_shells(Suite& s) {
  const auto domains = s.words("domains", {"square", "sawtooth"});
  const int nh = s.integer("directions", 8);
  const int j_max = s.integer("j_max", 6);
  const int k = s.integer("k", 1);
  const int grid = s.integer("grid_level", 10);
  const double contraction_tol = s.num("contraction_tolerance", 0.8);
  s.columns({"domain", "h_x", "h_y", "j", "measure", "scaled_measure", "admissible", "truncated"});

  std::vector<LipschitzDomain> doms;
  for (const auto& d : domains) doms.push_back(domain_by_name(d));
  std::vector<Vec2> hs;
  std::mt19937_64 rng(s.seed(300));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < nh; ++i) {
    const double r = 0.02 + 0.1 * u(rng);
    const double th = 2.0 * M_PI * u(rng);
    hs.push_back({r * std::cos(th), r * std::sin(th)});
  }
  std::vector<ShellMeasures> shells(doms.size() * hs.size());
  parallel_for(shells.size(), s.options, [&](std::size_t t) {
    shells[t] = omega_h_shells(doms[t / hs.size()], hs[t % hs.size()], k, j_max, grid);
  });

  bool bounded = true;
  bool truncated = false;
  std::string detail;
  for (std::size_t di = 0; di < doms.size(); ++di) {
    std::vector<double> sup(static_cast<std::size_t>(j_max) + 1, 0.0);
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
      const auto& sh = shells[di * hs.size() + hi];
      truncated = truncated || sh.truncated;
      for (int j = 1; j <= j_max; ++j) {
        const double m = sh.by_level[static_cast<std::size_t>(j)];
        const double scaled = m * std::exp2(j);
        sup[static_cast<std::size_t>(j)] = std::max(sup[static_cast<std::size_t>(j)], scaled);
        s.row({domains[di], fmt(hs[hi].x), fmt(hs[hi].y), std::to_string(j), fmt(m), fmt(scaled),
               fmt(sh.admissible), fmt_bool(sh.truncated)});
      }
    }
    // sup_h |Omega^h_j| 2^j must settle: successive increments contract
    double worst = 0.0;
    for (int j = 4; j <= j_max; ++j) {
      const double inc = sup[j] - sup[j - 1];
      const double prev = sup[j - 1] - sup[j - 2];
      if (inc <= 0.0) continue;
      worst = std::max(worst, prev > 0.0 ? inc / prev : INFINITY);
    }
    const double last_inc = std::max(0.0, sup[j_max] - sup[j_max - 1]);
    const double r = std::min(worst, 0.99);
    const double c_fit = sup[j_max] + last_inc * r / (1.0 - r);
    bounded = bounded && worst <= contraction_tol;
    detail += domains[di] + ":C=" + fmt(c_fit) + ",contraction=" + fmt(worst) + " ";
  }
  s.result.parameters.emplace_back("fitted_constant", "sup_j(sup_h |Omega^h_j| 2^j) extrapolated geometrically");
  s.check("shells_bounded", bounded, detail);
  s.check("resolved", !truncated, truncated ? "a shell is thinner than the grid" : "all shells resolved");
}

}  // namespace besovkit::detail
