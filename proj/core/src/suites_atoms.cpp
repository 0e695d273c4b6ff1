#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "besovkit/atoms.hpp"
#include "besovkit/multipliers.hpp"
#include "besovkit/trace.hpp"
#include "suites.hpp"

namespace besovkit::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::pair<double, double>> pairs_from(const std::vector<double>& flat, const std::string& key) {
  if (flat.size() % 2 != 0) throw ConfigError("config: '" + key + "' needs an even number of entries");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < flat.size(); i += 2) out.emplace_back(flat[i], flat[i + 1]);
  return out;
}

double spread(double a, double b) {
  const double lo = std::min(a, b);
  return lo > 0.0 ? std::max(a, b) / lo - 1.0 : kInf;
}

}  // namespace

void run_atom_roundtrip(Suite& s) {
  const auto kinds = s.words("kinds", {"k-smooth", "sigma-p"});
  const int level = s.integer("grid_level", 7);
  const int J = s.integer("J", 5);
  const int top = s.integer("atom_levels", 4);
  const double p = s.num("p", 2.0);
  const double tol = s.num("recovery_tolerance", 1e-6);
  s.columns({"kind", "j", "m1", "m2", "lambda", "recovered", "max_other", "reconstruction_error",
             "residual_monotone"});
  const Box box{{-1, -1}, {1, 1}};
  std::mt19937_64 rng(s.seed(700));
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  double worst = 0.0;
  bool monotone = true;
  for (const auto& kname : kinds) {
    AtomKind kind;
    try {
      kind = parse_atom_kind(kname);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    for (int j = 0; j <= top; ++j) {
      // center inside the box; the atom may be cut by the box edge
      const std::int64_t lim = (std::int64_t{1} << j) - 1;
      std::uniform_int_distribution<std::int64_t> um(-lim, lim);
      // a center that is already a coarser node is taken by that level,
      // so plant on nodes new at level j (some index odd)
      CubeIndex m{um(rng), um(rng)};
      while (j > 0 && ((m[0] | m[1]) & 1) == 0) m = {um(rng), um(rng)};
      const double lambda = u(rng);
      const Atom a = make_atom(kind, j, m, 2.0, {}, 2);
      const auto f = SampledFunction::sample(box, level, 2, [&](Vec2 x) { return lambda * a(x); });
      const auto dec = decompose(f, BesovParams{0.5, p, 2, 1, 8}, J, kind);
      const double got = dec.coefficients.get(j, m);
      double others = 0.0;
      for (const auto& [lj, lev] : dec.coefficients.levels()) {
        for (const auto& [lm, v] : lev) {
          if (lj != j || lm != m) others = std::max(others, std::abs(v));
        }
      }
      const auto rec = reconstruct(dec, J);
      double err = 0.0;
      for (std::size_t i = 0; i < rec.size(); ++i) err = std::max(err, std::abs(rec.values()[i] - f.values()[i]));
      bool mono = true;
      for (std::size_t i = 1; i < dec.residual_lp.size(); ++i) {
        mono = mono && dec.residual_lp[i] <= dec.residual_lp[i - 1] * (1.0 + 1e-12);
      }
      monotone = monotone && mono;
      worst = std::max({worst, std::abs(got - lambda), others});
      s.row({kname, std::to_string(j), std::to_string(m[0]), std::to_string(m[1]), fmt(lambda), fmt(got),
             fmt(others), fmt(err), fmt_bool(mono)});
    }
  }
  s.check("recovery", worst <= tol, "max coefficient error=" + fmt(worst));
  s.check("residual_monotone", monotone, monotone ? "L_p residual nonincreasing" : "residual grew");
}

void run_reexpand(Suite& s) {
  const auto pq = pairs_from(s.list("pq", {2, 2, 1, 2, 0.5, 1, kInf, kInf}), "pq");
  const auto grids = s.ints("grid_levels", {6, 7});
  const int levels = s.integer("source_levels", 2);
  const double sigma = s.num("sigma", 0.6);
  const double sv = s.num("s", 0.4);
  const int K = s.integer("K", 2);
  const double agree_tol = s.num("agreement_tolerance", 1e-4);
  const double var_tol = s.num("variation_tolerance", 0.30);
  if (grids.size() != 2) throw ConfigError("config: reexpand.grid_levels needs two resolutions");
  s.columns({"p", "q", "grid_level", "lambda_norm", "nu_norm", "C", "agreement", "max_overlap",
             "max_inner_norm"});

  const Box box{{-1, -1}, {1, 1}};
  CoefficientArray lambda(Carrier::domain, 2);
  std::mt19937_64 rng(s.seed(800));
  std::normal_distribution<double> nd;
  for (int j = 0; j <= levels; ++j) {
    const std::int64_t n = std::int64_t{1} << j;
    for (std::int64_t a = -n + 1; a < n; ++a) {
      for (std::int64_t b = -n + 1; b < n; ++b) lambda.set(j, {a, b}, nd(rng));
    }
  }
  struct Cell {
    double lam = 0, nu = 0, agreement = 0, inner = 0;
    int overlap = 0;
  };
  std::vector<Cell> cells(pq.size() * grids.size());
  parallel_for(cells.size(), s.options, [&](std::size_t t) {
    const auto [p, q] = pq[t / grids.size()];
    AtomicDecomposition dec;
    dec.kind = AtomKind::sigma_p;
    dec.shape = AtomShape::tent;
    dec.atom_params = AtomParams{K, sigma, p};
    dec.box = box;
    dec.grid_level = grids[t % grids.size()];
    dec.coefficients = lambda;
    const auto res = reexpand(dec, K, sv);
    Cell& c = cells[t];
    c.lam = seq_norm_domain(lambda, sv, p, q);
    c.nu = seq_norm_domain(res.output.coefficients, sv, p, q);
    c.agreement = res.agreement;
    c.overlap = res.max_overlap;
    c.inner = res.max_inner_norm;
  });
  double agreement = 0.0;
  double worst = 0.0;
  std::string detail;
  for (std::size_t i = 0; i < pq.size(); ++i) {
    double cs[2];
    for (std::size_t g = 0; g < 2; ++g) {
      const Cell& c = cells[i * 2 + g];
      cs[g] = c.nu / c.lam;
      agreement = std::max(agreement, c.agreement);
      s.row({fmt(pq[i].first), fmt(pq[i].second), std::to_string(grids[g]), fmt(c.lam), fmt(c.nu), fmt(cs[g]),
             fmt(c.agreement), std::to_string(c.overlap), fmt(c.inner)});
    }
    worst = std::max(worst, spread(cs[0], cs[1]));
    detail += "(" + fmt(pq[i].first) + "," + fmt(pq[i].second) + "):C=" + fmt(cs[0]) + "/" + fmt(cs[1]) + " ";
  }
  s.check("agreement", agreement <= agree_tol, "max sup error=" + fmt(agreement));
  s.check("constant_stable", worst <= var_tol, detail + "max(max/min-1)=" + fmt(worst));
}

void run_trace_roundtrip(Suite& s) {
  const int count = s.integer("decompositions", 10);
  const int J = s.integer("boundary_levels", 2);
  const auto ss = s.list("s", {0.3, 0.5, 0.7});
  const auto pq = pairs_from(s.list("pq", {2, 2, 0.5, 0.5}), "pq");
  const auto grids = s.ints("grid_levels", {6, 7});
  const int cover_level = s.integer("cover_j_max", 6);
  const double gamma = s.num("gamma", 8.0);
  const double band = s.num("band", 64.0);
  const double var_tol = s.num("variation_tolerance", 0.30);
  if (grids.size() != 2) throw ConfigError("config: trace-roundtrip.grid_levels needs two resolutions");
  s.columns({"decomposition", "grid_level", "s", "p", "q", "node_error", "interpolation_tolerance",
             "direct_error", "extension_norm", "boundary_seq_norm", "trace_seq_norm", "ratio_ext", "ratio_tr"});

  const auto dom = LipschitzDomain::unit_square();
  const auto ctx = ExtensionContext::build(dom, cover_level, gamma);
  std::vector<BesovParams> params;
  for (const auto& [p, q] : pq) {
    for (double sv : ss) params.push_back(BesovParams{sv, p, q, 1, 8});
  }
  std::vector<std::vector<RoundtripReport>> reps(static_cast<std::size_t>(count) * grids.size());
  parallel_for(reps.size(), s.options, [&](std::size_t t) {
    const auto g = random_boundary_decomposition(dom, J, s.seed(900 + t / grids.size()));
    reps[t] = roundtrip_report(g, ctx, params, grids[t % grids.size()]);
  });

  bool nodes_ok = true;
  double direct = 0.0;
  // C[g][param] = max over decompositions of max(r, 1/r)
  std::vector<std::vector<double>> c_ext(grids.size(), std::vector<double>(params.size(), 1.0));
  std::vector<std::vector<double>> c_tr = c_ext;
  auto fold = [](double r) { return r > 0.0 ? std::max(r, 1.0 / r) : kInf; };
  for (std::size_t t = 0; t < reps.size(); ++t) {
    const std::size_t gi = t % grids.size();
    for (std::size_t k = 0; k < params.size(); ++k) {
      const auto& r = reps[t][k];
      nodes_ok = nodes_ok && r.trace_ok();
      direct = std::max(direct, r.direct_error);
      c_ext[gi][k] = std::max(c_ext[gi][k], fold(r.ratio_ext));
      c_tr[gi][k] = std::max(c_tr[gi][k], fold(r.ratio_tr));
      s.row({std::to_string(t / grids.size()), std::to_string(grids[gi]), fmt(params[k].s), fmt(params[k].p),
             fmt(params[k].q), fmt(r.node_error), fmt(r.interpolation_tolerance), fmt(r.direct_error),
             fmt(r.extension_norm), fmt(r.boundary_seq_norm), fmt(r.trace_seq_norm), fmt(r.ratio_ext),
             fmt(r.ratio_tr)});
    }
  }
  auto judge = [&](const std::vector<std::vector<double>>& c, const std::string& what) {
    double worst_var = 0.0;
    double worst_c = 1.0;
    std::string detail;
    for (std::size_t k = 0; k < params.size(); ++k) {
      worst_var = std::max(worst_var, spread(c[0][k], c[1][k]));
      worst_c = std::max({worst_c, c[0][k], c[1][k]});
      detail += "(s=" + fmt(params[k].s) + ",p=" + fmt(params[k].p) + "):" + fmt(c[0][k]) + "->" + fmt(c[1][k]) + " ";
    }
    s.check(what + "_band", worst_var <= var_tol && worst_c <= band,
            detail + "max C=" + fmt(worst_c) + " max(max/min-1)=" + fmt(worst_var));
  };
  s.check("node_trace", nodes_ok, "direct error=" + fmt(direct));
  judge(c_ext, "extension");
  judge(c_tr, "trace");
}

void run_chi_profile(Suite& s) {
  const double p = s.num("p", 2.0);
  const auto sigmas = s.list("sigma", {0.2, 0.35, 0.5, 0.65, 0.8});
  const auto qs = s.list("q", {1.0, 2.0, kInf});
  const int level = s.integer("grid_level", 8);
  const int r = s.integer("r", 1);
  const double r2_min = s.num("linear_r2", 0.9);
  const double spread_max = s.num("bounded_spread", 1.5);
  const std::string dname = s.config.get(s.name, "domain", "square");
  s.result.parameters.emplace_back("domain", dname);
  LipschitzDomain dom = LipschitzDomain::unit_square();
  if (dname == "lshape") {
    dom = LipschitzDomain::l_shape();
  } else if (dname == "sawtooth") {
    dom = LipschitzDomain::sawtooth();
  } else if (dname != "square") {
    try {
      dom = load_domain(dname);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  auto prof = chi_profile(dom, p, sigmas, qs, level, r);
  const double crit = 1.0 / p;
  auto rows1 = chi_sweep(prof, crit, 1.0);
  auto rowsinf = chi_sweep(prof, crit, kInf);
  s.columns({"sigma", "p", "q", "r", "J_max", "value"});
  for (const auto& row : prof.rows) {
    s.row({fmt(row.sigma), fmt(p), fmt(row.q), std::to_string(r), std::to_string(row.j_max), fmt(row.value)});
  }
  s.result.parameters.emplace_back("modulus_slope", fmt(prof.slope_fit.slope));
  s.result.parameters.emplace_back("modulus_slope_r2", fmt(prof.slope_fit.r2));
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& row : rows1) {
    x.push_back(row.j_max);
    y.push_back(row.value);
  }
  const auto lin = fit_line(x, y);
  double lo = kInf;
  double hi = 0.0;
  for (const auto& row : rowsinf) {
    lo = std::min(lo, row.value);
    hi = std::max(hi, row.value);
  }
  s.check("q1_linear", lin.r2 >= r2_min && lin.slope > 0.0,
          "slope=" + fmt(lin.slope) + " R2=" + fmt(lin.r2));
  s.check("qinf_bounded", hi / lo <= spread_max, "max/min=" + fmt(hi / lo));
}

void run_hset_sum(Suite& s) {
  const int n = s.integer("n", 2);
  const double d = s.num("d", n - 1.0);
  const double p = s.num("p", 2.0);
  const double q = s.num("q", 2.0);
  const auto sigmas = s.list("sigma", {0.2, 0.35, 0.5, 0.65, 0.8});
  const int J = s.integer("J", 3);
  const int K = s.integer("K_max", 256);
  const double tol = s.num("closed_form_tolerance", 1e-12);
  s.columns({"sigma", "q", "K", "partial_sum", "closed_form", "divergent"});
  const auto gauge = HGauge::power(d);
  const double critical = (n - d) / p;
  double worst = 0.0;
  bool classified = true;
  std::string detail;
  for (double sg : sigmas) {
    const auto h = hset_condition_sum(gauge, sg, p, q, n, J, K);
    const double err = std::abs(h.sup - h.closed_form) / h.closed_form;
    worst = std::max(worst, err);
    const bool expect = sg >= critical;
    classified = classified && h.divergent == expect;
    detail += fmt(sg) + (h.divergent ? ":div " : ":conv ");
    for (std::size_t i = 0; i < h.k_checkpoints.size(); ++i) {
      s.row({fmt(sg), fmt(q), std::to_string(h.k_checkpoints[i]), fmt(h.partial_sums[i]), fmt(h.closed_form),
             fmt_bool(h.divergent)});
    }
  }
  const auto bounded = hset_condition_sum(gauge, critical, p, kInf, n, J, K);
  for (std::size_t i = 0; i < bounded.k_checkpoints.size(); ++i) {
    s.row({fmt(critical), "inf", std::to_string(bounded.k_checkpoints[i]), fmt(bounded.partial_sums[i]),
           fmt(bounded.closed_form), fmt_bool(bounded.divergent)});
  }
  s.check("closed_form", worst <= tol, "max relative error=" + fmt(worst));
  s.check("classification", classified, detail + "(critical sigma=" + fmt(critical) + ")");
  s.check("qinf_critical_bounded", !bounded.divergent, "sup=" + fmt(bounded.sup));
}

}  // namespace besovkit::detail
