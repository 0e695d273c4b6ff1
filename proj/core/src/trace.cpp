#include "besovkit/trace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace besovkit {

BoundaryDecomposition::BoundaryDecomposition(const LipschitzDomain& dom)
    : domain(std::make_shared<const LipschitzDomain>(dom)) {
  if (dom.dim() != 2) throw std::invalid_argument("boundary decompositions need a planar domain");
  atoms.kind = AtomKind::lip_gamma;
  atoms.shape = AtomShape::bump;
  atoms.dim = 2;
  atoms.coefficients = CoefficientArray(Carrier::boundary, 2);
  atoms.box = dom.bounding_box();
}

double BoundaryDecomposition::operator()(Vec2 x) const {
  double v = 0.0;
  for (const auto& [j, lev] : atoms.coefficients.levels()) {
    for (const auto& [m, lam] : lev) {
      if (lam == 0.0) continue;
      const Atom a = atom(j, m);
      if (a.support().contains(x)) v += lam * a(x);
    }
  }
  return v;
}

std::vector<std::string> BoundaryDecomposition::validate() const {
  std::vector<std::string> out;
  for (const auto& [j, lev] : atoms.coefficients.levels()) {
    for (const auto& [m, lam] : lev) {
      if (lam == 0.0) continue;
      for (const auto& v : validate_atom(atom(j, m), domain.get()).violations) {
        std::ostringstream msg;
        msg << "atom j=" << j << " m=(" << m[0] << "," << m[1] << "): " << v;
        out.push_back(msg.str());
      }
    }
  }
  return out;
}

BoundaryDecomposition random_boundary_decomposition(const LipschitzDomain& domain, int J,
                                                    std::uint64_t seed, double decay) {
  BoundaryDecomposition g(domain);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int j = 0; j <= J; ++j) {
    const double w = std::exp2(-decay * j);
    for (const auto& m : cubes_meeting(domain, Carrier::boundary, j)) g.atoms.coefficients.set(j, m, w * nd(rng));
  }
  return g;
}

BoundaryDecomposition trace_restrict(const AtomicDecomposition& dec, const LipschitzDomain& domain) {
  if (dec.kind != AtomKind::lip && dec.kind != AtomKind::k_smooth) {
    throw std::invalid_argument("trace_restrict: atoms must be Lip or K-smooth");
  }
  if (dec.dim != 2) throw std::invalid_argument("trace_restrict: planar decompositions only");
  BoundaryDecomposition g(domain);
  g.atoms.shape = dec.shape;
  g.atoms.atom_params = dec.atom_params;
  g.atoms.d = dec.d;
  g.atoms.target = dec.target;
  g.atoms.grid_level = dec.grid_level;
  g.atoms.coefficients = dec.coefficients.restricted_to_boundary(domain);
  for (const auto& [j, lev] : g.atoms.coefficients.levels()) {
    for (const auto& [m, lam] : lev) {
      Atom a = dec.atom(j, m);
      if (dec.kind != AtomKind::lip || !dec.custom.empty()) {
        // keep the exact profile, relabelled
        const Atom src = a;
        a.kind = AtomKind::lip_gamma;
        a.custom = [src](Vec2 x) { return src(x); };
        a.custom_support = src.support();
        a.scale = 1.0;
        g.atoms.custom[{j, m}] = a;
      } else if (a.scale != 1.0) {
        g.atoms.scales[{j, m}] = a.scale;
      }
    }
  }
  return g;
}

ExtensionContext ExtensionContext::build(const LipschitzDomain& domain, int j_max, double gamma) {
  ExtensionContext ctx;
  ctx.cover = std::make_shared<const WhitneyCover>(whitney_decompose(domain, j_max, gamma));
  return ctx;
}

double extension_cutoff(double t) {
  const double u = std::abs(t) - 1.0;
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - u));
  const double b = std::exp(-1.0 / u);
  return a / (a + b);
}

Atom extend_boundary_atom(const Atom& a, const ExtensionContext& ctx, double s_prime, double p) {
  if (!ctx.cover) throw std::invalid_argument("extend_boundary_atom: missing cover");
  if (!(s_prime > 0.0 && s_prime < 1.0)) throw std::invalid_argument("extend_boundary_atom: need 0 < s' < 1");
  if (!(p > 0.0)) throw std::invalid_argument("extend_boundary_atom: need p > 0");
  const int need = a.level + ctx.margin;
  if (ctx.cover->j_max() < need) {
    std::ostringstream msg;
    msg << "extend_boundary_atom: level-" << a.level << " atom needs a cover with j_max >= " << need
        << " (have " << ctx.cover->j_max() << ")";
    throw std::invalid_argument(msg.str());
  }
  const LipschitzDomain& dom = ctx.cover->domain();
  auto profile = std::make_shared<const BoundaryFunction>(BoundaryFunction::sample(
      dom, std::ldexp(1.0, -ctx.cover->j_max()) / 4.0, [&a](Vec2 x) { return a(x); },
      std::ldexp(1.0, a.level)));

  Atom out;
  out.kind = AtomKind::sigma_p;
  out.shape = a.shape;
  out.level = a.level;
  out.index = a.index;
  out.dim = 2;
  out.d = std::max(a.d, 2.0);
  out.params = a.params;
  out.params.sigma = s_prime + 1.0 / p;
  out.params.p = p;
  out.amplitude = 1.0;
  out.custom_support = out.cube().dilated(2.0);
  if (profile->max_abs() == 0.0) {
    out.custom = [](Vec2) { return 0.0; };
    return out;
  }
  auto ext = std::make_shared<const WhitneyExtender>(*ctx.cover, *profile);
  const Vec2 c = out.cube().center();
  const int j = a.level;
  out.custom = [cover = ctx.cover, profile, ext, c, j](Vec2 x) {
    const double w = extension_cutoff(std::ldexp(x.x - c.x, j)) * extension_cutoff(std::ldexp(x.y - c.y, j));
    if (w == 0.0) return 0.0;
    return w * ext->value_or_project(x);
  };
  return out;
}

Box grid_box(const LipschitzDomain& domain, int level) {
  const Box b = domain.bounding_box();
  const double r = std::ldexp(1.0, level);
  return {{std::floor(b.lo.x * r) / r, std::floor(b.lo.y * r) / r},
          {std::ceil(b.hi.x * r) / r, std::ceil(b.hi.y * r) / r}};
}

AtomicDecomposition extend_boundary_function(const BoundaryDecomposition& g,
                                             const ExtensionContext& ctx, const BesovParams& params,
                                             std::optional<double> s_prime) {
  params.validate();
  if (!(params.s > 0.0 && params.s < 1.0)) throw std::invalid_argument("extend_boundary_function: need 0 < s < 1");
  const double sp = s_prime.value_or(0.5 * (params.s + 1.0));
  if (!(sp > params.s && sp < 1.0)) throw std::invalid_argument("extend_boundary_function: need s < s' < 1");
  if (!ctx.cover) throw std::invalid_argument("extend_boundary_function: missing cover");
  AtomicDecomposition out;
  out.kind = AtomKind::sigma_p;
  out.shape = g.atoms.shape;
  out.atom_params = g.atoms.atom_params;
  out.atom_params.sigma = sp + 1.0 / params.p;
  out.atom_params.p = params.p;
  out.d = std::max(g.atoms.d, 2.0);
  out.dim = 2;
  out.target = params;
  out.target.s = params.s + 1.0 / params.p;
  out.grid_level = ctx.cover->j_max();
  out.box = grid_box(*g.domain, out.grid_level);
  out.coefficients = g.coefficients().with_carrier(Carrier::domain);
  for (const auto& [j, lev] : out.coefficients.levels()) {
    for (const auto& [m, lam] : lev) {
      if (lam == 0.0) continue;
      out.custom[{j, m}] = extend_boundary_atom(g.atom(j, m), ctx, sp, params.p);
    }
  }
  return out;
}

namespace {

double evaluate_decomposition(const AtomicDecomposition& dec, Vec2 x) {
  double v = 0.0;
  for (const auto& [j, lev] : dec.coefficients.levels()) {
    for (const auto& [m, lam] : lev) {
      if (lam == 0.0) continue;
      const Atom a = dec.atom(j, m);
      if (a.support().contains(x)) v += lam * a(x);
    }
  }
  return v;
}

}  // namespace

std::vector<RoundtripReport> roundtrip_report(const BoundaryDecomposition& g,
                                              const ExtensionContext& ctx,
                                              const std::vector<BesovParams>& params,
                                              int grid_level) {
  std::vector<RoundtripReport> out;
  if (params.empty()) return out;
  const LipschitzDomain& dom = *g.domain;
  const auto ext = extend_boundary_function(g, ctx, params.front());
  const Box box = grid_box(dom, grid_level);
  const int top = std::max(0, ext.coefficients.max_level());
  const auto F = reconstruct(ext, top, box, grid_level);
  const double h = F.spacing();

  RoundtripReport base;
  const auto nodes = dom.boundary_samples(h);
  base.nodes = nodes.size();
  for (const auto& b : nodes) {
    const double gv = g(b.point);
    base.node_error = std::max(base.node_error, std::abs(F.evaluate(b.point) - gv));
    base.direct_error = std::max(base.direct_error, std::abs(evaluate_decomposition(ext, b.point) - gv));
  }
  // discrete Lipschitz constant of F next to the boundary
  double lip = 0.0;
  for (long iy = 0; iy < F.ny(); ++iy) {
    for (long ix = 0; ix < F.nx(); ++ix) {
      const Vec2 x = F.node(ix, iy);
      if (dom.distance_to_boundary(x) > 2.0 * h) continue;
      if (ix + 1 < F.nx()) lip = std::max(lip, std::abs(F.at(ix + 1, iy) - F.at(ix, iy)) / h);
      if (iy + 1 < F.ny()) lip = std::max(lip, std::abs(F.at(ix, iy + 1) - F.at(ix, iy)) / h);
    }
  }
  base.interpolation_tolerance = 2.0 * std::sqrt(2.0) * h * lip + 1e-12;

  const auto lipdec = decompose(F, params.front(), grid_level - 2, AtomKind::lip, {}, std::nullopt, 2.0, false);
  const auto trace_coeffs = lipdec.coefficients.restricted_to_boundary(dom);

  const Region region(dom);
  std::map<std::pair<double, int>, std::vector<double>> profiles;  // by (p, r)
  std::map<double, double> lp;
  for (const auto& prm : params) {
    prm.validate();
    RoundtripReport rep = base;
    const double sigma = prm.s + 1.0 / prm.p;
    BesovParams lifted = prm;
    lifted.s = sigma;
    lifted.r = static_cast<int>(std::floor(sigma)) + 1;
    const int jm = effective_j_max(F, lifted);
    auto& om = profiles[{prm.p, lifted.r}];
    if (static_cast<int>(om.size()) <= jm) om = modulus_profile(F, lifted, region, jm);
    if (!lp.count(prm.p)) lp[prm.p] = lp_quasinorm(F, prm.p, region);
    rep.extension_norm = besov_from_profile(lp[prm.p], om, sigma, prm.q, jm);
    rep.boundary_seq_norm = seq_norm_boundary(g.coefficients(), prm.s, prm.p, prm.q, &dom);
    rep.trace_seq_norm = seq_norm_boundary(trace_coeffs, prm.s, prm.p, prm.q, &dom);
    rep.ratio_ext = rep.boundary_seq_norm > 0.0 ? rep.extension_norm / rep.boundary_seq_norm : 0.0;
    rep.ratio_tr = rep.extension_norm > 0.0 ? rep.trace_seq_norm / rep.extension_norm : 0.0;
    out.push_back(rep);
  }
  return out;
}

RoundtripReport roundtrip_report(const BoundaryDecomposition& g, const ExtensionContext& ctx,
                                 const BesovParams& params, int grid_level) {
  return roundtrip_report(g, ctx, std::vector<BesovParams>{params}, grid_level).front();
}

NonlinearityWitness nonlinearity_witness(const ExtensionContext& ctx, int j, CubeIndex m,
                                         int grid_level) {
  if (j < 1) throw std::invalid_argument("nonlinearity_witness: need j >= 1");
  const LipschitzDomain& dom = ctx.cover->domain();
  const Atom fine = make_atom(AtomKind::lip_gamma, j, m, 2.0, {}, 2);
  BoundaryDecomposition g1(dom);
  g1.atoms.coefficients.set(j, m, 1.0);
  BoundaryDecomposition g2(dom);
  const CubeIndex mc{static_cast<std::int64_t>(std::floor(m[0] / 2.0 + 0.5)),
                     static_cast<std::int64_t>(std::floor(m[1] / 2.0 + 0.5))};
  Atom coarse = make_atom(AtomKind::lip_gamma, j - 1, mc, 2.0, {}, 2);
  coarse.custom = [fine](Vec2 x) { return fine(x); };
  coarse.custom_support = fine.support();
  g2.atoms.coefficients.set(j - 1, mc, -1.0);
  g2.atoms.custom[{j - 1, mc}] = coarse;

  const BesovParams params{0.5, 2, 2, 1, 8};
  const auto e1 = extend_boundary_function(g1, ctx, params);
  const auto e2 = extend_boundary_function(g2, ctx, params);
  NonlinearityWitness w;
  for (const auto& b : dom.boundary_samples(std::ldexp(1.0, -grid_level))) {
    w.trace_gap = std::max(w.trace_gap, std::abs(evaluate_decomposition(e1, b.point) +
                                                 evaluate_decomposition(e2, b.point)));
  }
  const Box box = grid_box(dom, grid_level);
  const auto f1 = reconstruct(e1, j, box, grid_level);
  const auto f2 = reconstruct(e2, j, box, grid_level);
  for (long iy = 0; iy < f1.ny(); ++iy) {
    for (long ix = 0; ix < f1.nx(); ++ix) {
      if (dom.contains(f1.node(ix, iy))) {
        w.extension_gap = std::max(w.extension_gap, std::abs(f1.at(ix, iy) + f2.at(ix, iy)));
      }
    }
  }
  return w;
}

}  // namespace besovkit
