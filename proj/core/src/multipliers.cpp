#include "besovkit/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace besovkit {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

NamedFamily standard_test_family(const Box& box, int level, int dim) {
  NamedFamily fam;
  fam.name = "bumps(w=0.15,0.25,0.35,0.45;4 centers)+windowed-sines(k=1,2,3;w=0.4)+wide-bump";
  const Vec2 c = box.center();
  const double ex = 0.5 * (box.hi.x - box.lo.x);
  const double ey = dim == 2 ? 0.5 * (box.hi.y - box.lo.y) : 0.0;
  const double size = dim == 2 ? std::min(ex, ey) : ex;
  auto bump = [dim](Vec2 x, Vec2 ctr, double w) {
    const double dx = x.x - ctr.x;
    const double dy = dim == 2 ? x.y - ctr.y : 0.0;
    const double r2 = (dx * dx + dy * dy) / (w * w);
    return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
  };
  const double widths[] = {0.15, 0.25, 0.35, 0.45};
  const Vec2 offsets[] = {{0, 0}, {0.2, 0.1}, {-0.25, 0.2}, {0.1, -0.3}};
  for (int i = 0; i < 4; ++i) {
    const Vec2 ctr{c.x + offsets[i].x * size, c.y + (dim == 2 ? offsets[i].y * size : 0.0)};
    const double w = widths[i] * size;
    fam.members.push_back(SampledFunction::sample(box, level, dim, [=](Vec2 x) { return bump(x, ctr, w); }));
  }
  for (int k = 1; k <= 3; ++k) {
    const double w = 0.4 * size;
    fam.members.push_back(SampledFunction::sample(box, level, dim, [=](Vec2 x) {
      const double arg = M_PI * k * ((x.x - c.x) + (dim == 2 ? 0.5 * (x.y - c.y) : 0.0)) / w;
      return std::sin(arg + 0.3) * bump(x, c, w);
    }));
  }
  for (int i = 0; i < 2; ++i) {
    const Vec2 ctr{c.x - 0.15 * size * (i + 1), c.y + (dim == 2 ? 0.1 * size : 0.0)};
    fam.members.push_back(SampledFunction::sample(box, level, dim, [=](Vec2 x) {
      return bump(x, ctr, 0.2 * size) - 0.5 * bump(x, c, 0.3 * size);
    }));
  }
  fam.members.push_back(SampledFunction::sample(box, level, dim, [=](Vec2 x) { return bump(x, c, 0.9 * size); }));
  return fam;
}

MultiplierReport multiplier_ratio(const SampledFunction& m, const NamedFamily& family,
                                  const BesovParams& params, const Region& region) {
  params.validate();
  MultiplierReport rep;
  rep.family = family.name;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& f = family.members[i];
    if (!m.same_grid(f)) throw std::invalid_argument("multiplier_ratio: grid mismatch in '" + family.name + "'");
    const double nf = besov_norm_differences(f, params, region);
    if (nf == 0.0) {
      rep.ratios.push_back(0.0);
      continue;
    }
    const double r = besov_norm_differences(m.multiplied(f), params, region) / nf;
    rep.ratios.push_back(r);
    if (r > rep.ratio) {
      rep.ratio = r;
      rep.argmax = i;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

ChiProfile chi_profile(const LipschitzDomain& domain, double p, const std::vector<double>& sigmas,
                       const std::vector<double>& qs, int grid_level, int r) {
  if (r < 1) throw std::invalid_argument("chi_profile: r must be >= 1");
  if (grid_level - r < 1) throw std::invalid_argument("chi_profile: grid too coarse for the sweep");
  for (double s : sigmas) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("chi_profile: sigma must lie in (0,1)");
  }
  const Box bb = domain.bounding_box();
  const double sc = std::ldexp(1.0, grid_level);
  Box box{{std::floor(bb.lo.x * sc) / sc, std::floor(bb.lo.y * sc) / sc},
          {std::ceil(bb.hi.x * sc) / sc, std::ceil(bb.hi.y * sc) / sc}};
  const int dim = domain.dim();
  if (dim == 1) box.lo.y = box.hi.y = 0.0;
  const auto chi = SampledFunction::sample(box, grid_level, dim,
                                           [&](Vec2 x) { return domain.contains(x) ? 1.0 : 0.0; });
  ChiProfile prof;
  prof.p = p;
  prof.r = r;
  const int J = grid_level - r;
  BesovParams bp{0.5, p, 1.0, r, J};
  bp.validate();
  prof.omegas = modulus_profile(chi, bp, Region::whole_space(), J);
  prof.lp = lp_quasinorm(chi, p, Region::whole_space());
  std::vector<double> xs;
  std::vector<double> ys;
  for (int j = 1; j <= J; ++j) {
    const double w = prof.omegas[static_cast<std::size_t>(j)];
    if (w > 0.0) {
      xs.push_back(j);
      ys.push_back(std::log2(w));
    }
  }
  if (xs.size() >= 2) prof.slope_fit = fit_line(xs, ys);
  for (double s : sigmas) {
    for (double q : qs) {
      const auto rows = chi_sweep(prof, s, q);
      prof.rows.insert(prof.rows.end(), rows.begin(), rows.end());
    }
  }
  return prof;
}

std::vector<ChiRow> chi_sweep(const ChiProfile& profile, double sigma, double q) {
  std::vector<ChiRow> rows;
  const int J = static_cast<int>(profile.omegas.size()) - 1;
  for (int jm = 0; jm <= J; ++jm) {
    rows.push_back({sigma, q, jm, besov_from_profile(profile.lp, profile.omegas, sigma, q, jm)});
  }
  return rows;
}

void write_chi_csv(std::ostream& out, const ChiProfile& profile) {
  out << "sigma,p,q,r,J_max,value\n";
  out.precision(12);
  for (const auto& row : profile.rows) {
    out << row.sigma << ',' << profile.p << ',' << row.q << ',' << profile.r << ',' << row.j_max << ','
        << row.value << '\n';
  }
}

// ---------------------------------------------------------------------------

HsetSum hset_condition_sum(const HGauge& gauge, double sigma, double p, double q, int n, int J,
                           int K_max) {
  if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("hset_condition_sum: p, q must be positive");
  if (J < 0 || K_max < 1) throw std::invalid_argument("hset_condition_sum: need J >= 0 and K_max >= 1");
  if (gauge.depth() < J + K_max) {
    throw std::invalid_argument("hset_condition_sum: gauge tabulated to depth " + std::to_string(gauge.depth()) +
                                ", need " + std::to_string(J + K_max));
  }
  const bool sup_k = std::isinf(q);
  const double expo = sup_k ? 1.0 / p : q / p;
  auto term = [&](int j, int k) {
    const double ratio = gauge.at_level(j) / gauge.at_level(j + k) * std::exp2(-static_cast<double>(k) * n);
    return std::exp2(k * sigma * (sup_k ? 1.0 : q)) * std::pow(ratio, expo);
  };
  HsetSum res;
  for (int K = 1; K <= K_max; K *= 2) res.k_checkpoints.push_back(K);
  if (res.k_checkpoints.back() != K_max) res.k_checkpoints.push_back(K_max);
  bool first = true;
  for (int j = 0; j <= J; ++j) {
    double s = 0.0;
    for (int k = 0; k <= K_max; ++k) s = sup_k ? std::max(s, term(j, k)) : s + term(j, k);
    res.per_j.push_back(s);
    if (first || s > res.sup) {
      res.sup = s;
      res.argmax_j = j;
      first = false;
    }
  }
  double s = 0.0;
  std::size_t next = 0;
  for (int k = 0; k <= K_max && next < res.k_checkpoints.size(); ++k) {
    const double t = term(res.argmax_j, k);
    s = sup_k ? std::max(s, t) : s + t;
    if (k == res.k_checkpoints[next]) {
      res.partial_sums.push_back(s);
      ++next;
    }
  }
  if (gauge.is_power()) {
    const double e = sigma - (n - gauge.exponent()) / p;
    if (sup_k) {
      res.closed_form = std::max(1.0, std::exp2(e * K_max));
    } else {
      const double r = std::exp2(q * e);
      res.closed_form = r == 1.0 ? K_max + 1.0 : (1.0 - std::pow(r, K_max + 1)) / (1.0 - r);
    }
  }
  if (res.partial_sums.size() >= 2) {
    const double last = res.partial_sums.back();
    const double half = res.partial_sums[res.partial_sums.size() - 2];
    res.divergent = last - half >= 0.01 * last;
  }
  return res;
}

MembershipReport selfsimilar_membership(const SampledFunction& f, const BesovParams& params,
                                        const SelfsimilarConfig& config) {
  MembershipReport rep;
  rep.selfsimilar = selfsimilar_norm(f, params, config);
  rep.linf = f.max_abs();
  rep.linf_ratio = rep.selfsimilar.value > 0.0 ? rep.linf / rep.selfsimilar.value : 0.0;
  return rep;
}

}  // namespace besovkit
