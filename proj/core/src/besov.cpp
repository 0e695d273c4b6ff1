#include "besovkit/besov.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace besovkit {

void BesovParams::validate() const {
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("BesovParams: s must be positive");
  if (!(p > 0.0)) throw std::invalid_argument("BesovParams: p must be positive");
  if (!(q > 0.0)) throw std::invalid_argument("BesovParams: q must be positive");
  if (!(static_cast<double>(r) > s)) throw std::invalid_argument("BesovParams: need r > s");
  if (j_max < 0) throw std::invalid_argument("BesovParams: j_max must be >= 0");
}

// ---------------------------------------------------------------------------

void CoefficientArray::set(int j, CubeIndex m, double value) {
  if (j < 0) throw std::invalid_argument("CoefficientArray: negative level");
  if (!std::isfinite(value)) throw std::invalid_argument("CoefficientArray: non-finite value");
  if (dim_ == 1) m[1] = 0;
  levels_[j][m] = value;
}

void CoefficientArray::add(int j, CubeIndex m, double value) {
  if (dim_ == 1) m[1] = 0;
  set(j, m, get(j, m) + value);
}

double CoefficientArray::get(int j, CubeIndex m) const {
  if (dim_ == 1) m[1] = 0;
  auto it = levels_.find(j);
  if (it == levels_.end()) return 0.0;
  auto jt = it->second.find(m);
  return jt == it->second.end() ? 0.0 : jt->second;
}

std::size_t CoefficientArray::nonzero_count() const {
  std::size_t n = 0;
  for (const auto& [j, level] : levels_) {
    for (const auto& [m, v] : level) n += v != 0.0 ? 1 : 0;
  }
  return n;
}

int CoefficientArray::max_level() const {
  int top = -1;
  for (const auto& [j, level] : levels_) {
    for (const auto& [m, v] : level) {
      if (v != 0.0) top = std::max(top, j);
    }
  }
  return top;
}

CoefficientArray CoefficientArray::scaled(double c) const {
  CoefficientArray out(carrier_, dim_);
  for (const auto& [j, level] : levels_) {
    for (const auto& [m, v] : level) out.levels_[j][m] = c * v;
  }
  return out;
}

CoefficientArray CoefficientArray::with_carrier(Carrier c) const {
  CoefficientArray out = *this;
  out.carrier_ = c;
  return out;
}

namespace {

bool cube_meets(const LipschitzDomain& domain, Carrier carrier, int j, CubeIndex m, int dim) {
  const Box b = DyadicCube{j, m, dim}.box();
  return carrier == Carrier::boundary ? domain.box_meets_boundary(b) : domain.box_meets_domain(b);
}

}  // namespace

CoefficientArray CoefficientArray::restricted_to_boundary(const LipschitzDomain& domain) const {
  CoefficientArray out(Carrier::boundary, dim_);
  for (const auto& [j, level] : levels_) {
    for (const auto& [m, v] : level) {
      if (cube_meets(domain, Carrier::boundary, j, m, dim_)) out.levels_[j][m] = v;
    }
  }
  return out;
}

void CoefficientArray::validate_support(const LipschitzDomain& domain) const {
  for (const auto& [j, level] : levels_) {
    for (const auto& [m, v] : level) {
      if (v != 0.0 && !cube_meets(domain, carrier_, j, m, dim_)) {
        std::ostringstream msg;
        msg << "coefficient at j=" << j << " m=(" << m[0] << ',' << m[1]
            << ") sits on a cube missing the "
            << (carrier_ == Carrier::boundary ? "boundary" : "domain");
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

void write_coefficients(std::ostream& out, const CoefficientArray& a) {
  out << "coefficients carrier=" << (a.carrier() == Carrier::boundary ? "boundary" : "domain")
      << " n=" << a.dim() << '\n';
  out.precision(17);
  for (const auto& [j, level] : a.levels()) {
    for (const auto& [m, v] : level) {
      if (v == 0.0) continue;
      out << j << ' ' << m[0];
      if (a.dim() == 2) out << ' ' << m[1];
      out << ' ' << v << '\n';
    }
  }
}

CoefficientArray read_coefficient_lines(std::istream& in, Carrier carrier, int dim) {
  CoefficientArray a(carrier, dim);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int j = 0;
    CubeIndex m{0, 0};
    double v = 0.0;
    bool ok = static_cast<bool>(ls >> j >> m[0]);
    if (ok && dim == 2) ok = static_cast<bool>(ls >> m[1]);
    ok = ok && static_cast<bool>(ls >> v);
    std::string rest;
    if (!ok || (ls >> rest)) {
      throw std::invalid_argument("coefficient line " + std::to_string(lineno) + ": '" + line + "'");
    }
    a.set(j, m, v);
  }
  return a;
}

CoefficientArray read_coefficients(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("coefficients: missing header");
  std::istringstream hs(header);
  std::string tag;
  std::string ctok;
  std::string ntok;
  hs >> tag >> ctok >> ntok;
  if (tag != "coefficients" || ctok.rfind("carrier=", 0) != 0 || ntok.rfind("n=", 0) != 0) {
    throw std::invalid_argument("coefficients: malformed header '" + header + "'");
  }
  const std::string c = ctok.substr(8);
  if (c != "domain" && c != "boundary") throw std::invalid_argument("coefficients: bad carrier");
  const int dim = std::stoi(ntok.substr(2));
  if (dim != 1 && dim != 2) throw std::invalid_argument("coefficients: n must be 1 or 2");
  return read_coefficient_lines(in, c == "boundary" ? Carrier::boundary : Carrier::domain, dim);
}

// ---------------------------------------------------------------------------

std::vector<Vec2> direction_net(double t, int dim) {
  std::vector<Vec2> out;
  for (int i = 0; i < 3; ++i) {
    const double len = std::ldexp(t, -i);
    if (dim == 1) {
      out.push_back({len, 0.0});
      out.push_back({-len, 0.0});
      continue;
    }
    for (int k = 0; k < 16; ++k) {
      // axis and diagonal directions exactly, the rest via cos/sin
      const double a = k * std::numbers::pi / 8.0;
      Vec2 u{std::cos(a), std::sin(a)};
      if (k % 4 == 0) u = {k == 0 ? 1.0 : (k == 8 ? -1.0 : 0.0), k == 4 ? 1.0 : (k == 12 ? -1.0 : 0.0)};
      out.push_back(len * u);
    }
  }
  return out;
}

double modulus_of_smoothness(const SampledFunction& f, double t, const BesovParams& params,
                             const Region& region) {
  if (!(t > 0.0) || t > 1.0) throw std::invalid_argument("modulus_of_smoothness: need 0 < t <= 1");
  double best = 0.0;
  for (const Vec2& h : direction_net(t, f.dim())) {
    const auto vals = difference_values(f, h, params.r, region);
    best = std::max(best, lp_of_values(vals, params.p, f.cell_measure()));
  }
  return best;
}

std::vector<double> modulus_profile(const SampledFunction& f, const BesovParams& params,
                                    const Region& region, int j_max) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(j_max) + 1);
  for (int j = 0; j <= j_max; ++j) {
    out.push_back(modulus_of_smoothness(f, std::ldexp(1.0, -j), params, region));
  }
  return out;
}

int effective_j_max(const SampledFunction& f, const BesovParams& params) {
  return std::max(0, std::min(params.j_max, f.level() - params.r));
}

double besov_from_profile(double lp, const std::vector<double>& omegas, double s, double q,
                          int j_max) {
  if (j_max >= static_cast<int>(omegas.size())) {
    throw std::invalid_argument("besov_from_profile: profile shorter than j_max");
  }
  double semi = 0.0;
  if (std::isinf(q)) {
    for (int j = 0; j <= j_max; ++j) {
      semi = std::max(semi, std::exp2(j * s) * omegas[static_cast<std::size_t>(j)]);
    }
  } else {
    for (int j = 0; j <= j_max; ++j) {
      semi += std::pow(std::exp2(j * s) * omegas[static_cast<std::size_t>(j)], q);
    }
    semi = std::pow(semi, 1.0 / q);
  }
  return lp + semi;
}

double besov_norm_differences(const SampledFunction& f, const BesovParams& params,
                              const Region& region) {
  params.validate();
  const int jm = effective_j_max(f, params);
  const auto omegas = modulus_profile(f, params, region, jm);
  return besov_from_profile(lp_quasinorm(f, params.p, region), omegas, params.s, params.q, jm);
}

// ---------------------------------------------------------------------------

namespace {

// Shared by both sequence norms so the boundary weight with s equals the
// domain weight with s + 1/p bit for bit.
double seq_norm_with_exponent(const CoefficientArray& lambda, double exponent, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("sequence norm: p, q must be positive");
  double total = 0.0;
  for (const auto& [j, level] : lambda.levels()) {
    double inner = 0.0;
    if (std::isinf(p)) {
      for (const auto& [m, v] : level) inner = std::max(inner, std::abs(v));
    } else {
      for (const auto& [m, v] : level) inner += std::pow(std::abs(v), p);
      inner = std::pow(inner, 1.0 / p);
    }
    const double term = std::exp2(j * exponent) * inner;
    if (std::isinf(q)) {
      total = std::max(total, term);
    } else {
      total += std::pow(term, q);
    }
  }
  return std::isinf(q) ? total : std::pow(total, 1.0 / q);
}

double level_exponent(double s, double p, int dim) {
  return std::isinf(p) ? s : s - dim / p;
}

}  // namespace

double seq_norm_domain(const CoefficientArray& lambda, double s, double p, double q) {
  if (lambda.carrier() != Carrier::domain) {
    throw std::invalid_argument("seq_norm_domain: coefficient carrier is the boundary");
  }
  return seq_norm_with_exponent(lambda, level_exponent(s, p, lambda.dim()), p, q);
}

double seq_norm_boundary(const CoefficientArray& lambda, double s, double p, double q,
                         const LipschitzDomain* domain) {
  if (lambda.carrier() != Carrier::boundary) {
    throw std::invalid_argument("seq_norm_boundary: coefficient carrier is the domain");
  }
  if (domain != nullptr) lambda.validate_support(*domain);
  // s - (n-1)/p written as (s + 1/p) - n/p
  const double lifted = std::isinf(p) ? s : s + 1.0 / p;
  return seq_norm_with_exponent(lambda, level_exponent(lifted, p, lambda.dim()), p, q);
}

// ---------------------------------------------------------------------------

HomogeneityResult homogeneity_ratio(const SampledFunction& f, int k, const BesovParams& params) {
  params.validate();
  if (k < 0) throw std::invalid_argument("homogeneity_ratio: scale must be 2^{-k}, k >= 0");
  const double radius = std::ldexp(1.0, -k);
  for (long iy = 0; iy < f.ny(); ++iy) {
    for (long ix = 0; ix < f.nx(); ++ix) {
      if (f.at(ix, iy) != 0.0 && norm(f.node(ix, iy)) > radius * (1.0 + 1e-12)) {
        throw std::invalid_argument("homogeneity_ratio: f is not supported in B(0, lambda)");
      }
    }
  }
  const SampledFunction g = f.dilated(k);
  BesovParams pg = params;
  pg.j_max = effective_j_max(g, params);
  BesovParams pf = params;
  pf.j_max = pg.j_max + k;
  if (pf.j_max > f.level() - params.r) {
    throw std::invalid_argument("homogeneity_ratio: grid too coarse for the matched truncation");
  }
  HomogeneityResult res;
  res.dilated_norm = besov_norm_differences(g, pg, Region::whole_space());
  res.original_norm = besov_norm_differences(f, pf, Region::whole_space());
  const double n_over_p = std::isinf(params.p) ? 0.0 : f.dim() / params.p;
  const double lambda_pow = std::exp2(-k * (params.s - n_over_p));
  res.ratio = res.dilated_norm / (lambda_pow * res.original_norm);
  return res;
}

// ---------------------------------------------------------------------------

namespace {

double bump_phi(double t) {
  if (t <= -1.0 || t >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

}  // namespace

double partition_profile(double t) {
  if (t <= -1.0 || t >= 1.0) return 0.0;
  const double k0 = std::floor(t);
  double denom = 0.0;
  for (double k = k0 - 1.0; k <= k0 + 2.0; k += 1.0) denom += bump_phi(t - k);
  return bump_phi(t) / denom;
}

double window(Vec2 y, int dim) {
  const double a = partition_profile(y.x);
  return dim == 1 ? a : a * partition_profile(y.y);
}

std::vector<Vec2> SelfsimilarConfig::effective_translations() const {
  if (!translations.empty()) return translations;
  std::vector<Vec2> out;
  for (int a = -1; a <= 1; ++a) {
    if (dim == 1) {
      out.push_back({static_cast<double>(a), 0.0});
      continue;
    }
    for (int b = -1; b <= 1; ++b) out.push_back({static_cast<double>(a), static_cast<double>(b)});
  }
  return out;
}

double SelfsimilarConfig::partition_defect(const Box& box, int dim, int level) {
  const SampledFunction grid = SampledFunction::zeros(box, level, dim);
  double worst = 0.0;
  for (long iy = 0; iy < grid.ny(); ++iy) {
    for (long ix = 0; ix < grid.nx(); ++ix) {
      const Vec2 x = grid.node(ix, iy);
      double sum = 0.0;
      const long ax = static_cast<long>(std::floor(x.x));
      const long ay = static_cast<long>(std::floor(x.y));
      for (long a = ax - 1; a <= ax + 2; ++a) {
        if (dim == 1) {
          sum += window({x.x - a, 0.0}, 1);
          continue;
        }
        for (long b = ay - 1; b <= ay + 2; ++b) sum += window({x.x - a, x.y - b}, 2);
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  return worst;
}

namespace {

SelfsimilarResult selfsimilar_impl(const ScalarField& f, const BesovParams& params,
                                   const SelfsimilarConfig& config) {
  params.validate();
  if (config.max_dilation < 0) throw std::invalid_argument("selfsimilar_norm: max_dilation < 0");
  SelfsimilarResult res;
  bool first = true;
  for (int j = 0; j <= config.max_dilation; ++j) {
    const double scale = std::ldexp(1.0, -j);
    for (const Vec2& l : config.effective_translations()) {
      const Box box = config.dim == 2 ? Box{{l.x - 1, l.y - 1}, {l.x + 1, l.y + 1}}
                                      : Box{{l.x - 1, 0.0}, {l.x + 1, 0.0}};
      const auto g = SampledFunction::sample(box, config.grid_level, config.dim, [&](Vec2 x) {
        const double w = window(x - l, config.dim);
        return w == 0.0 ? 0.0 : w * f(scale * x);
      });
      for (long iy = 0; iy < g.ny(); ++iy) {
        for (long ix = 0; ix < g.nx(); ++ix) {
          res.sup_norm = std::max(res.sup_norm, std::abs(f(scale * g.node(ix, iy))));
        }
      }
      const double v = besov_norm_differences(g, params, Region::whole_space());
      if (first || v > res.value) {
        res.value = v;
        res.argmax_j = j;
        res.argmax_l = l;
        first = false;
      }
    }
  }
  return res;
}

}  // namespace

SelfsimilarResult selfsimilar_norm(const ScalarField& f, const BesovParams& params,
                                   const SelfsimilarConfig& config) {
  return selfsimilar_impl(f, params, config);
}

SelfsimilarResult selfsimilar_norm(const SampledFunction& f, const BesovParams& params,
                                   const SelfsimilarConfig& config) {
  if (f.dim() != config.dim) throw std::invalid_argument("selfsimilar_norm: dimension mismatch");
  const Box fb = f.box();
  for (int j = 0; j <= config.max_dilation; ++j) {
    const double scale = std::ldexp(1.0, -j);
    for (const Vec2& l : config.effective_translations()) {
      const Box w{scale * Vec2{l.x - 1, l.y - 1}, scale * Vec2{l.x + 1, l.y + 1}};
      const bool inside = w.lo.x >= fb.lo.x && w.hi.x <= fb.hi.x &&
                          (config.dim == 1 || (w.lo.y >= fb.lo.y && w.hi.y <= fb.hi.y));
      if (!inside) {
        throw std::invalid_argument("selfsimilar_norm: dilated window leaves the function box");
      }
    }
  }
  return selfsimilar_impl([&f](Vec2 x) { return f.evaluate(x); }, params, config);
}

// ---------------------------------------------------------------------------

GnResult gn_check(const SampledFunction& f, const BesovParams& params0,
                  const BesovParams& params1, double theta, const Region& region) {
  params0.validate();
  params1.validate();
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("gn_check: theta must be in (0,1)");
  if (params0.r != params1.r || params0.j_max != params1.j_max) {
    throw std::invalid_argument("gn_check: r and j_max must agree");
  }
  GnResult res;
  const bool same = params0.s == params1.s && params0.p == params1.p && params0.q == params1.q;
  auto mix_inverse = [theta](double a, double b) {
    const double inv = (1.0 - theta) / a + theta / b;  // 1/inf == 0
    return inv == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv;
  };
  res.interpolated = params0;
  if (!same) {
    res.interpolated.s = (1.0 - theta) * params0.s + theta * params1.s;
    res.interpolated.p = mix_inverse(params0.p, params1.p);
    res.interpolated.q = mix_inverse(params0.q, params1.q);
  }
  res.interpolated.validate();
  const double n0 = besov_norm_differences(f, params0, region);
  res.lhs = same ? n0 : besov_norm_differences(f, res.interpolated, region);
  if (same) {
    res.rhs = n0;
  } else {
    const double n1 = besov_norm_differences(f, params1, region);
    res.rhs = std::pow(n0, 1.0 - theta) * std::pow(n1, theta);
  }
  res.ratio = res.rhs > 0.0 ? res.lhs / res.rhs : (res.lhs == 0.0 ? 1.0 : INFINITY);
  return res;
}

void write_norm_csv_header(std::ostream& out) { out << "s,p,q,r,J_max,value\n"; }

void write_norm_csv_row(std::ostream& out, const BesovParams& params, double value) {
  out.precision(12);
  out << params.s << ',' << params.p << ',' << params.q << ',' << params.r << ',' << params.j_max
      << ',' << value << '\n';
}

}  // namespace besovkit
