#include "besovkit/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace besovkit {

std::string to_string(AtomKind kind) {
  switch (kind) {
    case AtomKind::k_smooth: return "k-smooth";
    case AtomKind::lip: return "lip";
    case AtomKind::sigma_p: return "sigma-p";
    case AtomKind::lip_gamma: return "lip-gamma";
  }
  return "unknown";
}

std::string to_string(AtomShape shape) { return shape == AtomShape::bump ? "bump" : "tent"; }

AtomKind parse_atom_kind(const std::string& s) {
  if (s == "k-smooth") return AtomKind::k_smooth;
  if (s == "lip") return AtomKind::lip;
  if (s == "sigma-p") return AtomKind::sigma_p;
  if (s == "lip-gamma") return AtomKind::lip_gamma;
  throw std::invalid_argument("unknown atom kind '" + s + "'");
}

AtomShape parse_atom_shape(const std::string& s) {
  if (s == "bump") return AtomShape::bump;
  if (s == "tent") return AtomShape::tent;
  throw std::invalid_argument("unknown atom shape '" + s + "'");
}

AtomShape default_shape(AtomKind kind) {
  return kind == AtomKind::sigma_p ? AtomShape::tent : AtomShape::bump;
}

namespace {

double profile_1d(AtomShape shape, double t) {
  if (shape == AtomShape::tent) return std::max(0.0, 1.0 - std::abs(t));
  return partition_profile(t);
}

// max |T^{(k)}| of the 1D profile for k = 0..K, by k-th differences at step 2^{-10}.
std::vector<double> derivative_maxima(AtomShape shape, int K) {
  const double h = std::ldexp(1.0, -10);
  const int pad = K + 1;
  const int n = (1 << 11) + 2 * pad + 1;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = profile_1d(shape, -1.0 + (i - pad) * h);
  std::vector<double> out;
  std::vector<double> cur = v;
  for (int k = 0; k <= K; ++k) {
    double m = 0.0;
    for (double x : cur) m = std::max(m, std::abs(x));
    out.push_back(m);
    std::vector<double> next(cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) next[i] = (cur[i + 1] - cur[i]) / h;
    cur = std::move(next);
  }
  return out;
}

double template_besov_norm(AtomShape shape, double sigma, double p, int dim, int level) {
  const Box box = dim == 2 ? Box{{-1, -1}, {1, 1}} : Box{{-1, 0}, {1, 0}};
  const auto t = SampledFunction::sample(box, level, dim,
                                         [&](Vec2 y) { return atom_template(shape, y, dim); });
  const int r = static_cast<int>(std::floor(sigma)) + 1;
  return besov_norm_differences(t, BesovParams{sigma, p, p, r, 8}, Region::whole_space());
}

std::mutex& amp_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

double atom_template(AtomShape shape, Vec2 y, int dim) {
  const double a = profile_1d(shape, y.x);
  if (dim == 1 || a == 0.0) return a;
  return a * profile_1d(shape, y.y);
}

double atom_amplitude(AtomKind kind, AtomShape shape, const AtomParams& params, int dim) {
  using Key = std::tuple<int, int, int, double, double, int>;
  static std::map<Key, double> cache;
  const Key key{static_cast<int>(kind), static_cast<int>(shape),
                kind == AtomKind::k_smooth ? params.K : 0,
                kind == AtomKind::sigma_p ? params.sigma : 0.0,
                kind == AtomKind::sigma_p ? params.p : 0.0, dim};
  {
    std::lock_guard<std::mutex> lock(amp_mutex());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  double amp = 0.0;
  switch (kind) {
    case AtomKind::k_smooth: {
      if (params.K < 0) throw std::invalid_argument("make_atom: K must be >= 0");
      if (shape == AtomShape::tent && params.K >= 1) {
        throw std::invalid_argument("make_atom: tent profile has no bounded derivatives of order K >= 1");
      }
      const auto m = derivative_maxima(shape, params.K);
      double worst = 0.0;
      for (int a1 = 0; a1 <= params.K; ++a1) {
        if (dim == 1) {
          worst = std::max(worst, m[static_cast<std::size_t>(a1)]);
          continue;
        }
        for (int a2 = 0; a1 + a2 <= params.K; ++a2) {
          worst = std::max(worst, m[static_cast<std::size_t>(a1)] * m[static_cast<std::size_t>(a2)]);
        }
      }
      amp = 1.0 / (2.0 * worst);
      break;
    }
    case AtomKind::lip:
    case AtomKind::lip_gamma: {
      double g = 0.0;
      if (dim == 1) {
        g = derivative_maxima(shape, 1)[1];
      } else {
        const double h = std::ldexp(1.0, -8);
        for (int i = 0; i <= 512; ++i) {
          for (int k = 0; k <= 512; ++k) {
            const double y1 = -1.0 + i * h;
            const double y2 = -1.0 + k * h;
            if (y1 + h > 1.0 || y2 + h > 1.0) continue;
            const double c = atom_template(shape, {y1, y2}, 2);
            const double gx = (atom_template(shape, {y1 + h, y2}, 2) - c) / h;
            const double gy = (atom_template(shape, {y1, y2 + h}, 2) - c) / h;
            g = std::max(g, std::hypot(gx, gy));
          }
        }
      }
      amp = std::min(0.5, 1.0 / (2.0 * g));
      break;
    }
    case AtomKind::sigma_p: {
      if (!(params.sigma > 0.0) || !(params.p > 0.0)) {
        throw std::invalid_argument("make_atom: sigma and p must be positive");
      }
      amp = 1.0 / (2.0 * template_besov_norm(shape, params.sigma, params.p, dim, 6));
      break;
    }
  }
  if (!(amp > 0.0) || !std::isfinite(amp)) {
    throw std::invalid_argument("make_atom: normalization cannot be satisfied");
  }
  std::lock_guard<std::mutex> lock(amp_mutex());
  cache[key] = amp;
  return amp;
}

// ---------------------------------------------------------------------------

Box Atom::support() const {
  if (custom) return custom_support;
  return cube().box();
}

double Atom::operator()(Vec2 x) const {
  if (custom) return scale * custom(x);
  const Vec2 y{std::ldexp(x.x, level) - static_cast<double>(index[0]),
               dim == 2 ? std::ldexp(x.y, level) - static_cast<double>(index[1]) : 0.0};
  return scale * amplitude * atom_template(shape, y, dim);
}

Atom Atom::scaled(double c) const {
  Atom a = *this;
  a.scale *= c;
  return a;
}

Atom make_atom(AtomKind kind, int j, CubeIndex m, double d, const AtomParams& params, int dim,
               std::optional<AtomShape> shape) {
  if (!(d > 1.0)) throw std::invalid_argument("make_atom: d must exceed 1");
  if (j < 0) throw std::invalid_argument("make_atom: negative level");
  if (dim != 1 && dim != 2) throw std::invalid_argument("make_atom: dim must be 1 or 2");
  Atom a;
  a.kind = kind;
  a.shape = shape.value_or(default_shape(kind));
  a.level = j;
  a.index = m;
  if (dim == 1) a.index[1] = 0;
  a.dim = dim;
  a.d = d;
  a.params = params;
  a.amplitude = atom_amplitude(kind, a.shape, params, dim);
  return a;
}

// ---------------------------------------------------------------------------

double rescaled_atom_norm(const Atom& a, double sigma, double p, int grid_level) {
  const Box s = a.support();
  const double up = std::ldexp(1.0, a.level);
  const double res = std::ldexp(1.0, grid_level);
  Box box{{std::floor(s.lo.x * up * res) / res, std::floor(s.lo.y * up * res) / res},
          {std::ceil(s.hi.x * up * res) / res, std::ceil(s.hi.y * up * res) / res}};
  if (a.dim == 1) box.lo.y = box.hi.y = 0.0;
  const double down = std::ldexp(1.0, -a.level);
  const auto g = SampledFunction::sample(box, grid_level, a.dim, [&](Vec2 x) { return a(down * x); });
  const int r = static_cast<int>(std::floor(sigma)) + 1;
  return besov_norm_differences(g, BesovParams{sigma, p, p, r, 8}, Region::whole_space());
}

namespace {

double binom(int n, int k) {
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return b;
}

// Central difference approximation of D^alpha a at x.
double mixed_derivative(const Atom& a, Vec2 x, int a1, int a2, double h) {
  double sum = 0.0;
  for (int i = 0; i <= a1; ++i) {
    for (int k = 0; k <= a2; ++k) {
      const double c = ((i + k) % 2 == 0 ? 1.0 : -1.0) * binom(a1, i) * binom(a2, k);
      sum += c * a({x.x + (0.5 * a1 - i) * h, x.y + (0.5 * a2 - k) * h});
    }
  }
  return sum / std::pow(h, a1 + a2);
}

}  // namespace

AtomReport validate_atom(const Atom& a, const LipschitzDomain* domain) {
  AtomReport rep;
  auto fail = [&rep](const std::string& s) { rep.violations.push_back(s); };
  const DyadicCube q = a.cube();
  const Box dq = q.dilated(a.d);
  const Box sup = a.support();
  const double tol = 1e-12;
  if (sup.lo.x < dq.lo.x - tol || sup.hi.x > dq.hi.x + tol ||
      (a.dim == 2 && (sup.lo.y < dq.lo.y - tol || sup.hi.y > dq.hi.y + tol))) {
    fail("support box leaves dQ");
  }
  // vanishing outside dQ on a ring of sample points
  {
    const Box outer = q.dilated(1.5 * a.d);
    const int n = 24;
    for (int i = 0; i <= n; ++i) {
      for (int k = 0; k <= (a.dim == 2 ? n : 0); ++k) {
        const Vec2 x{outer.lo.x + (outer.hi.x - outer.lo.x) * i / n,
                     a.dim == 2 ? outer.lo.y + (outer.hi.y - outer.lo.y) * k / n : 0.0};
        const bool inside = x.x >= dq.lo.x && x.x <= dq.hi.x &&
                            (a.dim == 1 || (x.y >= dq.lo.y && x.y <= dq.hi.y));
        if (!inside && a(x) != 0.0) {
          fail("nonzero value outside dQ");
          i = n + 1;
          break;
        }
      }
    }
  }
  // sample grid over the support
  std::vector<Vec2> pts;
  {
    const int n = 32;
    for (int i = 0; i <= n; ++i) {
      for (int k = 0; k <= (a.dim == 2 ? n : 0); ++k) {
        pts.push_back({sup.lo.x + (sup.hi.x - sup.lo.x) * i / n,
                       a.dim == 2 ? sup.lo.y + (sup.hi.y - sup.lo.y) * k / n : 0.0});
      }
    }
  }
  for (const Vec2& x : pts) rep.sup = std::max(rep.sup, std::abs(a(x)));
  const double scale_j = std::ldexp(1.0, a.level);

  auto check_sigma = [&](double sigma, double p, const std::string& what) {
    rep.rescaled_norm = rescaled_atom_norm(a, sigma, p);
    if (rep.rescaled_norm > 1.0 + 1e-9) {
      std::ostringstream msg;
      msg << what << ": ||a(2^-j .)|B^" << sigma << "_" << p << "|| = " << rep.rescaled_norm << " > 1";
      fail(msg.str());
    }
  };

  switch (a.kind) {
    case AtomKind::k_smooth: {
      const double h = std::ldexp(1.0, -a.level - 8);
      for (int a1 = 0; a1 <= a.params.K; ++a1) {
        for (int a2 = 0; a1 + a2 <= a.params.K; ++a2) {
          if (a.dim == 1 && a2 > 0) continue;
          const double bound = std::pow(scale_j, a1 + a2);
          for (const Vec2& x : pts) {
            const double v = std::abs(mixed_derivative(a, x, a1, a2, h));
            rep.derivative_ratio = std::max(rep.derivative_ratio, v / bound);
          }
        }
      }
      if (rep.derivative_ratio > 1.0 + 1e-3) {
        std::ostringstream msg;
        msg << "derivative bound exceeded by factor " << rep.derivative_ratio;
        fail(msg.str());
      }
      if (a.params.sigma < a.params.K) check_sigma(a.params.sigma, a.params.p, "as (sigma,p)-atom");
      break;
    }
    case AtomKind::lip: {
      if (rep.sup > 1.0 + 1e-12) fail("|a| exceeds 1");
      std::mt19937_64 rng(1234);
      std::uniform_real_distribution<double> ux(sup.lo.x, sup.hi.x);
      std::uniform_real_distribution<double> uy(sup.lo.y, sup.hi.y);
      std::uniform_real_distribution<double> small(-1.0, 1.0);
      const double near = (sup.hi.x - sup.lo.x) * 1e-3;
      for (int t = 0; t < 10000; ++t) {
        const Vec2 x{ux(rng), a.dim == 2 ? uy(rng) : 0.0};
        const Vec2 y = t % 2 == 0 ? Vec2{ux(rng), a.dim == 2 ? uy(rng) : 0.0}
                                  : Vec2{x.x + near * small(rng), a.dim == 2 ? x.y + near * small(rng) : 0.0};
        const double dxy = norm(x - y);
        if (dxy > 0.0) rep.lipschitz_quotient = std::max(rep.lipschitz_quotient, std::abs(a(x) - a(y)) / dxy / scale_j);
      }
      if (rep.lipschitz_quotient > 1.0 + 1e-9) fail("Lipschitz quotient exceeds 2^j");
      break;
    }
    case AtomKind::sigma_p:
      check_sigma(a.params.sigma, a.params.p, "(sigma,p) condition");
      break;
    case AtomKind::lip_gamma: {
      if (domain == nullptr) {
        fail("LipGamma validation needs the domain");
        break;
      }
      std::vector<Vec2> bpts;
      for (const auto& b : domain->boundary_samples(std::ldexp(1.0, -a.level) / 64.0)) {
        const Vec2 x = b.point;
        if (x.x >= dq.lo.x && x.x <= dq.hi.x && x.y >= dq.lo.y && x.y <= dq.hi.y) bpts.push_back(x);
      }
      if (bpts.empty()) {
        fail("dQ misses the boundary");
        break;
      }
      double gsup = 0.0;
      for (const Vec2& x : bpts) gsup = std::max(gsup, std::abs(a(x)));
      rep.sup = gsup;
      if (gsup > 1.0 + 1e-12) fail("|a| exceeds 1 on the boundary");
      for (std::size_t u = 0; u < bpts.size(); ++u) {
        const double au = a(bpts[u]);
        for (std::size_t v = u + 1; v < bpts.size(); ++v) {
          const double dxy = norm(bpts[u] - bpts[v]);
          if (dxy > 0.0) {
            rep.lipschitz_quotient = std::max(rep.lipschitz_quotient, std::abs(au - a(bpts[v])) / dxy / scale_j);
          }
        }
      }
      if (rep.lipschitz_quotient > 1.0 + 1e-9) fail("boundary Lipschitz quotient exceeds 2^j");
      break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

Atom AtomicDecomposition::atom(int j, CubeIndex m) const {
  if (dim == 1) m[1] = 0;
  const AtomKey key{j, m};
  auto c = custom.find(key);
  Atom a = c != custom.end() ? c->second : make_atom(kind, j, m, d, atom_params, dim, shape);
  auto s = scales.find(key);
  if (s != scales.end()) a.scale *= s->second;
  return a;
}

namespace {

struct NodeRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
};

// Indices m with 2^{-j} m in [a, b].
NodeRange nodes_in(double a, double b, int j) {
  const double sc = std::ldexp(1.0, j);
  return {static_cast<std::int64_t>(std::ceil(a * sc - 1e-9)),
          static_cast<std::int64_t>(std::floor(b * sc + 1e-9))};
}

// Grid nodes ix with x in the open interval (c - w, c + w).
NodeRange grid_in(double c, double w, double lo, double spacing, long n) {
  auto a = static_cast<std::int64_t>(std::floor((c - w - lo) / spacing)) + 1;
  auto b = static_cast<std::int64_t>(std::ceil((c + w - lo) / spacing)) - 1;
  return {std::max<std::int64_t>(a, 0), std::min<std::int64_t>(b, n - 1)};
}

struct Hierarchy {
  CoefficientArray coeffs;
  std::vector<double> sup;
  std::vector<double> lp;
};

Hierarchy hierarchical(const SampledFunction& f, int J, AtomShape shape, double amp, double p,
                       bool check_growth) {
  const int dim = f.dim();
  const Box box = f.box();
  const double dx = f.spacing();
  const long nx = f.nx();
  const long ny = f.ny();
  std::vector<double> res(f.values().begin(), f.values().end());
  Hierarchy h;
  h.coeffs = CoefficientArray(Carrier::domain, dim);
  double prev = 0.0;
  for (double v : res) prev = std::max(prev, std::abs(v));
  const double start = prev;
  for (int j = 0; j <= J; ++j) {
    const double step = std::ldexp(1.0, -j);
    const NodeRange rx = nodes_in(box.lo.x, box.hi.x, j);
    const NodeRange ry = dim == 2 ? nodes_in(box.lo.y, box.hi.y, j) : NodeRange{0, 0};
    std::vector<std::pair<CubeIndex, double>> level;
    for (std::int64_t my = ry.lo; my <= ry.hi; ++my) {
      for (std::int64_t mx = rx.lo; mx <= rx.hi; ++mx) {
        const long ix = std::lround((mx * step - box.lo.x) / dx);
        const long iy = dim == 2 ? std::lround((my * step - box.lo.y) / dx) : 0;
        const double r = res[static_cast<std::size_t>(iy * nx + ix)];
        if (r != 0.0) level.push_back({CubeIndex{mx, my}, r / amp});
      }
    }
    for (const auto& [m, lam] : level) {
      h.coeffs.set(j, m, lam);
      const double cx = m[0] * step;
      const double cy = m[1] * step;
      const NodeRange gx = grid_in(cx, step, box.lo.x, dx, nx);
      const NodeRange gy = dim == 2 ? grid_in(cy, step, box.lo.y, dx, ny) : NodeRange{0, 0};
      for (std::int64_t iy = gy.lo; iy <= gy.hi; ++iy) {
        const double ty = dim == 2 ? (box.lo.y + iy * dx - cy) / step : 0.0;
        const double py = dim == 2 ? atom_template(shape, {ty, 0.0}, 1) : 1.0;
        if (py == 0.0) continue;
        for (std::int64_t ix = gx.lo; ix <= gx.hi; ++ix) {
          const double tx = (box.lo.x + ix * dx - cx) / step;
          const double px = atom_template(shape, {tx, 0.0}, 1);
          if (px != 0.0) res[static_cast<std::size_t>(iy * nx + ix)] -= lam * (amp * (px * py));
        }
      }
    }
    double sup = 0.0;
    for (double v : res) sup = std::max(sup, std::abs(v));
    h.sup.push_back(sup);
    h.lp.push_back(lp_of_values(res, p, f.cell_measure()));
    if (check_growth && sup > prev * (1.0 + 1e-9) + 1e-14 * start) {
      std::ostringstream msg;
      msg << "decompose: residual sup grew from " << prev << " to " << sup << " at level " << j;
      throw std::runtime_error(msg.str());
    }
    prev = sup;
  }
  return h;
}

}  // namespace

AtomicDecomposition decompose(const SampledFunction& f, const BesovParams& params, int J,
                              AtomKind kind, const AtomParams& atom_params,
                              std::optional<AtomShape> shape, double d, bool strict) {
  params.validate();
  if (J < 0 || J > f.level() - 2) {
    throw std::invalid_argument("decompose: need 0 <= J <= grid level - 2");
  }
  if (!(d > 1.0)) throw std::invalid_argument("decompose: d must exceed 1");
  AtomicDecomposition dec;
  dec.kind = kind;
  dec.shape = shape.value_or(default_shape(kind));
  dec.atom_params = atom_params;
  dec.d = d;
  dec.dim = f.dim();
  dec.target = params;
  dec.box = f.box();
  dec.grid_level = f.level();
  const double amp = atom_amplitude(kind, dec.shape, atom_params, f.dim());
  auto h = hierarchical(f, J, dec.shape, amp, params.p, strict);
  dec.coefficients = std::move(h.coeffs);
  dec.residual_sup = std::move(h.sup);
  dec.residual_lp = std::move(h.lp);
  return dec;
}

SampledFunction reconstruct(const AtomicDecomposition& dec, int j_star, const Box& box, int level) {
  auto out = SampledFunction::zeros(box, level, dec.dim);
  std::vector<double> v(out.values().begin(), out.values().end());
  const double dx = out.spacing();
  for (const auto& [j, lev] : dec.coefficients.levels()) {
    if (j > j_star) continue;
    for (const auto& [m, lam] : lev) {
      if (lam == 0.0) continue;
      const Atom a = dec.atom(j, m);
      const Box s = a.support();
      const long x0 = std::max<long>(0, static_cast<long>(std::ceil((s.lo.x - box.lo.x) / dx - 1e-9)));
      const long x1 = std::min<long>(out.nx() - 1, static_cast<long>(std::floor((s.hi.x - box.lo.x) / dx + 1e-9)));
      long y0 = 0;
      long y1 = 0;
      if (dec.dim == 2) {
        y0 = std::max<long>(0, static_cast<long>(std::ceil((s.lo.y - box.lo.y) / dx - 1e-9)));
        y1 = std::min<long>(out.ny() - 1, static_cast<long>(std::floor((s.hi.y - box.lo.y) / dx + 1e-9)));
      }
      for (long iy = y0; iy <= y1; ++iy) {
        for (long ix = x0; ix <= x1; ++ix) {
          v[static_cast<std::size_t>(iy * out.nx() + ix)] += lam * a(out.node(ix, iy));
        }
      }
    }
  }
  return SampledFunction(box, level, dec.dim, std::move(v));
}

SampledFunction reconstruct(const AtomicDecomposition& dec, int j_star) {
  return reconstruct(dec, j_star, dec.box, dec.grid_level);
}

// ---------------------------------------------------------------------------

ReexpandResult reexpand(const AtomicDecomposition& dec, int K, double s, double inner_band) {
  if (!dec.custom.empty()) throw std::invalid_argument("reexpand: explicit atoms are not supported");
  if (dec.kind != AtomKind::sigma_p && dec.kind != AtomKind::k_smooth) {
    throw std::invalid_argument("reexpand: input atoms must be (sigma,p)- or K-atoms");
  }
  const double sigma = dec.atom_params.sigma;
  const double p = dec.atom_params.p;
  if (!(s > 0.0 && s < sigma)) throw std::invalid_argument("reexpand: need 0 < s < sigma");
  ReexpandResult res;
  res.epsilon = 0.5 * (sigma - s);
  res.overlap_bound = dec.dim == 2 ? 9 : 3;

  AtomParams kp = dec.atom_params;
  kp.K = K;
  const double amp_src = atom_amplitude(dec.kind, dec.shape, dec.atom_params, dec.dim);
  const double amp_k = atom_amplitude(AtomKind::k_smooth, AtomShape::bump, kp, dec.dim);

  std::map<AtomKey, double> signed_sum;
  std::map<AtomKey, double> nu;
  std::map<std::tuple<int, CubeIndex, int>, int> overlap;
  const Box unit = dec.dim == 2 ? Box{{-1, -1}, {1, 1}} : Box{{-1, 0}, {1, 0}};

  for (const auto& [k, lev] : dec.coefficients.levels()) {
    const int inner_level = dec.grid_level - k;
    if (inner_level < 0) throw std::invalid_argument("reexpand: atom level above the grid level");
    const auto tmpl = SampledFunction::sample(unit, inner_level, dec.dim, [&](Vec2 y) {
      return amp_src * atom_template(dec.shape, y, dec.dim);
    });
    const auto eta = hierarchical(tmpl, inner_level, AtomShape::bump, amp_k, p, false).coeffs;
    const double inner = seq_norm_domain(eta, sigma, p, p);
    res.max_inner_norm = std::max(res.max_inner_norm, inner);
    if (inner > inner_band) {
      std::ostringstream msg;
      msg << "reexpand: inner expansion at level " << k << " has b^sigma_pp norm " << inner
          << " above the band " << inner_band;
      throw std::runtime_error(msg.str());
    }
    for (const auto& [m, lam0] : lev) {
      if (lam0 == 0.0) continue;
      auto sc = dec.scales.find({k, m});
      const double lam = lam0 * (sc == dec.scales.end() ? 1.0 : sc->second);
      for (const auto& [i, elev] : eta.levels()) {
        const std::int64_t shift = std::int64_t{1} << i;
        for (const auto& [w0, e] : elev) {
          if (e == 0.0) continue;
          const CubeIndex w{w0[0] + shift * m[0], dec.dim == 2 ? w0[1] + shift * m[1] : 0};
          const AtomKey key{k + i, w};
          signed_sum[key] += e * lam;
          nu[key] += std::abs(e) * std::abs(lam);
          const int c = ++overlap[{k + i, w, k}];
          res.max_overlap = std::max(res.max_overlap, c);
        }
      }
    }
  }
  if (res.max_overlap > res.overlap_bound) {
    throw std::runtime_error("reexpand: overlap set larger than the level-independent bound");
  }

  AtomicDecomposition& out = res.output;
  out.kind = AtomKind::k_smooth;
  out.shape = AtomShape::bump;
  out.atom_params = kp;
  out.d = dec.d;
  out.dim = dec.dim;
  out.target = dec.target;
  out.box = dec.box;
  out.grid_level = dec.grid_level;
  out.coefficients = CoefficientArray(Carrier::domain, dec.dim);
  for (const auto& [key, n] : nu) {
    if (n == 0.0) continue;
    const double ssum = signed_sum[key];
    out.coefficients.set(key.first, key.second, ssum < 0.0 ? -n : n);
    const double factor = std::abs(ssum) / n;
    if (factor != 1.0) out.scales[key] = factor;
  }
  const int top = std::max(dec.coefficients.max_level(), out.coefficients.max_level());
  const auto a = reconstruct(dec, top);
  const auto b = reconstruct(out, top);
  for (std::size_t i = 0; i < a.size(); ++i) {
    res.agreement = std::max(res.agreement, std::abs(a.values()[i] - b.values()[i]));
  }
  return res;
}

// ---------------------------------------------------------------------------

double todo3_constant(double alpha, double eps) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("todo3: alpha must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("todo3: eps must be positive");
  if (alpha == 1.0) return 1.0;
  if (std::isinf(alpha)) return 1.0 / (1.0 - std::exp2(-eps));
  const double alpha_dual = alpha / (alpha - 1.0);
  const double geometric = 1.0 / (1.0 - std::exp2(-eps * alpha_dual));
  return std::pow(geometric, alpha - 1.0);
}

Todo3Result todo3_check(const std::vector<std::vector<double>>& gamma, double alpha, double eps) {
  Todo3Result res;
  res.constant = todo3_constant(alpha, eps);
  const std::size_t J = gamma.size();
  for (std::size_t j = 0; j < J; ++j) {
    if (gamma[j].size() < j + 1) throw std::invalid_argument("todo3: row j needs entries k = 0..j");
    for (std::size_t k = 0; k <= j; ++k) {
      if (!(gamma[j][k] >= 0.0)) throw std::invalid_argument("todo3: entries must be nonnegative");
    }
  }
  const bool sup = std::isinf(alpha);
  for (std::size_t j = 0; j < J; ++j) {
    double inner = 0.0;
    for (std::size_t k = 0; k <= j; ++k) {
      inner += std::exp2(-static_cast<double>(j - k) * eps) * gamma[j][k];
    }
    res.lhs = sup ? std::max(res.lhs, inner) : res.lhs + std::pow(inner, alpha);
  }
  for (std::size_t k = 0; k < J; ++k) {
    double inner = 0.0;
    for (std::size_t j = k; j < J; ++j) inner += gamma[j][k];
    res.rhs = sup ? std::max(res.rhs, inner) : res.rhs + std::pow(inner, alpha);
  }
  res.holds = res.lhs <= res.constant * res.rhs * (1.0 + 1e-12);
  return res;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

}  // namespace

void write_decomposition(std::ostream& out, const AtomicDecomposition& dec) {
  out << "atoms kind=" << to_string(dec.kind) << " params=shape:" << to_string(dec.shape)
      << ",K:" << dec.atom_params.K << ",sigma:" << fmt(dec.atom_params.sigma)
      << ",p:" << fmt(dec.atom_params.p) << ",d:" << fmt(dec.d) << ",n:" << dec.dim
      << ",s:" << fmt(dec.target.s) << ",bp:" << fmt(dec.target.p) << ",bq:" << fmt(dec.target.q)
      << ",r:" << dec.target.r << ",jmax:" << dec.target.j_max << ",box:" << fmt(dec.box.lo.x)
      << ';' << fmt(dec.box.lo.y) << ';' << fmt(dec.box.hi.x) << ';' << fmt(dec.box.hi.y)
      << ",level:" << dec.grid_level << ",carrier:"
      << (dec.coefficients.carrier() == Carrier::boundary ? "boundary" : "domain") << '\n';
  out.precision(17);
  for (const auto& [j, lev] : dec.coefficients.levels()) {
    for (const auto& [m, v] : lev) {
      if (v == 0.0) continue;
      auto sc = dec.scales.find({j, m});
      out << j << ' ' << m[0];
      if (dec.dim == 2) out << ' ' << m[1];
      out << ' ' << v * (sc == dec.scales.end() ? 1.0 : sc->second) << '\n';
    }
  }
}

AtomicDecomposition read_decomposition(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("atoms file: missing header");
  std::istringstream hs(header);
  std::string tag;
  std::string ktok;
  std::string ptok;
  hs >> tag >> ktok >> ptok;
  if (tag != "atoms" || ktok.rfind("kind=", 0) != 0 || ptok.rfind("params=", 0) != 0) {
    throw std::invalid_argument("atoms file: malformed header '" + header + "'");
  }
  AtomicDecomposition dec;
  dec.kind = parse_atom_kind(ktok.substr(5));
  dec.shape = default_shape(dec.kind);
  Carrier carrier = Carrier::domain;
  std::istringstream ps(ptok.substr(7));
  std::string item;
  bool have_box = false;
  while (std::getline(ps, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("atoms file: bad parameter '" + item + "'");
    const std::string key = item.substr(0, colon);
    const std::string val = item.substr(colon + 1);
    try {
      if (key == "shape") dec.shape = parse_atom_shape(val);
      else if (key == "K") dec.atom_params.K = std::stoi(val);
      else if (key == "sigma") dec.atom_params.sigma = std::stod(val);
      else if (key == "p") dec.atom_params.p = std::stod(val);
      else if (key == "d") dec.d = std::stod(val);
      else if (key == "n") dec.dim = std::stoi(val);
      else if (key == "s") dec.target.s = std::stod(val);
      else if (key == "bp") dec.target.p = std::stod(val);
      else if (key == "bq") dec.target.q = std::stod(val);
      else if (key == "r") dec.target.r = std::stoi(val);
      else if (key == "jmax") dec.target.j_max = std::stoi(val);
      else if (key == "level") dec.grid_level = std::stoi(val);
      else if (key == "carrier") {
        if (val != "domain" && val != "boundary") throw std::invalid_argument(val);
        carrier = val == "boundary" ? Carrier::boundary : Carrier::domain;
      } else if (key == "box") {
        std::string b = val;
        std::replace(b.begin(), b.end(), ';', ' ');
        std::istringstream bs(b);
        if (!(bs >> dec.box.lo.x >> dec.box.lo.y >> dec.box.hi.x >> dec.box.hi.y)) {
          throw std::invalid_argument(val);
        }
        have_box = true;
      } else {
        throw std::invalid_argument("unknown key");
      }
    } catch (const std::logic_error&) {
      throw std::invalid_argument("atoms file: bad parameter '" + item + "'");
    }
  }
  if (dec.dim != 1 && dec.dim != 2) throw std::invalid_argument("atoms file: n must be 1 or 2");
  if (!have_box) throw std::invalid_argument("atoms file: missing box");
  dec.coefficients = read_coefficient_lines(in, carrier, dec.dim);
  return dec;
}

}  // namespace besovkit
