#include "besovkit/functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace besovkit {

namespace {

long checked_count(double extent, double scale, const char* axis) {
  const double cells = extent * scale;
  const double rounded = std::round(cells);
  if (cells < 0.0 || std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
    throw std::invalid_argument(std::string("SampledFunction: box ") + axis +
                                "-extent is not a multiple of the grid spacing");
  }
  return static_cast<long>(rounded) + 1;
}

std::vector<double> signed_binomials(int r) {
  std::vector<double> c(static_cast<std::size_t>(r) + 1);
  double b = 1.0;
  for (int i = 0; i <= r; ++i) {
    c[static_cast<std::size_t>(i)] = ((r - i) % 2 == 0 ? 1.0 : -1.0) * b;
    b = b * (r - i) / (i + 1);
  }
  return c;
}

// Multilinear interpolation at grid coordinates (tx, ty); zero outside.
inline double interp_or_zero(std::span<const double> v, long nx, long ny, double tx, double ty) {
  if (tx < 0.0 || ty < 0.0 || tx > static_cast<double>(nx - 1) ||
      ty > static_cast<double>(ny - 1)) {
    return 0.0;
  }
  long ix = static_cast<long>(tx);
  if (ix >= nx - 1) ix = nx - 2;
  if (ix < 0) ix = 0;
  const double fx = tx - static_cast<double>(ix);
  if (ny == 1) {
    const double a = v[static_cast<std::size_t>(ix)];
    const double b = nx > 1 ? v[static_cast<std::size_t>(ix + 1)] : a;
    return fx == 0.0 ? a : a + fx * (b - a);
  }
  long iy = static_cast<long>(ty);
  if (iy >= ny - 1) iy = ny - 2;
  if (iy < 0) iy = 0;
  const double fy = ty - static_cast<double>(iy);
  const std::size_t base = static_cast<std::size_t>(iy * nx + ix);
  const double v00 = v[base];
  if (fx == 0.0 && fy == 0.0) return v00;
  const double v10 = v[base + 1];
  const double v01 = v[base + static_cast<std::size_t>(nx)];
  const double v11 = v[base + static_cast<std::size_t>(nx) + 1];
  return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

}  // namespace

SampledFunction::SampledFunction(Box box, int level, int dim, std::vector<double> values)
    : box_(box), level_(level), dim_(dim), spacing_(std::ldexp(1.0, -level)) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("SampledFunction: dim must be 1 or 2");
  const double scale = std::ldexp(1.0, level);
  nx_ = checked_count(box.hi.x - box.lo.x, scale, "x");
  ny_ = dim == 2 ? checked_count(box.hi.y - box.lo.y, scale, "y") : 1;
  if (dim == 1) box_.lo.y = box_.hi.y = 0.0;
  if (nx_ < 2 || (dim == 2 && ny_ < 2)) {
    throw std::invalid_argument("SampledFunction: grid needs at least two nodes per axis");
  }
  if (values.size() != static_cast<std::size_t>(nx_ * ny_)) {
    throw std::invalid_argument("SampledFunction: value count does not match the grid");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("SampledFunction: non-finite value");
  }
  values_ = std::move(values);
}

SampledFunction SampledFunction::zeros(Box box, int level, int dim) {
  const double scale = std::ldexp(1.0, level);
  const long nx = checked_count(box.hi.x - box.lo.x, scale, "x");
  const long ny = dim == 2 ? checked_count(box.hi.y - box.lo.y, scale, "y") : 1;
  return SampledFunction(box, level, dim, std::vector<double>(static_cast<std::size_t>(nx * ny)));
}

SampledFunction SampledFunction::sample(Box box, int level, int dim, const ScalarField& f) {
  SampledFunction g = zeros(box, level, dim);
  for (long iy = 0; iy < g.ny_; ++iy) {
    for (long ix = 0; ix < g.nx_; ++ix) {
      g.values_[static_cast<std::size_t>(iy * g.nx_ + ix)] = f(g.node(ix, iy));
    }
  }
  for (double v : g.values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("SampledFunction::sample: non-finite value");
  }
  return g;
}

double SampledFunction::evaluate(Vec2 x) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(box_.hi.x - box_.lo.x));
  if (x.x < box_.lo.x - tol || x.x > box_.hi.x + tol ||
      (dim_ == 2 && (x.y < box_.lo.y - tol || x.y > box_.hi.y + tol))) {
    throw std::out_of_range("SampledFunction::evaluate: point outside the grid box");
  }
  const double tx = std::clamp((x.x - box_.lo.x) / spacing_, 0.0, static_cast<double>(nx_ - 1));
  const double ty = dim_ == 2 ? std::clamp((x.y - box_.lo.y) / spacing_, 0.0,
                                           static_cast<double>(ny_ - 1))
                              : 0.0;
  return interp_or_zero(values_, nx_, ny_, tx, ty);
}

double SampledFunction::evaluate_or_zero(Vec2 x) const {
  const double tx = (x.x - box_.lo.x) / spacing_;
  const double ty = dim_ == 2 ? (x.y - box_.lo.y) / spacing_ : 0.0;
  return interp_or_zero(values_, nx_, ny_, tx, ty);
}

SampledFunction SampledFunction::dilated(int k) const {
  const double s = std::ldexp(1.0, k);
  Box b{s * box_.lo, s * box_.hi};
  return SampledFunction(b, level_ - k, dim_, values_);
}

SampledFunction SampledFunction::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return SampledFunction(box_, level_, dim_, std::move(v));
}

bool SampledFunction::same_grid(const SampledFunction& other) const {
  return dim_ == other.dim_ && level_ == other.level_ && box_.lo == other.box_.lo &&
         box_.hi == other.box_.hi;
}

SampledFunction SampledFunction::multiplied(const SampledFunction& other) const {
  if (!same_grid(other)) throw std::invalid_argument("SampledFunction: grid mismatch");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= other.values_[i];
  return SampledFunction(box_, level_, dim_, std::move(v));
}

SampledFunction SampledFunction::plus(const SampledFunction& other) const {
  if (!same_grid(other)) throw std::invalid_argument("SampledFunction: grid mismatch");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
  return SampledFunction(box_, level_, dim_, std::move(v));
}

double SampledFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------

double lp_of_values(std::span<const double> values, double p, double cell) {
  if (!(p > 0.0)) throw std::invalid_argument("lp: p must be positive");
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  if (std::isinf(p)) return m;
  double s = 0.0;
  for (double v : values) {
    if (v != 0.0) s += std::pow(std::abs(v) / m, p);
  }
  return m * std::pow(s * cell, 1.0 / p);
}

SampledFunction forward_difference(const SampledFunction& f, Vec2 h, int r,
                                   const LipschitzDomain& domain) {
  if (r < 1) throw std::invalid_argument("forward_difference: r must be >= 1");
  const auto c = signed_binomials(r);
  std::vector<double> out(f.size(), 0.0);
  const double hx = h.x / f.spacing();
  const double hy = f.dim() == 2 ? h.y / f.spacing() : 0.0;
  for (long iy = 0; iy < f.ny(); ++iy) {
    for (long ix = 0; ix < f.nx(); ++ix) {
      const Vec2 x = f.node(ix, iy);
      if (!domain.segment_in_domain(x, h, r)) continue;
      double d = 0.0;
      for (int i = 0; i <= r; ++i) {
        d += c[static_cast<std::size_t>(i)] *
             interp_or_zero(f.values(), f.nx(), f.ny(), ix + i * hx, iy + i * hy);
      }
      out[static_cast<std::size_t>(iy * f.nx() + ix)] = d;
    }
  }
  return SampledFunction(f.box(), f.level(), f.dim(), std::move(out));
}

std::vector<double> difference_values(const SampledFunction& f, Vec2 h, int r,
                                      const Region& region) {
  if (r < 1) throw std::invalid_argument("difference_values: r must be >= 1");
  const auto c = signed_binomials(r);
  const double hx = h.x / f.spacing();
  const double hy = f.dim() == 2 ? h.y / f.spacing() : 0.0;
  const long nx = f.nx();
  const long ny = f.ny();
  const auto v = f.values();
  std::vector<double> out;

  auto diff_at = [&](double tx, double ty) {
    double d = 0.0;
    for (int i = 0; i <= r; ++i) {
      d += c[static_cast<std::size_t>(i)] * interp_or_zero(v, nx, ny, tx + i * hx, ty + i * hy);
    }
    return d;
  };

  if (!region.is_whole_space()) {
    const LipschitzDomain& dom = region.domain();
    const Box bb = dom.bounding_box();
    const Box fb = f.box();
    const double tol = 1e-12;
    if (bb.lo.x < fb.lo.x - tol || bb.hi.x > fb.hi.x + tol ||
        (f.dim() == 2 && (bb.lo.y < fb.lo.y - tol || bb.hi.y > fb.hi.y + tol))) {
      throw std::invalid_argument("difference_values: domain is not inside the grid box");
    }
    out.reserve(f.size());
    for (long iy = 0; iy < ny; ++iy) {
      for (long ix = 0; ix < nx; ++ix) {
        const Vec2 x = f.node(ix, iy);
        if (!dom.segment_in_domain(x, h, r)) continue;
        out.push_back(diff_at(static_cast<double>(ix), static_cast<double>(iy)));
      }
    }
    return out;
  }

  // Whole space: lattice points x with x + i h inside the box for some i, each
  // visited once (first i that hits).
  const double xmax = static_cast<double>(nx - 1);
  const double ymax = static_cast<double>(ny - 1);
  auto hits = [&](long a, long b, int i) {
    const double tx = static_cast<double>(a) + i * hx;
    const double ty = static_cast<double>(b) + i * hy;
    return tx >= 0.0 && tx <= xmax && ty >= 0.0 && ty <= ymax;
  };
  for (int i = 0; i <= r; ++i) {
    const long a0 = static_cast<long>(std::ceil(-i * hx - 1e-9));
    const long a1 = static_cast<long>(std::floor(xmax - i * hx + 1e-9));
    const long b0 = ny == 1 ? 0 : static_cast<long>(std::ceil(-i * hy - 1e-9));
    const long b1 = ny == 1 ? 0 : static_cast<long>(std::floor(ymax - i * hy + 1e-9));
    for (long b = b0; b <= b1; ++b) {
      for (long a = a0; a <= a1; ++a) {
        if (!hits(a, b, i)) continue;
        bool seen = false;
        for (int k = 0; k < i && !seen; ++k) seen = hits(a, b, k);
        if (seen) continue;
        const double d = diff_at(static_cast<double>(a), static_cast<double>(b));
        if (d != 0.0) out.push_back(d);
      }
    }
  }
  return out;
}

double lp_quasinorm(const SampledFunction& f, double p, const Region& region) {
  if (!(p > 0.0)) throw std::invalid_argument("lp_quasinorm: p must be positive");
  if (region.is_whole_space()) return lp_of_values(f.values(), p, f.cell_measure());
  const LipschitzDomain& dom = region.domain();
  std::vector<double> vals;
  for (long iy = 0; iy < f.ny(); ++iy) {
    for (long ix = 0; ix < f.nx(); ++ix) {
      if (dom.contains(f.node(ix, iy))) vals.push_back(f.at(ix, iy));
    }
  }
  return lp_of_values(vals, p, f.cell_measure());
}

// ---------------------------------------------------------------------------

double bspline_eval(int k, double t) {
  if (k < 1) throw std::invalid_argument("bspline_eval: order must be >= 1");
  if (t < 0.0 || t > static_cast<double>(k)) return 0.0;
  // Cox-de Boor: B_k(t) = (t B_{k-1}(t) + (k - t) B_{k-1}(t - 1)) / (k - 1).
  std::vector<double> b(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) b[static_cast<std::size_t>(i)] = (t >= i && t < i + 1) ? 1.0 : 0.0;
  if (k == 1 && t == 1.0) return 0.0;
  for (int order = 2; order <= k; ++order) {
    for (int i = 0; i + order <= k; ++i) {
      const double u = t - i;
      b[static_cast<std::size_t>(i)] =
          (u * b[static_cast<std::size_t>(i)] + (order - u) * b[static_cast<std::size_t>(i + 1)]) /
          (order - 1);
    }
  }
  return b[0];
}

SmoothTestFunction SmoothTestFunction::polynomial(std::vector<std::vector<double>> coefficients) {
  SmoothTestFunction f;
  f.kind_ = Kind::polynomial;
  f.coeffs_ = std::move(coefficients);
  return f;
}

SmoothTestFunction SmoothTestFunction::monomial_x(int degree) {
  std::vector<std::vector<double>> c(static_cast<std::size_t>(degree) + 1, std::vector<double>{0.0});
  c[static_cast<std::size_t>(degree)][0] = 1.0;
  return polynomial(std::move(c));
}

SmoothTestFunction SmoothTestFunction::sine(Vec2 w, double phase) {
  SmoothTestFunction f;
  f.kind_ = Kind::sine;
  f.w_ = w;
  f.phase_ = phase;
  return f;
}

double SmoothTestFunction::value(Vec2 x) const { return directional_derivative(x, {0, 0}, 0); }

double SmoothTestFunction::directional_derivative(Vec2 x, Vec2 h, int k) const {
  if (k < 0) throw std::invalid_argument("directional_derivative: negative order");
  if (kind_ == Kind::sine) {
    const double b = dot(w_, h);
    return std::pow(b, k) * std::sin(dot(w_, x) + phase_ + k * std::numbers::pi / 2.0);
  }
  // g(t) = sum c_ab (x + t hx)^a (y + t hy)^b expanded in powers of t.
  std::vector<double> g(1, 0.0);
  auto binomial_poly = [](double base, double slope, int power) {
    std::vector<double> out(static_cast<std::size_t>(power) + 1);
    double b = 1.0;
    for (int i = 0; i <= power; ++i) {
      out[static_cast<std::size_t>(i)] = b * std::pow(base, power - i) * std::pow(slope, i);
      b = b * (power - i) / (i + 1);
    }
    return out;
  };
  for (std::size_t a = 0; a < coeffs_.size(); ++a) {
    for (std::size_t bb = 0; bb < coeffs_[a].size(); ++bb) {
      const double c = coeffs_[a][bb];
      if (c == 0.0) continue;
      const auto px = binomial_poly(x.x, h.x, static_cast<int>(a));
      const auto py = binomial_poly(x.y, h.y, static_cast<int>(bb));
      if (g.size() < px.size() + py.size() - 1) g.resize(px.size() + py.size() - 1, 0.0);
      for (std::size_t i = 0; i < px.size(); ++i) {
        for (std::size_t j = 0; j < py.size(); ++j) g[i + j] += c * px[i] * py[j];
      }
    }
  }
  // g^{(k)}(0) = k! * g_k
  if (static_cast<std::size_t>(k) >= g.size()) return 0.0;
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  return fact * g[static_cast<std::size_t>(k)];
}

double exact_difference(const ScalarField& f, Vec2 x, Vec2 h, int k) {
  if (k < 1) throw std::invalid_argument("exact_difference: k must be >= 1");
  const auto c = signed_binomials(k);
  double d = 0.0;
  for (int i = 0; i <= k; ++i) d += c[static_cast<std::size_t>(i)] * f(x + static_cast<double>(i) * h);
  return d;
}

SplineIdentityResult difference_spline_identity(const SmoothTestFunction& f, Vec2 x, Vec2 h,
                                                int k, int nodes) {
  if (k < 1) throw std::invalid_argument("difference_spline_identity: k must be >= 1");
  if (nodes < 1) throw std::invalid_argument("difference_spline_identity: need nodes");
  static constexpr std::array<double, 5> gl_x = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                 0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> gl_w = {0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};
  // Subintervals align with the integer knots of B_k.
  const int per_unit = std::max(1, nodes / (5 * k));
  const int pieces = per_unit * k;
  const double width = static_cast<double>(k) / pieces;
  double rhs = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double mid = (i + 0.5) * width;
    for (std::size_t q = 0; q < gl_x.size(); ++q) {
      const double t = mid + 0.5 * width * gl_x[q];
      rhs += 0.5 * width * gl_w[q] * f.directional_derivative(x + t * h, h, k) * bspline_eval(k, t);
    }
  }
  SplineIdentityResult res;
  res.lhs = exact_difference([&](Vec2 p) { return f.value(p); }, x, h, k);
  res.rhs = rhs;
  res.gap = std::abs(res.lhs - res.rhs);
  return res;
}

// ---------------------------------------------------------------------------

void write_grid(std::ostream& out, const SampledFunction& f) {
  out.precision(17);
  const Box b = f.box();
  out << "grid J=" << f.level() << " box=" << b.lo.x << ',' << b.lo.y << ',' << b.hi.x << ','
      << b.hi.y << " n=" << f.dim() << '\n';
  for (long iy = 0; iy < f.ny(); ++iy) {
    for (long ix = 0; ix < f.nx(); ++ix) {
      if (ix) out << ' ';
      out << f.at(ix, iy);
    }
    out << '\n';
  }
}

SampledFunction read_grid(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("grid file: missing header");
  std::istringstream hs(header);
  std::string tag;
  std::string jtok;
  std::string btok;
  std::string ntok = "n=2";
  hs >> tag >> jtok >> btok;
  hs >> ntok;
  if (tag != "grid" || jtok.rfind("J=", 0) != 0 || btok.rfind("box=", 0) != 0 ||
      ntok.rfind("n=", 0) != 0) {
    throw std::invalid_argument("grid file: malformed header '" + header + "'");
  }
  const int level = std::stoi(jtok.substr(2));
  const int dim = std::stoi(ntok.substr(2));
  std::string coords = btok.substr(4);
  std::replace(coords.begin(), coords.end(), ',', ' ');
  std::istringstream cs(coords);
  Box b;
  if (!(cs >> b.lo.x >> b.lo.y >> b.hi.x >> b.hi.y)) {
    throw std::invalid_argument("grid file: malformed box");
  }
  std::vector<double> values;
  double v = 0.0;
  while (in >> v) values.push_back(v);
  return SampledFunction(b, level, dim, std::move(values));
}

void write_csv_slice(std::ostream& out, const SampledFunction& f, long row_begin, long row_end) {
  out.precision(17);
  out << "x,y,value\n";
  row_begin = std::max(0L, row_begin);
  row_end = std::min(f.ny(), row_end);
  for (long iy = row_begin; iy < row_end; ++iy) {
    for (long ix = 0; ix < f.nx(); ++ix) {
      const Vec2 p = f.node(ix, iy);
      out << p.x << ',' << p.y << ',' << f.at(ix, iy) << '\n';
    }
  }
}

}  // namespace besovkit
