#include "besovkit/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace besovkit {

namespace {

std::uint64_t cell_key(std::int64_t a, std::int64_t b) {
  return (static_cast<std::uint64_t>(a + (1LL << 31)) << 32) |
         static_cast<std::uint64_t>(b + (1LL << 31));
}

bool closed_contains(const Box& b, Vec2 x) {
  return x.x >= b.lo.x && x.x <= b.hi.x && x.y >= b.lo.y && x.y <= b.hi.y;
}

WhitneyCube make_cell(int k, std::int64_t a, std::int64_t b) {
  WhitneyCube c;
  c.k = k;
  c.a = a;
  c.b = b;
  c.cube = DyadicCube{k + 1, {2 * a + 1, 2 * b + 1}, 2};
  c.diam = c.cube.diameter();
  return c;
}

}  // namespace

WhitneyCover::WhitneyCover(LipschitzDomain domain, int j_max, double gamma)
    : domain_(std::move(domain)), j_max_(j_max), gamma_(gamma) {
  if (domain_.dim() != 2) throw std::invalid_argument("whitney: planar domains only");
  if (j_max < 2) throw std::invalid_argument("whitney: j_max must be >= 2");
  if (!(gamma > 0.0)) throw std::invalid_argument("whitney: gamma must be positive");

  const Box bb = domain_.bounding_box();
  const double extent = std::max(bb.hi.x - bb.lo.x, bb.hi.y - bb.lo.y);
  k_root_ = std::min(0, -static_cast<int>(std::ceil(std::log2(extent))));
  const int k_max = j_max - 1;
  if (k_max < k_root_) throw std::invalid_argument("whitney: j_max below the root level");

  std::vector<WhitneyCube> stack;
  {
    const double sc = std::ldexp(1.0, k_root_);
    for (auto b = static_cast<std::int64_t>(std::floor(bb.lo.y * sc));
         b <= static_cast<std::int64_t>(std::floor(bb.hi.y * sc)); ++b) {
      for (auto a = static_cast<std::int64_t>(std::floor(bb.lo.x * sc));
           a <= static_cast<std::int64_t>(std::floor(bb.hi.x * sc)); ++a) {
        stack.push_back(make_cell(k_root_, a, b));
      }
    }
  }
  while (!stack.empty()) {
    WhitneyCube c = stack.back();
    stack.pop_back();
    const Box box = c.cube.box();
    // interior must meet Omega; shrink to drop cells touching only along an edge
    const double shrink = 1e-9 * c.side();
    const Box inner{{box.lo.x + shrink, box.lo.y + shrink}, {box.hi.x - shrink, box.hi.y - shrink}};
    if (!domain_.box_meets_domain(inner)) continue;
    c.dist = domain_.distance_box_to_boundary(box);
    if (c.dist >= c.diam) {
      cubes_.push_back(c);
    } else if (c.k >= k_max) {
      collar_.push_back(c);
    } else {
      for (int db = 1; db >= 0; --db) {
        for (int da = 1; da >= 0; --da) stack.push_back(make_cell(c.k + 1, 2 * c.a + da, 2 * c.b + db));
      }
    }
  }
  if (cubes_.empty()) throw std::invalid_argument("whitney: no cube accepted; raise j_max");
  auto order = [](const WhitneyCube& x, const WhitneyCube& y) {
    return std::tie(x.k, x.b, x.a) < std::tie(y.k, y.b, y.a);
  };
  std::sort(cubes_.begin(), cubes_.end(), order);
  std::sort(collar_.begin(), collar_.end(), order);
  lookup_.resize(static_cast<std::size_t>(k_max - k_root_ + 1));
  for (std::size_t i = 0; i < cubes_.size(); ++i) {
    lookup_[static_cast<std::size_t>(cubes_[i].k - k_root_)][cell_key(cubes_[i].a, cubes_[i].b)] = i;
  }
}

std::pair<int, int> WhitneyCover::level_window(Vec2 x) const {
  const int k_max = j_max_ - 1;
  const double delta = domain_.distance_to_boundary(x);
  if (!(delta > 0.0)) return {k_max + 1, k_max};
  // an accepted cube whose 6/5 dilate holds x has delta/5.2 <= diam <= delta/0.9
  const double r2 = std::sqrt(2.0);
  const int lo = static_cast<int>(std::floor(std::log2(0.9 * r2 / delta))) - 1;
  const int hi = static_cast<int>(std::ceil(std::log2(5.2 * r2 / delta))) + 1;
  return {std::max(lo, k_root_), std::min(hi, k_max)};
}

std::vector<std::size_t> WhitneyCover::active(Vec2 x) const {
  std::vector<std::size_t> out;
  const auto [lo, hi] = level_window(x);
  for (int k = lo; k <= hi; ++k) {
    const auto& map = lookup_[static_cast<std::size_t>(k - k_root_)];
    const double sc = std::ldexp(1.0, k);
    const auto ca = static_cast<std::int64_t>(std::floor(x.x * sc));
    const auto cb = static_cast<std::int64_t>(std::floor(x.y * sc));
    for (std::int64_t b = cb - 1; b <= cb + 1; ++b) {
      for (std::int64_t a = ca - 1; a <= ca + 1; ++a) {
        auto it = map.find(cell_key(a, b));
        if (it != map.end() && closed_contains(cubes_[it->second].support(), x)) {
          out.push_back(it->second);
        }
      }
    }
  }
  return out;
}

long WhitneyCover::containing(Vec2 x) const {
  if (!domain_.contains(x)) return -1;
  const auto [lo, hi] = level_window(x);
  for (int k = lo; k <= hi; ++k) {
    const auto& map = lookup_[static_cast<std::size_t>(k - k_root_)];
    const double sc = std::ldexp(1.0, k);
    const auto ca = static_cast<std::int64_t>(std::floor(x.x * sc));
    const auto cb = static_cast<std::int64_t>(std::floor(x.y * sc));
    for (std::int64_t b = cb - 1; b <= cb; ++b) {
      for (std::int64_t a = ca - 1; a <= ca; ++a) {
        auto it = map.find(cell_key(a, b));
        if (it != map.end() && closed_contains(cubes_[it->second].cube.box(), x)) {
          return static_cast<long>(it->second);
        }
      }
    }
  }
  return -1;
}

int WhitneyCover::overlap(Vec2 x) const { return static_cast<int>(active(x).size()); }

WhitneyCover whitney_decompose(const LipschitzDomain& domain, int j_max, double gamma) {
  return WhitneyCover(domain, j_max, gamma);
}

double whitney_bump(const WhitneyCube& q, Vec2 x) {
  const Vec2 c = q.cube.center();
  const double scale = 0.6 * q.side();
  const double y1 = (x.x - c.x) / scale;
  const double y2 = (x.y - c.y) / scale;
  if (std::abs(y1) >= 1.0 || std::abs(y2) >= 1.0) return 0.0;
  return std::exp(2.0 - 1.0 / (1.0 - y1 * y1) - 1.0 / (1.0 - y2 * y2));
}

std::vector<std::pair<std::size_t, double>> partition_weights(const WhitneyCover& cover, Vec2 x) {
  if (!cover.admissible(x)) {
    std::ostringstream msg;
    msg << "partition_weights: (" << x.x << ", " << x.y << ") is outside the Whitney region";
    throw std::out_of_range(msg.str());
  }
  std::vector<std::pair<std::size_t, double>> out;
  double total = 0.0;
  for (std::size_t i : cover.active(x)) {
    const double b = whitney_bump(cover.cubes()[i], x);
    if (b > 0.0) {
      out.emplace_back(i, b);
      total += b;
    }
  }
  for (auto& w : out) w.second /= total;
  return out;
}

// ---------------------------------------------------------------------------

BoundaryFunction::BoundaryFunction(const LipschitzDomain& domain, std::vector<double> arclengths,
                                   std::vector<double> values, double lipschitz)
    : domain_(domain),
      s_(std::move(arclengths)),
      v_(std::move(values)),
      lipschitz_(lipschitz),
      perimeter_(domain.perimeter()) {
  if (domain.dim() != 2) throw std::invalid_argument("BoundaryFunction: planar domains only");
  if (s_.empty() || s_.size() != v_.size() || s_.front() != 0.0) {
    throw std::invalid_argument("BoundaryFunction: need matching samples starting at arclength 0");
  }
  if (!(lipschitz >= 0.0)) throw std::invalid_argument("BoundaryFunction: negative Lipschitz bound");
  for (std::size_t k = 0; k < s_.size(); ++k) {
    if (!std::isfinite(v_[k])) throw std::invalid_argument("BoundaryFunction: non-finite value");
    if (s_[k] < 0.0 || s_[k] >= perimeter_ || (k > 0 && s_[k] <= s_[k - 1])) {
      throw std::invalid_argument("BoundaryFunction: arclengths must increase within [0, perimeter)");
    }
    points_.push_back(domain_.boundary_point(s_[k]));
  }
  edge_start_.assign(domain_.edge_count() + 1, 0.0);
  for (std::size_t i = 0; i < domain_.edge_count(); ++i) {
    const auto [a, b] = domain_.edge(i);
    edge_start_[i + 1] = edge_start_[i] + norm(b - a);
  }
  prefix_.assign(s_.size() + 1, 0.0);
  for (std::size_t k = 0; k < s_.size(); ++k) {
    const double next_s = k + 1 < s_.size() ? s_[k + 1] : perimeter_;
    const double next_v = k + 1 < s_.size() ? v_[k + 1] : v_[0];
    prefix_[k + 1] = prefix_[k] + 0.5 * (v_[k] + next_v) * (next_s - s_[k]);
  }
}

BoundaryFunction BoundaryFunction::sample(const LipschitzDomain& domain, double spacing,
                                          const std::function<double(Vec2)>& g, double lipschitz) {
  std::vector<double> s;
  std::vector<double> v;
  for (const auto& b : domain.boundary_samples(spacing)) {
    s.push_back(b.arclength);
    v.push_back(g(b.point));
  }
  return BoundaryFunction(domain, std::move(s), std::move(v), lipschitz);
}

double BoundaryFunction::at_arclength(double s) const {
  s = std::fmod(s, perimeter_);
  if (s < 0.0) s += perimeter_;
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - s_.begin()) - 1;
  const double s1 = k + 1 < s_.size() ? s_[k + 1] : perimeter_;
  const double v1 = k + 1 < s_.size() ? v_[k + 1] : v_.front();
  const double t = (s - s_[k]) / (s1 - s_[k]);
  return t == 0.0 ? v_[k] : v_[k] + t * (v1 - v_[k]);
}

double BoundaryFunction::operator()(Vec2 x) const {
  return at_arclength(domain_.project_to_boundary(x).arclength);
}

double BoundaryFunction::integral(double s0, double s1) const {
  if (s1 < s0) throw std::invalid_argument("BoundaryFunction::integral: s1 < s0");
  auto cumulative = [this](double s) {
    if (s >= perimeter_) return prefix_.back();
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - s_.begin()) - 1;
    return prefix_[k] + 0.5 * (v_[k] + at_arclength(s)) * (s - s_[k]);
  };
  return cumulative(s1) - cumulative(s0);
}

double BoundaryFunction::measured_lipschitz() const {
  double best = 0.0;
  for (std::size_t k = 0; k < points_.size(); ++k) {
    for (std::size_t l = k + 1; l < points_.size(); ++l) {
      const double d = norm(points_[k] - points_[l]);
      if (d > 0.0) best = std::max(best, std::abs(v_[k] - v_[l]) / d);
    }
  }
  return best;
}

double BoundaryFunction::max_abs() const {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

double boundary_average(const BoundaryFunction& a, const DyadicCube& cube, double gamma) {
  const LipschitzDomain& dom = a.domain();
  const Box box = cube.dilated(gamma);
  const auto& start = a.edge_starts();
  double total = 0.0;
  double length = 0.0;
  for (std::size_t i = 0; i < dom.edge_count(); ++i) {
    const auto [p, q] = dom.edge(i);
    const auto t = clip_segment_box(p, q, box);
    if (!t) continue;
    const double len = start[i + 1] - start[i];
    const double s0 = start[i] + (*t)[0] * len;
    const double s1 = std::min(start[i] + (*t)[1] * len, a.perimeter());
    if (s1 <= s0) continue;
    total += a.integral(s0, s1);
    length += s1 - s0;
  }
  if (!(length > 0.0)) {
    std::ostringstream msg;
    msg << "boundary_average: gamma*Q misses the boundary for cube j=" << cube.level << " m=("
        << cube.index[0] << ',' << cube.index[1] << ") gamma=" << gamma;
    throw std::runtime_error(msg.str());
  }
  return total / length;
}

// ---------------------------------------------------------------------------

WhitneyExtender::WhitneyExtender(const WhitneyCover& cover, const BoundaryFunction& a)
    : cover_(&cover), a_(&a) {
  mu_.reserve(cover.cubes().size());
  for (const auto& q : cover.cubes()) mu_.push_back(boundary_average(a, q.cube, cover.gamma()));
}

double WhitneyExtender::operator()(Vec2 x) const {
  const LipschitzDomain& dom = cover_->domain();
  if (dom.contains(x) && dom.distance_to_boundary(x) <= 1e-13) return (*a_)(x);
  const auto w = partition_weights(*cover_, x);
  double v = 0.0;
  for (const auto& [i, psi] : w) v += mu_[i] * psi;
  return v;
}

double WhitneyExtender::value_or_project(Vec2 x) const {
  const LipschitzDomain& dom = cover_->domain();
  if (!cover_->admissible(x) || dom.distance_to_boundary(x) <= 1e-13) return (*a_)(x);
  const auto w = partition_weights(*cover_, x);
  double v = 0.0;
  for (const auto& [i, psi] : w) v += mu_[i] * psi;
  return v;
}

double whitney_extend(const BoundaryFunction& a, const WhitneyCover& cover, Vec2 x) {
  return WhitneyExtender(cover, a)(x);
}

DerivativeBoundReport derivative_bound_report(const WhitneyExtender& ext, int k,
                                              const std::vector<Vec2>& points, double step) {
  if (k != 1 && k != 2) throw std::invalid_argument("derivative_bound_report: k must be 1 or 2");
  if (!(step > 0.0)) throw std::invalid_argument("derivative_bound_report: step must be positive");
  DerivativeBoundReport rep;
  const double lip = ext.boundary().lipschitz();
  const LipschitzDomain& dom = ext.cover().domain();
  const Vec2 ex{step, 0.0};
  const Vec2 ey{0.0, step};
  for (const Vec2& x : points) {
    const double delta = dom.distance_to_boundary(x);
    if (delta < 4.0 * step) {
      ++rep.skipped;
      continue;
    }
    try {
      double d = 0.0;
      if (k == 1) {
        const double dx = (ext(x + ex) - ext(x - ex)) / (2.0 * step);
        const double dy = (ext(x + ey) - ext(x - ey)) / (2.0 * step);
        d = std::max(std::abs(dx), std::abs(dy));
      } else {
        const double c = ext(x);
        const double dxx = (ext(x + ex) - 2.0 * c + ext(x - ex)) / (step * step);
        const double dyy = (ext(x + ey) - 2.0 * c + ext(x - ey)) / (step * step);
        const double dxy =
            (ext(x + ex + ey) - ext(x + ex - ey) - ext(x - ex + ey) + ext(x - ex - ey)) /
            (4.0 * step * step);
        d = std::max({std::abs(dxx), std::abs(dyy), std::abs(dxy)}) * delta;
      }
      ++rep.used;
      if (lip > 0.0) rep.constant = std::max(rep.constant, d / lip);
    } catch (const std::out_of_range&) {
      ++rep.skipped;
    }
  }
  return rep;
}

double mu_difference_constant(const WhitneyExtender& ext, const std::vector<Vec2>& points) {
  const double lip = ext.boundary().lipschitz();
  if (lip == 0.0) return 0.0;
  const auto& mu = ext.averages();
  const LipschitzDomain& dom = ext.cover().domain();
  double best = 0.0;
  for (const Vec2& x : points) {
    const auto act = ext.cover().active(x);
    if (act.size() < 2) continue;
    const double delta = dom.distance_to_boundary(x);
    for (std::size_t u = 0; u < act.size(); ++u) {
      for (std::size_t v = u + 1; v < act.size(); ++v) {
        best = std::max(best, std::abs(mu[act[u]] - mu[act[v]]) / (delta * lip));
      }
    }
  }
  return best;
}

double mu_difference_constant_pairs(const WhitneyExtender& ext) {
  const double lip = ext.boundary().lipschitz();
  if (lip == 0.0) return 0.0;
  const auto& mu = ext.averages();
  const auto& cubes = ext.cover().cubes();
  const LipschitzDomain& dom = ext.cover().domain();
  double best = 0.0;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const Box a = cubes[i].support();
    for (std::size_t k = i + 1; k < cubes.size(); ++k) {
      const Box b = cubes[k].support();
      const Box meet{{std::max(a.lo.x, b.lo.x), std::max(a.lo.y, b.lo.y)},
                     {std::min(a.hi.x, b.hi.x), std::min(a.hi.y, b.hi.y)}};
      if (meet.lo.x > meet.hi.x || meet.lo.y > meet.hi.y) continue;
      const double diff = std::abs(mu[i] - mu[k]);
      if (diff == 0.0) continue;
      best = std::max(best, diff / (dom.distance_box_to_boundary(meet) * lip));
    }
  }
  return best;
}

std::vector<Vec2> sample_points_per_cube(const WhitneyCover& cover, std::size_t per_cube,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec2> out;
  out.reserve(per_cube * cover.cubes().size());
  for (const auto& q : cover.cubes()) {
    const Box b = q.cube.box();
    for (std::size_t i = 0; i < per_cube; ++i) {
      const double tx = u(rng);
      const double ty = u(rng);
      out.push_back({b.lo.x + tx * (b.hi.x - b.lo.x), b.lo.y + ty * (b.hi.y - b.lo.y)});
    }
  }
  return out;
}

std::vector<Vec2> lattice_points_per_cube(const WhitneyCover& cover, int n) {
  if (n < 1) throw std::invalid_argument("lattice_points_per_cube: need n >= 1");
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n) * n * cover.cubes().size());
  for (const auto& q : cover.cubes()) {
    const Box b = q.cube.box();
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        out.push_back({b.lo.x + (ix + 0.5) / n * (b.hi.x - b.lo.x), b.lo.y + (iy + 0.5) / n * (b.hi.y - b.lo.y)});
      }
    }
  }
  return out;
}

std::vector<Vec2> sample_domain_points(const LipschitzDomain& domain, std::size_t count,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Box bb = domain.bounding_box();
  std::uniform_real_distribution<double> ux(bb.lo.x, bb.hi.x);
  std::uniform_real_distribution<double> uy(bb.lo.y, bb.hi.y);
  std::vector<Vec2> out;
  out.reserve(count);
  while (out.size() < count) {
    const Vec2 x{ux(rng), domain.dim() == 2 ? uy(rng) : 0.0};
    if (domain.contains(x)) out.push_back(x);
  }
  return out;
}

std::vector<Vec2> sample_admissible_points(const WhitneyCover& cover, std::size_t count,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Box bb = cover.domain().bounding_box();
  std::uniform_real_distribution<double> ux(bb.lo.x, bb.hi.x);
  std::uniform_real_distribution<double> uy(bb.lo.y, bb.hi.y);
  std::vector<Vec2> out;
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * count + 1000) {
      throw std::runtime_error("sample_admissible_points: admissible region too small");
    }
    const Vec2 x{ux(rng), uy(rng)};
    if (cover.admissible(x)) out.push_back(x);
  }
  return out;
}

void write_cover(std::ostream& out, const WhitneyCover& cover, const std::vector<double>* averages) {
  out.precision(17);
  const auto& cubes = cover.cubes();
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const auto& q = cubes[i];
    out << q.cube.level << ' ' << q.cube.index[0] << ' ' << q.cube.index[1] << ' ' << q.dist << ' '
        << q.diam << ' ';
    if (averages != nullptr && i < averages->size()) {
      out << (*averages)[i];
    } else {
      out << "nan";
    }
    out << '\n';
  }
  double max_dist = 0.0;
  for (const auto& q : cover.collar()) max_dist = std::max(max_dist, q.dist);
  out << "collar count=" << cover.collar().size() << " j=" << cover.j_max()
      << " max_dist=" << max_dist << '\n';
}

}  // namespace besovkit
