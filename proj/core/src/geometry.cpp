#include "besovkit/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace besovkit {

namespace {

constexpr double kEps = 1e-13;

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), std::abs(c.x - a.x),
                                 std::abs(c.y - a.y), 1.0});
  if (std::abs(v) <= kEps * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) - kEps <= p.x && p.x <= std::max(a.x, b.x) + kEps &&
         std::min(a.y, b.y) - kEps <= p.y && p.y <= std::max(a.y, b.y) + kEps;
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

// Parameters t in [0,1] along [a,b] where it touches [c,d].
void intersection_parameters(Vec2 a, Vec2 b, Vec2 c, Vec2 d, std::vector<double>& out) {
  const Vec2 r = b - a;
  const Vec2 s = d - c;
  const double denom = cross(r, s);
  const double rr = dot(r, r);
  if (rr == 0.0) return;
  if (std::abs(denom) <= kEps * norm(r) * norm(s)) {
    // Parallel: only collinear overlaps matter.
    if (std::abs(cross(c - a, r)) > kEps * norm(r) * std::max(1.0, norm(c - a))) return;
    const double t0 = dot(c - a, r) / rr;
    const double t1 = dot(d - a, r) / rr;
    for (double t : {t0, t1}) {
      if (t >= 0.0 && t <= 1.0) out.push_back(t);
    }
    return;
  }
  const double t = cross(c - a, s) / denom;
  const double u = cross(c - a, r) / denom;
  if (t >= -kEps && t <= 1.0 + kEps && u >= -kEps && u <= 1.0 + kEps) {
    out.push_back(std::clamp(t, 0.0, 1.0));
  }
}

}  // namespace

double distance_point_box(Vec2 p, const Box& b) {
  const double dx = std::max({b.lo.x - p.x, 0.0, p.x - b.hi.x});
  const double dy = std::max({b.lo.y - p.y, 0.0, p.y - b.hi.y});
  return std::hypot(dx, dy);
}

double distance_point_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double distance_segment_segment(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({distance_point_segment(a, c, d), distance_point_segment(b, c, d),
                   distance_point_segment(c, a, b), distance_point_segment(d, a, b)});
}

std::optional<std::array<double, 2>> clip_segment_box(Vec2 a, Vec2 b, const Box& box) {
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec2 d = b - a;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x - box.lo.x, box.hi.x - a.x, a.y - box.lo.y, box.hi.y - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return std::nullopt;
  }
  return std::array<double, 2>{t0, t1};
}

std::optional<std::array<double, 2>> clip_segment_disk(Vec2 a, Vec2 b, Vec2 c, double r) {
  const Vec2 d = b - a;
  const Vec2 f = a - c;
  const double A = dot(d, d);
  const double B = 2.0 * dot(f, d);
  const double C = dot(f, f) - r * r;
  if (A == 0.0) {
    if (C <= 0.0) return std::array<double, 2>{0.0, 0.0};
    return std::nullopt;
  }
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double t0 = std::max(0.0, (-B - sq) / (2.0 * A));
  const double t1 = std::min(1.0, (-B + sq) / (2.0 * A));
  if (t0 > t1) return std::nullopt;
  return std::array<double, 2>{t0, t1};
}

double distance_segment_box(Vec2 a, Vec2 b, const Box& box) {
  if (clip_segment_box(a, b, box)) return 0.0;
  const Vec2 corners[4] = {box.lo, {box.hi.x, box.lo.y}, box.hi, {box.lo.x, box.hi.y}};
  double best = std::min(distance_point_box(a, box), distance_point_box(b, box));
  for (const Vec2& c : corners) best = std::min(best, distance_point_segment(c, a, b));
  return best;
}

Box DyadicCube::dilated(double factor) const {
  const Vec2 c = center();
  const double h = 0.5 * factor * side();
  if (dim == 1) return {{c.x - h, 0.0}, {c.x + h, 0.0}};
  return {{c.x - h, c.y - h}, {c.x + h, c.y + h}};
}

// ---------------------------------------------------------------------------
// LipschitzDomain

LipschitzDomain LipschitzDomain::interval(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("interval: need a < b");
  LipschitzDomain d;
  d.dim_ = 1;
  d.kind_ = DomainKind::interval;
  d.vertices_ = {{a, 0.0}, {b, 0.0}};
  d.finalize();
  return d;
}

LipschitzDomain LipschitzDomain::polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) throw std::invalid_argument("polygon: need at least 3 vertices");
  if (vertices.front() == vertices.back()) vertices.pop_back();
  LipschitzDomain d;
  d.dim_ = 2;
  d.kind_ = DomainKind::polygon;
  d.vertices_ = std::move(vertices);
  d.finalize();
  // Simplicity: non-adjacent edges must not touch.
  const std::size_t n = d.vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      const auto [a, b] = d.edge(i);
      const auto [c, e] = d.edge(j);
      if (segments_intersect(a, b, c, e)) {
        throw std::invalid_argument("polygon: edges " + std::to_string(i) + " and " +
                                    std::to_string(j) + " intersect");
      }
    }
  }
  return d;
}

LipschitzDomain LipschitzDomain::graph(std::vector<Vec2> psi_samples, double lipschitz,
                                       double height) {
  if (psi_samples.size() < 2) throw std::invalid_argument("graph: need at least 2 samples");
  if (!(height > 0.0)) throw std::invalid_argument("graph: height must be positive");
  std::sort(psi_samples.begin(), psi_samples.end(),
            [](Vec2 a, Vec2 b) { return a.x < b.x; });
  for (std::size_t i = 0; i < psi_samples.size(); ++i) {
    for (std::size_t j = i + 1; j < psi_samples.size(); ++j) {
      const double du = psi_samples[j].x - psi_samples[i].x;
      if (du <= 0.0) throw std::invalid_argument("graph: duplicate abscissa");
      if (std::abs(psi_samples[j].y - psi_samples[i].y) > lipschitz * du * (1.0 + 1e-12)) {
        throw std::invalid_argument("graph: samples violate the declared Lipschitz constant");
      }
    }
  }
  std::vector<Vec2> verts = psi_samples;
  for (auto it = psi_samples.rbegin(); it != psi_samples.rend(); ++it) {
    verts.push_back({it->x, it->y + height});
  }
  LipschitzDomain d = polygon(std::move(verts));
  d.kind_ = DomainKind::graph;
  d.graph_samples_ = std::move(psi_samples);
  d.lipschitz_ = lipschitz;
  d.height_ = height;
  return d;
}

LipschitzDomain LipschitzDomain::unit_square() {
  return polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

LipschitzDomain LipschitzDomain::l_shape() {
  return polygon({{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}});
}

LipschitzDomain LipschitzDomain::sawtooth(int teeth, double slope, double height) {
  if (teeth < 1) throw std::invalid_argument("sawtooth: need at least one tooth");
  const double w = 1.0 / teeth;
  std::vector<Vec2> samples;
  for (int i = 0; i <= 2 * teeth; ++i) {
    const double u = -0.5 + 0.5 * w * i;
    const double psi = (i % 2 == 1) ? slope * 0.5 * w : 0.0;
    samples.push_back({u, psi});
  }
  return graph(std::move(samples), slope, height);
}

void LipschitzDomain::finalize() {
  cumulative_.assign(vertices_.size() + 1, 0.0);
  bbox_ = {vertices_.front(), vertices_.front()};
  for (const Vec2& v : vertices_) {
    bbox_.lo.x = std::min(bbox_.lo.x, v.x);
    bbox_.lo.y = std::min(bbox_.lo.y, v.y);
    bbox_.hi.x = std::max(bbox_.hi.x, v.x);
    bbox_.hi.y = std::max(bbox_.hi.y, v.y);
  }
  if (dim_ == 1) {
    perimeter_ = 2.0;  // counting measure on the two endpoints
    cumulative_ = {0.0, 1.0, 2.0};
    return;
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto [a, b] = edge(i);
    cumulative_[i + 1] = cumulative_[i] + norm(b - a);
  }
  perimeter_ = cumulative_.back();
}

double LipschitzDomain::area() const {
  if (dim_ == 1) return vertices_[1].x - vertices_[0].x;
  double s = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto [a, b] = edge(i);
    s += cross(a, b);
  }
  return 0.5 * std::abs(s);
}

std::size_t LipschitzDomain::edge_count() const { return dim_ == 1 ? 0 : vertices_.size(); }

std::array<Vec2, 2> LipschitzDomain::edge(std::size_t i) const {
  return {vertices_[i], vertices_[(i + 1) % vertices_.size()]};
}

bool LipschitzDomain::contains(Vec2 p) const {
  if (dim_ == 1) return p.x >= vertices_[0].x && p.x <= vertices_[1].x;
  if (distance_point_box(p, bbox_) > 0.0) return false;
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto [a, b] = edge(i);
    if (distance_point_segment(p, a, b) <= kEps) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xcross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xcross) inside = !inside;
    }
  }
  return inside;
}

double LipschitzDomain::distance_to_boundary(Vec2 p) const {
  if (dim_ == 1) return std::min(std::abs(p.x - vertices_[0].x), std::abs(p.x - vertices_[1].x));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto [a, b] = edge(i);
    best = std::min(best, distance_point_segment(p, a, b));
  }
  return best;
}

BoundarySample LipschitzDomain::project_to_boundary(Vec2 p) const {
  if (dim_ == 1) {
    const bool left = std::abs(p.x - vertices_[0].x) <= std::abs(p.x - vertices_[1].x);
    return {left ? vertices_[0] : vertices_[1], left ? 0.0 : 1.0, 1.0};
  }
  BoundarySample best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto [a, b] = edge(i);
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    const Vec2 q = a + t * ab;
    const double d = norm(p - q);
    if (d < best_d) {
      best_d = d;
      best.point = q;
      best.arclength = cumulative_[i] + t * std::sqrt(len2);
    }
  }
  return best;
}

Vec2 LipschitzDomain::boundary_point(double s) const {
  if (dim_ == 1) return s < 0.5 ? vertices_[0] : vertices_[1];
  s = std::fmod(s, perimeter_);
  if (s < 0.0) s += perimeter_;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t i = std::min<std::size_t>(
      static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cumulative_.begin() - 1, 0)),
      vertices_.size() - 1);
  const auto [a, b] = edge(i);
  const double len = cumulative_[i + 1] - cumulative_[i];
  const double t = len > 0.0 ? (s - cumulative_[i]) / len : 0.0;
  return a + t * (b - a);
}

std::vector<BoundarySample> LipschitzDomain::boundary_samples(double max_spacing) const {
  if (!(max_spacing > 0.0)) throw std::invalid_argument("boundary_samples: spacing must be > 0");
  if (dim_ == 1) return {{vertices_[0], 0.0, 1.0}, {vertices_[1], 1.0, 1.0}};
  std::vector<BoundarySample> out;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto [a, b] = edge(i);
    const double len = cumulative_[i + 1] - cumulative_[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / max_spacing - 1e-12)));
    for (int k = 0; k < pieces; ++k) {
      const double t = static_cast<double>(k) / pieces;
      out.push_back({a + t * (b - a), cumulative_[i] + t * len, 0.0});
    }
  }
  const std::size_t n = out.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double next = (k + 1 < n ? out[k + 1].arclength : perimeter_) - out[k].arclength;
    const double prev = k > 0 ? out[k].arclength - out[k - 1].arclength
                              : perimeter_ - out[n - 1].arclength;
    out[k].weight = 0.5 * (next + prev);
  }
  return out;
}

bool LipschitzDomain::segment_in_domain(Vec2 x, Vec2 h, int r) const {
  if (r < 1) throw std::invalid_argument("segment_in_domain: r must be >= 1");
  const Vec2 end = x + static_cast<double>(r) * h;
  if (!contains(x) || !contains(end)) return false;
  if (dim_ == 1 || (h.x == 0.0 && h.y == 0.0)) return true;
  std::vector<double> ts = {0.0, 1.0};
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto [a, b] = edge(i);
    intersection_parameters(x, end, a, b, ts);
  }
  std::sort(ts.begin(), ts.end());
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i + 1] - ts[i] <= 1e-12) continue;
    const double tm = 0.5 * (ts[i] + ts[i + 1]);
    if (!contains(x + tm * (end - x))) return false;
  }
  return true;
}

double LipschitzDomain::min_distance_on_segment(Vec2 a, Vec2 b) const {
  if (dim_ == 1) {
    return std::min(distance_to_boundary(a), distance_to_boundary(b));
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto [c, d] = edge(i);
    best = std::min(best, distance_segment_segment(a, b, c, d));
  }
  return best;
}

double LipschitzDomain::distance_box_to_boundary(const Box& box) const {
  if (dim_ == 1) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& v : vertices_) {
      const double d = std::max({box.lo.x - v.x, 0.0, v.x - box.hi.x});
      best = std::min(best, d);
    }
    return best;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto [a, b] = edge(i);
    best = std::min(best, distance_segment_box(a, b, box));
    if (best == 0.0) break;
  }
  return best;
}

bool LipschitzDomain::box_meets_boundary(const Box& box) const {
  if (dim_ == 1) {
    for (const Vec2& v : vertices_) {
      if (v.x >= box.lo.x && v.x <= box.hi.x) return true;
    }
    return false;
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto [a, b] = edge(i);
    if (clip_segment_box(a, b, box)) return true;
  }
  return false;
}

bool LipschitzDomain::box_meets_domain(const Box& box) const {
  if (dim_ == 1) return box.hi.x >= vertices_[0].x && box.lo.x <= vertices_[1].x;
  return box_meets_boundary(box) || contains(box.center());
}

double LipschitzDomain::boundary_length_in_box(const Box& box) const {
  if (dim_ == 1) {
    double count = 0.0;
    for (const Vec2& v : vertices_) {
      if (v.x >= box.lo.x && v.x <= box.hi.x) count += 1.0;
    }
    return count;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto [a, b] = edge(i);
    if (auto t = clip_segment_box(a, b, box)) total += ((*t)[1] - (*t)[0]) * norm(b - a);
  }
  return total;
}

double LipschitzDomain::boundary_length_in_disk(Vec2 center, double radius) const {
  if (dim_ == 1) {
    double count = 0.0;
    for (const Vec2& v : vertices_) {
      if (std::abs(v.x - center.x) <= radius) count += 1.0;
    }
    return count;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto [a, b] = edge(i);
    if (auto t = clip_segment_disk(a, b, center, radius)) {
      total += ((*t)[1] - (*t)[0]) * norm(b - a);
    }
  }
  return total;
}

LipschitzDomain LipschitzDomain::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
  if (kind_ == DomainKind::interval) {
    return interval(factor * vertices_[0].x, factor * vertices_[1].x);
  }
  if (kind_ == DomainKind::graph) {
    std::vector<Vec2> s;
    for (const Vec2& v : graph_samples_) s.push_back(factor * v);
    return graph(std::move(s), lipschitz_, factor * height_);
  }
  std::vector<Vec2> v;
  for (const Vec2& p : vertices_) v.push_back(factor * p);
  return polygon(std::move(v));
}

LipschitzDomain LipschitzDomain::reflected_x() const {
  if (kind_ == DomainKind::interval) return interval(-vertices_[1].x, -vertices_[0].x);
  if (kind_ == DomainKind::graph) {
    std::vector<Vec2> s;
    for (const Vec2& v : graph_samples_) s.push_back({-v.x, v.y});
    return graph(std::move(s), lipschitz_, height_);
  }
  std::vector<Vec2> v;
  for (auto it = vertices_.rbegin(); it != vertices_.rend(); ++it) v.push_back({-it->x, it->y});
  return polygon(std::move(v));
}

// ---------------------------------------------------------------------------

std::vector<std::array<std::int64_t, 2>> cubes_meeting(const LipschitzDomain& domain,
                                                       Carrier carrier, int level) {
  if (level < 0) throw std::invalid_argument("cubes_meeting: level must be >= 0");
  const Box bb = domain.bounding_box();
  const double scale = std::ldexp(1.0, level);
  const auto lo_x = static_cast<std::int64_t>(std::floor(bb.lo.x * scale)) - 1;
  const auto hi_x = static_cast<std::int64_t>(std::ceil(bb.hi.x * scale)) + 1;
  std::int64_t lo_y = 0;
  std::int64_t hi_y = 0;
  if (domain.dim() == 2) {
    lo_y = static_cast<std::int64_t>(std::floor(bb.lo.y * scale)) - 1;
    hi_y = static_cast<std::int64_t>(std::ceil(bb.hi.y * scale)) + 1;
  }
  std::vector<std::array<std::int64_t, 2>> out;
  for (std::int64_t mx = lo_x; mx <= hi_x; ++mx) {
    for (std::int64_t my = lo_y; my <= hi_y; ++my) {
      const DyadicCube q{level, {mx, my}, domain.dim()};
      const Box b = q.box();
      const bool hit = carrier == Carrier::boundary ? domain.box_meets_boundary(b)
                                                    : domain.box_meets_domain(b);
      if (hit) out.push_back({mx, my});
    }
  }
  return out;
}

ShellMeasures omega_h_shells(const LipschitzDomain& domain, Vec2 h, int k, int j_max,
                             int grid_level) {
  if (k < 1) throw std::invalid_argument("omega_h_shells: k must be >= 1");
  const double hn = norm(h);
  if (!(hn > 0.0 && hn <= 1.0)) throw std::invalid_argument("omega_h_shells: need 0 < |h| <= 1");
  ShellMeasures out;
  out.by_level.assign(static_cast<std::size_t>(j_max) + 1, 0.0);
  const double dx = std::ldexp(1.0, -grid_level);
  const Box bb = domain.bounding_box();
  const double cell = domain.dim() == 2 ? dx * dx : dx;
  const auto nx = static_cast<long>(std::ceil((bb.hi.x - bb.lo.x) / dx));
  const long ny = domain.dim() == 2 ? static_cast<long>(std::ceil((bb.hi.y - bb.lo.y) / dx)) : 1;
  for (long iy = 0; iy < ny; ++iy) {
    for (long ix = 0; ix < nx; ++ix) {
      const Vec2 x{bb.lo.x + (ix + 0.5) * dx,
                   domain.dim() == 2 ? bb.lo.y + (iy + 0.5) * dx : 0.0};
      if (!domain.segment_in_domain(x, h, k)) continue;
      out.admissible += cell;
      const double md = domain.min_distance_on_segment(x, x + static_cast<double>(k) * h);
      if (md <= 0.0 || md > 2.0) continue;
      const int j = std::max(0, static_cast<int>(std::ceil(-std::log2(md))));
      if (j <= j_max) out.by_level[static_cast<std::size_t>(j)] += cell;
    }
  }
  out.truncated = std::ldexp(1.0, -j_max + 1) < dx;
  return out;
}

double omega_hj_measure(const LipschitzDomain& domain, Vec2 h, int k, int j, int grid_level) {
  return omega_h_shells(domain, h, k, j, grid_level).by_level.at(static_cast<std::size_t>(j));
}

// ---------------------------------------------------------------------------

HGauge HGauge::power(double d) {
  if (!(d >= 0.0)) throw std::invalid_argument("HGauge::power: exponent must be >= 0");
  HGauge g;
  g.exponent_ = d;
  return g;
}

HGauge HGauge::tabulated(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("HGauge::tabulated: empty table");
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!(values[j] > 0.0)) throw std::invalid_argument("HGauge: values must be positive");
    if (j > 0 && values[j] > values[j - 1]) {
      throw std::invalid_argument("HGauge: table must be nonincreasing in j");
    }
  }
  HGauge g;
  g.table_ = std::move(values);
  return g;
}

double HGauge::operator()(double t) const {
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("HGauge: argument outside (0,1]");
  if (is_power()) return std::pow(t, exponent_);
  const int j = static_cast<int>(std::floor(-std::log2(t) + 1e-12));
  return at_level(j);
}

double HGauge::at_level(int j) const {
  if (j < 0) throw std::invalid_argument("HGauge: negative level");
  if (is_power()) return std::exp2(-exponent_ * j);
  if (static_cast<std::size_t>(j) >= table_.size()) {
    throw std::out_of_range("HGauge: level " + std::to_string(j) + " beyond tabulated depth");
  }
  return table_[static_cast<std::size_t>(j)];
}

int HGauge::depth() const {
  return is_power() ? std::numeric_limits<int>::max() / 2 : static_cast<int>(table_.size()) - 1;
}

RatioStats hset_ratio_stats(const LipschitzDomain& domain, const HGauge& gauge,
                            const std::vector<double>& radii, const std::vector<Vec2>& centers) {
  RatioStats st{std::numeric_limits<double>::infinity(), 0.0};
  for (double r : radii) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("hset_ratio_stats: radius outside (0,1]");
    const double hr = gauge(r);
    if (!(hr > 0.0)) throw std::invalid_argument("hset_ratio_stats: degenerate gauge");
    for (const Vec2& c : centers) {
      const double ratio = domain.boundary_length_in_disk(c, r) / hr;
      st.min_ratio = std::min(st.min_ratio, ratio);
      st.max_ratio = std::max(st.max_ratio, ratio);
    }
  }
  return st;
}

RatioStats hset_ratio_stats(const LipschitzDomain& domain, const HGauge& gauge,
                            const std::vector<double>& radii, int center_count) {
  if (center_count < 1) throw std::invalid_argument("hset_ratio_stats: need centers");
  std::vector<Vec2> centers;
  for (int i = 0; i < center_count; ++i) {
    centers.push_back(domain.boundary_point(domain.perimeter() * (i + 0.5) / center_count));
  }
  return hset_ratio_stats(domain, gauge, radii, centers);
}

// ---------------------------------------------------------------------------

namespace {

double parse_keyed(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) {
    throw std::invalid_argument("domain file: expected '" + key + "=<value>', got '" + token + "'");
  }
  return std::stod(token.substr(key.size() + 1));
}

}  // namespace

LipschitzDomain parse_domain(std::istream& in) {
  std::string line;
  std::string header;
  std::vector<Vec2> points;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (header.empty()) {
      header = line;
      continue;
    }
    Vec2 p;
    std::istringstream ps(line);
    if (!(ps >> p.x >> p.y)) throw std::invalid_argument("domain file: malformed line '" + line + "'");
    points.push_back(p);
  }
  std::istringstream hs(header);
  std::string kind;
  hs >> kind;
  if (kind == "polygon") {
    std::string dimtok;
    if (hs >> dimtok && parse_keyed(dimtok, "n") != 2.0) {
      throw std::invalid_argument("domain file: polygons require n=2");
    }
    return LipschitzDomain::polygon(std::move(points));
  }
  if (kind == "graph") {
    std::string ltok;
    std::string htok;
    if (!(hs >> ltok >> htok)) throw std::invalid_argument("domain file: graph needs L= and H=");
    return LipschitzDomain::graph(std::move(points), parse_keyed(ltok, "L"), parse_keyed(htok, "H"));
  }
  if (kind == "interval") {
    if (points.size() != 1) throw std::invalid_argument("domain file: interval needs one 'a b' line");
    return LipschitzDomain::interval(points[0].x, points[0].y);
  }
  throw std::invalid_argument("domain file: unknown header '" + header + "'");
}

LipschitzDomain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open domain file: " + path);
  return parse_domain(in);
}

void write_domain(std::ostream& out, const LipschitzDomain& domain) {
  out.precision(17);
  switch (domain.kind()) {
    case DomainKind::interval:
      out << "interval n=1\n" << domain.vertices()[0].x << ' ' << domain.vertices()[1].x << '\n';
      break;
    case DomainKind::graph:
      out << "graph L=" << domain.lipschitz_constant() << " H=" << domain.height() << '\n';
      for (const Vec2& v : domain.graph_samples()) out << v.x << ' ' << v.y << '\n';
      break;
    case DomainKind::polygon:
      out << "polygon n=2\n";
      for (const Vec2& v : domain.vertices()) out << v.x << ' ' << v.y << '\n';
      break;
  }
}

}  // namespace besovkit
