#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace besovkit {

/// Point or vector in the plane. One-dimensional objects use `x` only.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Axis-aligned closed box [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
  Vec2 lo;
  Vec2 hi;

  bool contains(Vec2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  Vec2 center() const { return 0.5 * (lo + hi); }
};

/// Euclidean distance from p to the closed box (0 inside).
double distance_point_box(Vec2 p, const Box& b);
/// Distance from p to the closed segment [a, b].
double distance_point_segment(Vec2 p, Vec2 a, Vec2 b);
/// Distance between closed segments [a, b] and [c, d].
double distance_segment_segment(Vec2 a, Vec2 b, Vec2 c, Vec2 d);
/// Distance between a closed segment and a closed box.
double distance_segment_box(Vec2 a, Vec2 b, const Box& box);
/// Parameter range [t0, t1] of the segment a + t(b - a), t in [0,1], inside the
/// box; empty when the segment misses it (Liang-Barsky clipping).
std::optional<std::array<double, 2>> clip_segment_box(Vec2 a, Vec2 b, const Box& box);
/// Parameter range of the segment inside the closed disk B(c, r).
std::optional<std::array<double, 2>> clip_segment_disk(Vec2 a, Vec2 b, Vec2 c, double r);

/// Cube Q_{j,m}: centered at 2^{-j} m with side length 2^{-j+1}.
struct DyadicCube {
  int level = 0;
  std::array<std::int64_t, 2> index{0, 0};
  int dim = 2;

  double side() const { return std::ldexp(1.0, 1 - level); }
  double half_side() const { return std::ldexp(1.0, -level); }
  Vec2 center() const {
    return {std::ldexp(static_cast<double>(index[0]), -level),
            dim == 2 ? std::ldexp(static_cast<double>(index[1]), -level) : 0.0};
  }
  double diameter() const { return side() * std::sqrt(static_cast<double>(dim)); }
  /// The closed box c * Q (same center, side scaled by `factor`).
  Box dilated(double factor) const;
  Box box() const { return dilated(1.0); }

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
  friend auto operator<=>(const DyadicCube&, const DyadicCube&) = default;
};

enum class DomainKind { interval, polygon, graph };

/// Point on the boundary polyline together with its arclength coordinate and
/// quadrature weight.
struct BoundarySample {
  Vec2 point;
  double arclength = 0.0;
  double weight = 0.0;
};

/// Bounded Lipschitz domain in dimension 1 (interval) or 2 (simple polygon or
/// truncated Lipschitz-graph region, polygonized at construction). The domain
/// is closed: boundary points count as inside.
class LipschitzDomain {
 public:
  static LipschitzDomain interval(double a, double b);
  /// Vertices in order (either orientation), without repeating the first one.
  static LipschitzDomain polygon(std::vector<Vec2> vertices);
  /// Region {(u, y): psi(u) < y < psi(u) + height, u in [u_0, u_N]} with psi
  /// given by samples (u_k, psi_k), linear in between. Throws when the samples
  /// violate the declared Lipschitz constant.
  static LipschitzDomain graph(std::vector<Vec2> psi_samples, double lipschitz, double height);

  static LipschitzDomain unit_square();
  /// L-shape [0,1]^2 minus (1/2,1]^2.
  static LipschitzDomain l_shape();
  /// Graph domain over [-1/2, 1/2] with `teeth` sawtooth teeth of slope `slope`.
  static LipschitzDomain sawtooth(int teeth = 4, double slope = 1.0, double height = 0.75);

  int dim() const { return dim_; }
  DomainKind kind() const { return kind_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  double lipschitz_constant() const { return lipschitz_; }
  double height() const { return height_; }
  const std::vector<Vec2>& graph_samples() const { return graph_samples_; }
  Box bounding_box() const { return bbox_; }
  double perimeter() const { return perimeter_; }
  double area() const;
  std::size_t edge_count() const;
  std::array<Vec2, 2> edge(std::size_t i) const;

  bool contains(Vec2 p) const;
  double distance_to_boundary(Vec2 p) const;
  /// Nearest boundary point and its arclength coordinate.
  BoundarySample project_to_boundary(Vec2 p) const;
  /// Boundary point at arclength coordinate s (taken modulo the perimeter).
  Vec2 boundary_point(double s) const;
  /// Subdivides every edge so consecutive samples are at most `max_spacing`
  /// apart; weights are half the adjacent piece lengths and sum to the perimeter.
  std::vector<BoundarySample> boundary_samples(double max_spacing) const;

  /// Closed segment [x, x + r h] inside the closed domain.
  bool segment_in_domain(Vec2 x, Vec2 h, int r) const;
  /// min over y in [a, b] of dist(y, boundary).
  double min_distance_on_segment(Vec2 a, Vec2 b) const;
  /// Distance from the closed box to the boundary set.
  double distance_box_to_boundary(const Box& box) const;
  bool box_meets_boundary(const Box& box) const;
  bool box_meets_domain(const Box& box) const;
  /// Arclength of the boundary inside the closed box.
  double boundary_length_in_box(const Box& box) const;
  /// Arclength of the boundary inside the closed disk.
  double boundary_length_in_disk(Vec2 center, double radius) const;

  LipschitzDomain scaled(double factor) const;
  LipschitzDomain reflected_x() const;

 private:
  LipschitzDomain() = default;
  void finalize();

  int dim_ = 2;
  DomainKind kind_ = DomainKind::polygon;
  std::vector<Vec2> vertices_;
  std::vector<double> cumulative_;  // arclength at each vertex
  std::vector<Vec2> graph_samples_;
  double lipschitz_ = 0.0;
  double height_ = 0.0;
  double perimeter_ = 0.0;
  Box bbox_;
};

enum class Carrier { domain, boundary };

/// Indices m with Q_{j,m} meeting the closed domain (carrier = domain) or its
/// boundary (carrier = boundary), sorted.
std::vector<std::array<std::int64_t, 2>> cubes_meeting(const LipschitzDomain& domain,
                                                       Carrier carrier, int level);

/// Lebesgue-measure estimate of the shell
/// {x : [x, x + k h] in domain, 2^{-j} <= min_{y in [x, x+kh]} dist(y) <= 2^{-j+1}}
/// for every j in [0, j_max] by midpoint enumeration at spacing 2^{-grid_level}.
struct ShellMeasures {
  std::vector<double> by_level;  // index j
  double admissible = 0.0;       // |Omega^h|
  bool truncated = false;        // some shell thinner than the grid
};
ShellMeasures omega_h_shells(const LipschitzDomain& domain, Vec2 h, int k, int j_max,
                             int grid_level = 10);
double omega_hj_measure(const LipschitzDomain& domain, Vec2 h, int k, int j,
                        int grid_level = 10);

/// Gauge h on (0,1]: either t^d or a tabulated nondecreasing sequence at 2^{-j}.
class HGauge {
 public:
  static HGauge power(double d);
  /// values[j] = h(2^{-j}); must be positive and nonincreasing in j.
  static HGauge tabulated(std::vector<double> values);

  double operator()(double t) const;
  double at_level(int j) const;
  /// Deepest tabulated level, or a large value for closed forms.
  int depth() const;
  bool is_power() const { return table_.empty(); }
  double exponent() const { return exponent_; }

 private:
  double exponent_ = 0.0;
  std::vector<double> table_;
};

struct RatioStats {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

/// sigma(B(gamma, r) cap Gamma) / h(r) over the given centers and radii.
RatioStats hset_ratio_stats(const LipschitzDomain& domain, const HGauge& gauge,
                            const std::vector<double>& radii, const std::vector<Vec2>& centers);
/// Same with `center_count` centers equally spaced in arclength.
RatioStats hset_ratio_stats(const LipschitzDomain& domain, const HGauge& gauge,
                            const std::vector<double>& radii, int center_count);

/// Domain text format (see README):
///   interval n=1            polygon n=2              graph L=<real> H=<real>
///   <a> <b>                 <x> <y> (one per line)   <u> <psi(u)> (one per line)
LipschitzDomain parse_domain(std::istream& in);
LipschitzDomain load_domain(const std::string& path);
void write_domain(std::ostream& out, const LipschitzDomain& domain);

}  // namespace besovkit
