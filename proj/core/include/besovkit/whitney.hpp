#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <unordered_map>
#include <utility>
#include <vector>

#include "besovkit/functions.hpp"
#include "besovkit/geometry.hpp"

namespace besovkit {

/// Dyadic cell of side 2^{-k} with lower corner 2^{-k}(a, b), stored as the
/// cube Q_{k+1, (2a+1, 2b+1)}.
struct WhitneyCube {
  DyadicCube cube;
  int k = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
  double dist = 0.0;  // dist(Q, boundary), exact for polygons
  double diam = 0.0;

  double side() const { return cube.side(); }
  /// Closed 6/5 dilate (support of the partition bump).
  Box support() const { return cube.dilated(1.2); }
};

/// Truncated Whitney decomposition of a planar domain.
class WhitneyCover {
 public:
  WhitneyCover(LipschitzDomain domain, int j_max, double gamma);

  const LipschitzDomain& domain() const { return domain_; }
  int j_max() const { return j_max_; }
  double gamma() const { return gamma_; }
  const std::vector<WhitneyCube>& cubes() const { return cubes_; }
  /// Finest-level cells that still violate diam <= dist.
  const std::vector<WhitneyCube>& collar() const { return collar_; }

  /// Indices of accepted cubes whose closed 6/5 dilate contains x.
  std::vector<std::size_t> active(Vec2 x) const;
  /// Index of an accepted closed cube containing x, or -1.
  long containing(Vec2 x) const;
  /// x in Omega and inside some accepted closed cube.
  bool admissible(Vec2 x) const { return containing(x) >= 0; }
  /// Count of closed 6/5 dilates containing x.
  int overlap(Vec2 x) const;

 private:
  std::pair<int, int> level_window(Vec2 x) const;

  LipschitzDomain domain_;
  int j_max_;
  double gamma_;
  int k_root_ = 0;
  std::vector<WhitneyCube> cubes_;
  std::vector<WhitneyCube> collar_;
  std::vector<std::unordered_map<std::uint64_t, std::size_t>> lookup_;  // by k - k_root
};

/// Recursive subdivision: accept when diam <= dist <= 4 diam, subdivide when
/// dist < diam, discard cells missing Omega; finest cube level is j_max.
WhitneyCover whitney_decompose(const LipschitzDomain& domain, int j_max, double gamma = 3.0);

/// Normalized bump weights psi_i(x) over the active cubes.
/// Throws std::out_of_range outside the admissible region.
std::vector<std::pair<std::size_t, double>> partition_weights(const WhitneyCover& cover, Vec2 x);

/// Unnormalized bump prod_i exp(-1/(1 - y_i^2)) on the 6/5 dilate.
double whitney_bump(const WhitneyCube& q, Vec2 x);

/// Boundary samples a(gamma_k) at polyline nodes, linear in arclength between.
class BoundaryFunction {
 public:
  BoundaryFunction(const LipschitzDomain& domain, std::vector<double> arclengths,
                   std::vector<double> values, double lipschitz);
  /// Samples g at boundary nodes no further apart than `spacing`.
  static BoundaryFunction sample(const LipschitzDomain& domain, double spacing,
                                 const std::function<double(Vec2)>& g, double lipschitz);

  double lipschitz() const { return lipschitz_; }
  double perimeter() const { return perimeter_; }
  const std::vector<double>& arclengths() const { return s_; }
  const std::vector<double>& values() const { return v_; }
  const std::vector<Vec2>& points() const { return points_; }

  double at_arclength(double s) const;
  /// Value at the nearest boundary point.
  double operator()(Vec2 x) const;
  /// Integral of a over the arclength interval [s0, s1] (0 <= s0 <= s1 <= perimeter).
  double integral(double s0, double s1) const;
  /// max |a(gamma_k) - a(gamma_l)| / |gamma_k - gamma_l| over node pairs.
  double measured_lipschitz() const;
  double max_abs() const;
  const LipschitzDomain& domain() const { return domain_; }
  /// Arclength at the start of each polyline edge (plus the perimeter).
  const std::vector<double>& edge_starts() const { return edge_start_; }

 private:
  LipschitzDomain domain_;
  std::vector<double> s_;
  std::vector<double> v_;
  std::vector<Vec2> points_;
  std::vector<double> edge_start_;
  std::vector<double> prefix_;  // integral from 0 to s_k
  double lipschitz_;
  double perimeter_;
};

/// mu = average of a over (gamma Q) cap Gamma. Throws std::runtime_error naming
/// the cube when the intersection has zero length.
double boundary_average(const BoundaryFunction& a, const DyadicCube& cube, double gamma);

/// Ext a with the averages cached per cube.
class WhitneyExtender {
 public:
  WhitneyExtender(const WhitneyCover& cover, const BoundaryFunction& a);

  const WhitneyCover& cover() const { return *cover_; }
  const BoundaryFunction& boundary() const { return *a_; }
  const std::vector<double>& averages() const { return mu_; }

  /// a(x) on Gamma, sum mu_i psi_i(x) on the admissible region; throws
  /// std::out_of_range elsewhere.
  double operator()(Vec2 x) const;
  /// Like operator() but falls back to a at the nearest boundary point in the
  /// collar and outside Omega.
  double value_or_project(Vec2 x) const;

 private:
  const WhitneyCover* cover_;
  const BoundaryFunction* a_;
  std::vector<double> mu_;
};

double whitney_extend(const BoundaryFunction& a, const WhitneyCover& cover, Vec2 x);

struct DerivativeBoundReport {
  double constant = 0.0;  // max delta^{k-1} max_|alpha|=k |D^alpha Ext a| / Lip(a)
  std::size_t used = 0;
  std::size_t skipped = 0;
};

/// Central differences with the given step; points whose stencil leaves the
/// admissible region or with delta(x) < 4 step are skipped and counted.
DerivativeBoundReport derivative_bound_report(const WhitneyExtender& ext, int k,
                                              const std::vector<Vec2>& points,
                                              double step = 1.0 / 4096.0);

/// max |mu_i - mu_j| / (delta(x) Lip(a)) over active pairs at the sample points.
double mu_difference_constant(const WhitneyExtender& ext, const std::vector<Vec2>& points);

/// Same bound over every pair of cubes whose closed 6/5 dilates meet, with
/// delta the distance from their intersection to the boundary (no sampling).
double mu_difference_constant_pairs(const WhitneyExtender& ext);

/// per_cube uniform points in every accepted cube; the deep cubes near the
/// boundary get as many points as the large interior ones.
std::vector<Vec2> sample_points_per_cube(const WhitneyCover& cover, std::size_t per_cube,
                                         std::uint64_t seed);
/// n x n cell centers in every accepted cube, at the same relative positions.
std::vector<Vec2> lattice_points_per_cube(const WhitneyCover& cover, int n);
/// Deterministic rejection sample of admissible points.
std::vector<Vec2> sample_admissible_points(const WhitneyCover& cover, std::size_t count,
                                           std::uint64_t seed);
/// Deterministic uniform sample of points in the domain.
std::vector<Vec2> sample_domain_points(const LipschitzDomain& domain, std::size_t count,
                                       std::uint64_t seed);

/// `j m1 m2 dist diam mu` per cube (mu = nan without averages), then
/// `collar count=<n> j=<j_max> max_dist=<d>`.
void write_cover(std::ostream& out, const WhitneyCover& cover,
                 const std::vector<double>* averages = nullptr);

}  // namespace besovkit
