#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "besovkit/geometry.hpp"

namespace besovkit {

using ScalarField = std::function<double(Vec2)>;

/// Node values on the uniform grid of spacing 2^{-level} covering `box`.
/// Box corners must be multiples of the spacing. In dimension 1 the box has
/// lo.y == hi.y == 0 and the grid has one row.
class SampledFunction {
 public:
  SampledFunction(Box box, int level, int dim, std::vector<double> values);

  static SampledFunction zeros(Box box, int level, int dim);
  static SampledFunction sample(Box box, int level, int dim, const ScalarField& f);

  const Box& box() const { return box_; }
  int level() const { return level_; }
  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  long nx() const { return nx_; }
  long ny() const { return ny_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double cell_measure() const { return dim_ == 2 ? spacing_ * spacing_ : spacing_; }

  Vec2 node(long ix, long iy) const {
    return {box_.lo.x + static_cast<double>(ix) * spacing_,
            dim_ == 2 ? box_.lo.y + static_cast<double>(iy) * spacing_ : 0.0};
  }
  double at(long ix, long iy) const { return values_[static_cast<std::size_t>(iy * nx_ + ix)]; }

  /// Multilinear interpolation; throws std::out_of_range outside the box.
  double evaluate(Vec2 x) const;
  /// Multilinear interpolation, 0 outside the box (extension by zero).
  double evaluate_or_zero(Vec2 x) const;

  /// g(x) = f(2^{-k} x): identical node values on the box scaled by 2^k at level - k.
  SampledFunction dilated(int k) const;
  SampledFunction scaled(double c) const;
  /// Node-wise product; grids must match exactly.
  SampledFunction multiplied(const SampledFunction& other) const;
  SampledFunction plus(const SampledFunction& other) const;
  bool same_grid(const SampledFunction& other) const;
  double max_abs() const;

 private:
  Box box_;
  int level_ = 0;
  int dim_ = 2;
  double spacing_ = 1.0;
  long nx_ = 1;
  long ny_ = 1;
  std::vector<double> values_;
};

/// Integration region: a Lipschitz domain, or all of R^n with every sampled
/// function extended by zero outside its box.
class Region {
 public:
  static Region whole_space() { return Region(); }
  Region(LipschitzDomain domain) : domain_(std::move(domain)) {}  // NOLINT: implicit by intent

  bool is_whole_space() const { return !domain_.has_value(); }
  const LipschitzDomain& domain() const { return *domain_; }

 private:
  Region() = default;
  std::optional<LipschitzDomain> domain_;
};

/// (sum |v|^p cell)^{1/p}, or max |v| for p = inf; exactly homogeneous under
/// power-of-two scaling.
double lp_of_values(std::span<const double> values, double p, double cell);

/// Delta^r_h f(x) = sum_i (-1)^{r-i} C(r,i) f(x + i h) at the nodes where the
/// whole segment [x, x + r h] lies in the closed domain, 0 elsewhere.
SampledFunction forward_difference(const SampledFunction& f, Vec2 h, int r,
                                   const LipschitzDomain& domain);

/// Values of Delta^r_h f over the integration set of `region` (restricted
/// differences on a domain; lattice points where some x + i h hits the box in
/// whole space). Returns the values with the cell measure of the lattice.
std::vector<double> difference_values(const SampledFunction& f, Vec2 h, int r,
                                      const Region& region);

double lp_quasinorm(const SampledFunction& f, double p, const Region& region);

/// Cardinal B-spline of order k (support [0, k], integral 1), Cox-de Boor recurrence.
double bspline_eval(int k, double t);

/// Closed-form test function with exact directional derivatives.
class SmoothTestFunction {
 public:
  /// sum c_{ab} x^a y^b; coefficients[a][b].
  static SmoothTestFunction polynomial(std::vector<std::vector<double>> coefficients);
  static SmoothTestFunction monomial_x(int degree);
  /// sin(w . x + phase).
  static SmoothTestFunction sine(Vec2 w, double phase = 0.0);

  double value(Vec2 x) const;
  /// d^k/dt^k f(x + t h).
  double directional_derivative(Vec2 x, Vec2 h, int k) const;

 private:
  enum class Kind { polynomial, sine } kind_ = Kind::polynomial;
  std::vector<std::vector<double>> coeffs_;
  Vec2 w_;
  double phase_ = 0.0;
};

struct SplineIdentityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

/// Delta^k_h f(x) versus int_0^k g^{(k)}(t) B_k(t) dt with g(t) = f(x + t h),
/// the integral by composite Gauss-Legendre with about `nodes` points.
SplineIdentityResult difference_spline_identity(const SmoothTestFunction& f, Vec2 x, Vec2 h,
                                                int k, int nodes = 10000);

/// Exact k-th forward difference of a closed-form function.
double exact_difference(const ScalarField& f, Vec2 x, Vec2 h, int k);

/// `grid J=<level> box=<x0,y0,x1,y1> n=<dim>` then row-major values.
void write_grid(std::ostream& out, const SampledFunction& f);
SampledFunction read_grid(std::istream& in);
/// CSV `x,y,value` of the rows iy in [row_begin, row_end).
void write_csv_slice(std::ostream& out, const SampledFunction& f, long row_begin, long row_end);

}  // namespace besovkit
