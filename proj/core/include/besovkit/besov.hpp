#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "besovkit/functions.hpp"
#include "besovkit/geometry.hpp"

namespace besovkit {

/// Smoothness s, integrability p, summability q (p, q may be infinity),
/// difference order r > s and dyadic truncation j_max.
struct BesovParams {
  double s = 0.5;
  double p = 2.0;
  double q = 2.0;
  int r = 1;
  int j_max = 8;

  /// Throws std::invalid_argument unless s > 0, p > 0, q > 0, r > s, j_max >= 0.
  void validate() const;
};

using CubeIndex = std::array<std::int64_t, 2>;

/// Coefficients lambda_{j,m} per level, carried by the domain or its boundary.
class CoefficientArray {
 public:
  using Level = std::map<CubeIndex, double>;

  CoefficientArray(Carrier carrier = Carrier::domain, int dim = 2) : carrier_(carrier), dim_(dim) {}

  Carrier carrier() const { return carrier_; }
  int dim() const { return dim_; }
  void set(int j, CubeIndex m, double value);
  void add(int j, CubeIndex m, double value);
  double get(int j, CubeIndex m) const;
  const std::map<int, Level>& levels() const { return levels_; }
  std::size_t nonzero_count() const;
  bool empty() const { return nonzero_count() == 0; }
  int max_level() const;

  CoefficientArray scaled(double c) const;
  /// Same entries, relabelled carrier.
  CoefficientArray with_carrier(Carrier c) const;
  /// Entries whose cube meets the boundary of `domain`, carrier = boundary.
  CoefficientArray restricted_to_boundary(const LipschitzDomain& domain) const;
  /// Throws std::invalid_argument when a nonzero entry sits on a cube that
  /// does not meet the carrier set.
  void validate_support(const LipschitzDomain& domain) const;

 private:
  Carrier carrier_;
  int dim_;
  std::map<int, Level> levels_;
};

/// `coefficients carrier=<domain|boundary> n=<dim>` then `j m1 [m2] value` lines.
void write_coefficients(std::ostream& out, const CoefficientArray& a);
/// Reads the body lines only (after any header) until EOF.
CoefficientArray read_coefficient_lines(std::istream& in, Carrier carrier, int dim);
CoefficientArray read_coefficients(std::istream& in);

/// Direction net H(t): t * u * 2^{-i}, i = 0, 1, 2, with 16 unit directions u
/// in the plane or u = +-1 on the line.
std::vector<Vec2> direction_net(double t, int dim);

double modulus_of_smoothness(const SampledFunction& f, double t, const BesovParams& params,
                             const Region& region);

/// omega_r(f, 2^{-j})_p for j = 0..j_max.
std::vector<double> modulus_profile(const SampledFunction& f, const BesovParams& params,
                                    const Region& region, int j_max);

/// Largest usable truncation: min(params.j_max, grid level - r).
int effective_j_max(const SampledFunction& f, const BesovParams& params);

/// lp + (sum_{j<=j_max} (2^{js} omega_j)^q)^{1/q} from a precomputed profile.
double besov_from_profile(double lp, const std::vector<double>& omegas, double s, double q,
                          int j_max);

double besov_norm_differences(const SampledFunction& f, const BesovParams& params,
                              const Region& region);

/// b^s_{p,q} with level weight 2^{j(s - n/p)}.
double seq_norm_domain(const CoefficientArray& lambda, double s, double p, double q);
/// b^s_{p,q}(Gamma) with level weight 2^{j(s - (n-1)/p)}. When `domain` is
/// given, entries off boundary cubes are rejected.
double seq_norm_boundary(const CoefficientArray& lambda, double s, double p, double q,
                         const LipschitzDomain* domain = nullptr);

struct HomogeneityResult {
  double dilated_norm = 0.0;   // ||f(lambda .)||
  double original_norm = 0.0;  // ||f||
  double ratio = 0.0;          // dilated / (lambda^{s-n/p} original)
};

/// f supported in B(0, 2^{-k}) (checked on node values); whole-space norms
/// with matched truncation so both sides see the same shifts.
HomogeneityResult homogeneity_ratio(const SampledFunction& f, int k, const BesovParams& params);

/// Product window psi(y) = prod_i P(y_i), P(t) = phi(t) / sum_k phi(t - k),
/// phi(t) = exp(1 - 1/(1 - t^2)) on (-1, 1).
double partition_profile(double t);
double window(Vec2 y, int dim);

struct SelfsimilarConfig {
  int dim = 2;
  int max_dilation = 3;          // j = 0..max_dilation
  int grid_level = 5;            // sampling level of each windowed dilate
  std::vector<Vec2> translations;  // empty: {-1,0,1}^n
  std::vector<Vec2> effective_translations() const;
  /// max |sum_l psi(x - l) - 1| over a grid of the box.
  static double partition_defect(const Box& box, int dim, int level);
};

struct SelfsimilarResult {
  double value = 0.0;
  int argmax_j = 0;
  Vec2 argmax_l;
  double sup_norm = 0.0;  // max |f| over the sampled windows
};

SelfsimilarResult selfsimilar_norm(const ScalarField& f, const BesovParams& params,
                                   const SelfsimilarConfig& config);
/// Throws std::invalid_argument when a dilated window leaves f's box.
SelfsimilarResult selfsimilar_norm(const SampledFunction& f, const BesovParams& params,
                                   const SelfsimilarConfig& config);

struct GnResult {
  BesovParams interpolated;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// s = (1-theta)s0 + theta s1, 1/p and 1/q likewise; r and j_max must agree.
GnResult gn_check(const SampledFunction& f, const BesovParams& params0,
                  const BesovParams& params1, double theta, const Region& region);

void write_norm_csv_header(std::ostream& out);
void write_norm_csv_row(std::ostream& out, const BesovParams& params, double value);

}  // namespace besovkit
