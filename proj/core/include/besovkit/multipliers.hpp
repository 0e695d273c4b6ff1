#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "besovkit/besov.hpp"
#include "besovkit/functions.hpp"
#include "besovkit/geometry.hpp"

namespace besovkit {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares y = slope x + intercept. r2 = 1 for exact collinear data.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct NamedFamily {
  std::string name;
  std::vector<SampledFunction> members;
};

/// Ten smooth test functions on the grid: bumps of several widths and
/// centers, and windowed sines.
NamedFamily standard_test_family(const Box& box, int level, int dim);

struct MultiplierReport {
  std::string family;
  double ratio = 0.0;  // max ||m f|| / ||f||, a lower bound on the multiplier norm
  std::size_t argmax = 0;
  std::vector<double> ratios;
};

/// Throws std::invalid_argument when m and a family member live on different grids.
MultiplierReport multiplier_ratio(const SampledFunction& m, const NamedFamily& family,
                                  const BesovParams& params, const Region& region);

struct ChiRow {
  double sigma = 0.0;
  double q = 0.0;
  int j_max = 0;
  double value = 0.0;
};

struct ChiProfile {
  double p = 0.0;
  int r = 1;
  double lp = 0.0;
  std::vector<double> omegas;  // omega_r(chi, 2^{-j})_p, j = 0..J
  LineFit slope_fit;           // log2 omega_j against j over j = 1..J
  std::vector<ChiRow> rows;    // every sigma, q and truncation J_max = 0..J
};

/// chi_Omega sampled on the grid over its bounding box (1 at nodes in the
/// closed domain), whole-space differences. J = grid_level - r.
ChiProfile chi_profile(const LipschitzDomain& domain, double p, const std::vector<double>& sigmas,
                       const std::vector<double>& qs, int grid_level, int r = 1);

/// Truncated norms of one (sigma, q) pair against J_max.
std::vector<ChiRow> chi_sweep(const ChiProfile& profile, double sigma, double q);

void write_chi_csv(std::ostream& out, const ChiProfile& profile);

struct HsetSum {
  std::vector<double> per_j;          // sum over k <= K_max for each j
  double sup = 0.0;                   // max over j
  int argmax_j = 0;
  std::vector<int> k_checkpoints;     // K = 1, 2, 4, ..., K_max
  std::vector<double> partial_sums;   // at the argmax j, for each checkpoint
  double closed_form = -1.0;          // power gauges only, at the argmax j
  bool divergent = false;             // S(K) - S(K/2) >= 0.01 S(K)
};

/// sup_j sum_{k=0}^{K_max} 2^{k sigma q} (h(2^{-j}) / h(2^{-j-k}) 2^{-kn})^{q/p};
/// q = inf takes the max over k. Throws when the gauge table is shallower than J + K_max.
HsetSum hset_condition_sum(const HGauge& gauge, double sigma, double p, double q, int n, int J,
                           int K_max = 256);

struct MembershipReport {
  SelfsimilarResult selfsimilar;
  double linf = 0.0;        // max |f| at the grid nodes
  double linf_ratio = 0.0;  // linf / selfsimilar value
  bool holds(double c) const { return linf <= c * selfsimilar.value; }
};

MembershipReport selfsimilar_membership(const SampledFunction& f, const BesovParams& params,
                                        const SelfsimilarConfig& config);

}  // namespace besovkit
