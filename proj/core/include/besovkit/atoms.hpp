#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "besovkit/besov.hpp"
#include "besovkit/functions.hpp"
#include "besovkit/geometry.hpp"

namespace besovkit {

enum class AtomKind { k_smooth, lip, sigma_p, lip_gamma };
/// bump: product of the interpolatory partition profile (smooth);
/// tent: product of hats (1 - |y_i|)_+ (Lipschitz, not C^1).
enum class AtomShape { bump, tent };

std::string to_string(AtomKind kind);
std::string to_string(AtomShape shape);
AtomKind parse_atom_kind(const std::string& s);
AtomShape parse_atom_shape(const std::string& s);
AtomShape default_shape(AtomKind kind);

struct AtomParams {
  int K = 2;           // smoothness order of K-atoms
  double sigma = 0.6;  // (sigma, p)-atoms
  double p = 2.0;
};

/// Unit template on [-1,1]^n: value 1 at 0, 0 at the other integer points,
/// and its integer translates sum to 1.
double atom_template(AtomShape shape, Vec2 y, int dim);

/// Amplitude putting the template inside the kind's normalization with slack 2.
/// Throws std::invalid_argument when no amplitude works (tent as a K-atom).
double atom_amplitude(AtomKind kind, AtomShape shape, const AtomParams& params, int dim);

struct Atom {
  AtomKind kind = AtomKind::k_smooth;
  AtomShape shape = AtomShape::bump;
  int level = 0;
  CubeIndex index{0, 0};
  int dim = 2;
  double d = 2.0;
  AtomParams params;
  double amplitude = 1.0;
  double scale = 1.0;
  /// Replaces the template when set; `custom_support` then bounds its support.
  std::function<double(Vec2)> custom;
  Box custom_support;

  DyadicCube cube() const { return DyadicCube{level, index, dim}; }
  /// Closed box outside which the atom vanishes.
  Box support() const;
  double operator()(Vec2 x) const;
  Atom scaled(double c) const;
};

Atom make_atom(AtomKind kind, int j, CubeIndex m, double d, const AtomParams& params,
               int dim = 2, std::optional<AtomShape> shape = std::nullopt);

struct AtomReport {
  std::vector<std::string> violations;
  double sup = 0.0;
  double lipschitz_quotient = 0.0;     // over 2^j (Lip kinds)
  double derivative_ratio = 0.0;       // max |D^alpha a| / 2^{|alpha| j} (K-smooth)
  double rescaled_norm = 0.0;          // ||a(2^{-j} .)|B^sigma_{p,p}|| when checked
  bool ok() const { return violations.empty(); }
};

/// Checks support, the kind's invariants and, for K-atoms with K > sigma, the
/// (sigma, p) condition. LipGamma atoms need the boundary's domain.
AtomReport validate_atom(const Atom& a, const LipschitzDomain* domain = nullptr);

/// ||a(2^{-j} .)|B^sigma_{p,p}(R^n)|| sampled at the given level.
double rescaled_atom_norm(const Atom& a, double sigma, double p, int grid_level = 6);

using AtomKey = std::pair<int, CubeIndex>;

struct AtomicDecomposition {
  CoefficientArray coefficients;
  AtomKind kind = AtomKind::k_smooth;
  AtomShape shape = AtomShape::bump;
  AtomParams atom_params;
  double d = 2.0;
  int dim = 2;
  BesovParams target;
  Box box;
  int grid_level = 0;
  std::map<AtomKey, double> scales;  // per-atom factor, default 1
  std::map<AtomKey, Atom> custom;    // explicit atoms, override the template
  std::vector<double> residual_sup;  // after each level
  std::vector<double> residual_lp;

  Atom atom(int j, CubeIndex m) const;
};

/// Hierarchical interpolation: level-j coefficients are residual(2^{-j} m) /
/// amplitude, then the level-j interpolant is subtracted. Needs J <= level - 2.
/// Throws std::runtime_error when the residual sup grows between levels,
/// unless `strict` is false.
AtomicDecomposition decompose(const SampledFunction& f, const BesovParams& params, int J,
                              AtomKind kind, const AtomParams& atom_params = {},
                              std::optional<AtomShape> shape = std::nullopt, double d = 2.0,
                              bool strict = true);

/// Sum of lambda a over levels j <= j_star on the decomposition grid.
SampledFunction reconstruct(const AtomicDecomposition& dec, int j_star);
SampledFunction reconstruct(const AtomicDecomposition& dec, int j_star, const Box& box, int level);

struct ReexpandResult {
  AtomicDecomposition output;
  double epsilon = 0.0;
  int max_overlap = 0;      // max #{l : eta^{k,l}_{j-k,w} != 0}
  int overlap_bound = 0;    // asserted bound N = 3^n
  double max_inner_norm = 0.0;  // max ||eta^{k}|b^sigma_{p,p}||
  double agreement = 0.0;   // sup |reconstruct(in) - reconstruct(out)| at grid nodes
};

/// Rewrites (sigma, p)-atoms as K-atoms: each source template is expanded by
/// hierarchical interpolation down to the grid level, nu_{j,w} = sum |eta||lambda|,
/// output atoms carry the factor |sum eta lambda| / nu. Throws std::runtime_error
/// if an inner expansion exceeds `inner_band` in b^sigma_{p,p}.
ReexpandResult reexpand(const AtomicDecomposition& dec, int K, double s,
                        double inner_band = 16.0);

struct Todo3Result {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  bool holds = false;
};

/// gamma[j][k] for 0 <= k <= j. alpha = inf uses sup over j and k.
Todo3Result todo3_check(const std::vector<std::vector<double>>& gamma, double alpha, double eps);
/// (sum_k 2^{-k eps alpha'})^{alpha / alpha'}, 1/alpha + 1/alpha' = 1.
double todo3_constant(double alpha, double eps);

/// `atoms kind=<kind> params=<key:value,...>` then `j m1 [m2] value` lines;
/// per-atom scales are folded into the values.
void write_decomposition(std::ostream& out, const AtomicDecomposition& dec);
AtomicDecomposition read_decomposition(std::istream& in);

}  // namespace besovkit
