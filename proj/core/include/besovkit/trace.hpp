#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "besovkit/atoms.hpp"
#include "besovkit/whitney.hpp"

namespace besovkit {

/// Coefficients on boundary cubes with LipGamma atoms.
struct BoundaryDecomposition {
  std::shared_ptr<const LipschitzDomain> domain;
  AtomicDecomposition atoms;  // kind lip_gamma, carrier boundary

  explicit BoundaryDecomposition(const LipschitzDomain& dom);

  Atom atom(int j, CubeIndex m) const { return atoms.atom(j, m); }
  const CoefficientArray& coefficients() const { return atoms.coefficients; }
  /// sum lambda a(x); meaningful on the boundary.
  double operator()(Vec2 x) const;
  /// Violations of the LipGamma invariants over all atoms.
  std::vector<std::string> validate() const;
};

/// Random coefficients N(0,1) 2^{-j decay} on every boundary cube of levels 0..J.
BoundaryDecomposition random_boundary_decomposition(const LipschitzDomain& domain, int J,
                                                    std::uint64_t seed, double decay = 0.0);

/// Keeps the terms whose cube meets the boundary and re-labels the atoms as
/// LipGamma. Input atoms must be Lip or K-smooth.
BoundaryDecomposition trace_restrict(const AtomicDecomposition& dec, const LipschitzDomain& domain);

struct ExtensionContext {
  std::shared_ptr<const WhitneyCover> cover;
  int margin = 3;  // cover j_max >= atom level + margin

  /// Cover at level j_max with the averaging dilation used for extensions.
  static ExtensionContext build(const LipschitzDomain& domain, int j_max, double gamma = 8.0);
};

/// Smooth cut-off in one variable: 1 on [-1, 1], 0 outside (-2, 2).
double extension_cutoff(double t);

/// Whitney extension of the atom's boundary profile (projection onto the
/// boundary in the collar and outside Omega) times a cut-off equal to 1 on Q
/// and vanishing outside 2Q. Kind sigma_p with sigma = s' + 1/p.
/// Throws std::invalid_argument naming the required j_max when the cover is too coarse.
Atom extend_boundary_atom(const Atom& a, const ExtensionContext& ctx, double s_prime, double p);

/// s' = (s + 1) / 2 unless given. Coefficients are copied, atoms extended.
AtomicDecomposition extend_boundary_function(const BoundaryDecomposition& g,
                                             const ExtensionContext& ctx, const BesovParams& params,
                                             std::optional<double> s_prime = std::nullopt);

/// Grid covering the domain's bounding box at the given level.
Box grid_box(const LipschitzDomain& domain, int level);

struct RoundtripReport {
  double node_error = 0.0;        // max |Tr F - g| at boundary nodes, F on the grid
  double direct_error = 0.0;      // same with F evaluated exactly
  double interpolation_tolerance = 0.0;
  double extension_norm = 0.0;    // ||F|B^{s+1/p}_{p,q}(Omega)||
  double boundary_seq_norm = 0.0; // ||lambda|b^s_{p,q}(Gamma)||
  double trace_seq_norm = 0.0;    // boundary sequence norm of a Lip decomposition of F
  double ratio_ext = 0.0;         // extension_norm / boundary_seq_norm
  double ratio_tr = 0.0;          // trace_seq_norm / extension_norm
  std::size_t nodes = 0;
  bool trace_ok() const { return node_error <= interpolation_tolerance; }
};

RoundtripReport roundtrip_report(const BoundaryDecomposition& g, const ExtensionContext& ctx,
                                 const BesovParams& params, int grid_level);
/// One report per parameter set; the extension does not depend on s, so it is
/// built and sampled once.
std::vector<RoundtripReport> roundtrip_report(const BoundaryDecomposition& g,
                                              const ExtensionContext& ctx,
                                              const std::vector<BesovParams>& params,
                                              int grid_level);

struct NonlinearityWitness {
  double trace_gap = 0.0;      // max over boundary nodes of |Tr(F1 + F2)|, g1 + g2 = 0
  double extension_gap = 0.0;  // max over Omega grid nodes of |F1 + F2|
};

/// g1 = one level-j atom, g2 = minus the same function written as a coarser
/// atom; g1 + g2 = 0 on the boundary while Ext g1 + Ext g2 != 0.
NonlinearityWitness nonlinearity_witness(const ExtensionContext& ctx, int j, CubeIndex m,
                                         int grid_level);

}  // namespace besovkit
