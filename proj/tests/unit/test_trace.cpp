#include <cmath>
#include <string>

#include "besovkit/trace.hpp"
#include "doctest.h"

using namespace besovkit;

namespace {

AtomicDecomposition lip_decomposition() {
  AtomicDecomposition dec;
  dec.kind = AtomKind::lip;
  dec.coefficients = CoefficientArray(Carrier::domain, 2);
  return dec;
}

}  // namespace

TEST_CASE("trace restriction keeps boundary cubes only") {
  const auto dom = LipschitzDomain::unit_square();
  auto interior = lip_decomposition();
  interior.coefficients.set(3, {4, 4}, 2.0);
  interior.coefficients.set(2, {2, 2}, -1.0);
  CHECK(trace_restrict(interior, dom).coefficients().empty());

  auto straddling = lip_decomposition();
  straddling.coefficients.set(2, {2, 0}, 1.5);
  straddling.coefficients.set(3, {4, 4}, 2.0);
  const auto g = trace_restrict(straddling, dom);
  CHECK(g.coefficients().nonzero_count() == 1);
  CHECK(g.coefficients().get(2, {2, 0}) == 1.5);
  CHECK(g.atoms.kind == AtomKind::lip_gamma);
  CHECK(g.validate().empty());
  CHECK(g({0.5, 0.0}) == doctest::Approx(1.5 * straddling.atom(2, {2, 0})({0.5, 0.0})));

  for (double s : {0.2, 0.6}) {
    for (double p : {0.5, 2.0}) {
      CHECK(seq_norm_boundary(g.coefficients(), s, p, 1.0) <=
            seq_norm_domain(straddling.coefficients, s + 1.0 / p, p, 1.0));
    }
  }
  auto sig = lip_decomposition();
  sig.kind = AtomKind::sigma_p;
  CHECK_THROWS_AS(trace_restrict(sig, dom), std::invalid_argument);
}

TEST_CASE("K-smooth atoms restrict to valid boundary atoms") {
  const auto dom = LipschitzDomain::l_shape();
  auto dec = lip_decomposition();
  dec.kind = AtomKind::k_smooth;
  dec.coefficients.set(3, {4, 4}, 1.0);  // centred on the reentrant corner
  const auto g = trace_restrict(dec, dom);
  CHECK(g.coefficients().nonzero_count() == 1);
  CHECK(g.validate().empty());
}

TEST_CASE("random boundary decompositions validate") {
  const auto dom = LipschitzDomain::unit_square();
  const auto g = random_boundary_decomposition(dom, 2, 5);
  CHECK(g.coefficients().nonzero_count() == cubes_meeting(dom, Carrier::boundary, 0).size() +
                                               cubes_meeting(dom, Carrier::boundary, 1).size() +
                                               cubes_meeting(dom, Carrier::boundary, 2).size());
  CHECK(g.validate().empty());
}

TEST_CASE("cut-off profile") {
  CHECK(extension_cutoff(0.0) == 1.0);
  CHECK(extension_cutoff(-1.0) == 1.0);
  CHECK(extension_cutoff(2.0) == 0.0);
  CHECK(extension_cutoff(1.5) == doctest::Approx(0.5));
  CHECK(extension_cutoff(1.2) > extension_cutoff(1.7));
}

TEST_CASE("boundary atom extension") {
  const auto dom = LipschitzDomain::unit_square();
  const auto ctx = ExtensionContext::build(dom, 6);

  Atom one = make_atom(AtomKind::lip_gamma, 0, {0, 0}, 2.0, {}, 2);
  const Box dq = one.cube().dilated(2.0);
  one.custom = [dq](Vec2 x) { return dq.contains(x) ? 1.0 : 0.0; };
  one.custom_support = dq;
  CHECK(validate_atom(one, &dom).ok());
  const Atom e1 = extend_boundary_atom(one, ctx, 0.75, 2.0);
  CHECK(e1.kind == AtomKind::sigma_p);
  CHECK(e1.params.sigma == doctest::Approx(1.25));
  double mx = 0.0;
  for (int i = 0; i <= 16; ++i) {
    for (int k = 0; k <= 16; ++k) mx = std::max(mx, std::abs(e1({i / 16.0, k / 16.0})));
  }
  CHECK(mx == doctest::Approx(1.0).epsilon(1e-12));

  const Atom a = make_atom(AtomKind::lip_gamma, 2, {1, 0}, 2.0, {}, 2);
  const Atom ea = extend_boundary_atom(a, ctx, 0.75, 2.0);
  CHECK(ea({0.25, 0.0}) == doctest::Approx(a({0.25, 0.0})).epsilon(1e-12));
  CHECK(ea({0.9, 0.3}) == 0.0);  // outside 2Q
  CHECK(rescaled_atom_norm(ea, 1.25, 2.0, 4) < 16.0);

  Atom zero = a;
  zero.scale = 0.0;
  CHECK(extend_boundary_atom(zero, ctx, 0.75, 2.0)({0.3, 0.1}) == 0.0);

  try {
    extend_boundary_atom(make_atom(AtomKind::lip_gamma, 4, {1, 0}, 2.0, {}, 2), ctx, 0.75, 2.0);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("j_max >= 7") != std::string::npos);
  }
}

TEST_CASE("boundary function extension") {
  const auto dom = LipschitzDomain::unit_square();
  const auto ctx = ExtensionContext::build(dom, 6);
  const BesovParams prm{0.5, 2, 2, 1, 8};

  BoundaryDecomposition empty(dom);
  const auto e0 = extend_boundary_function(empty, ctx, prm);
  CHECK(e0.coefficients.empty());
  CHECK(reconstruct(e0, 0, grid_box(dom, 5), 5).max_abs() == 0.0);

  BoundaryDecomposition g(dom);
  g.atoms.coefficients.set(3, {3, 0}, 2.0);
  const auto e = extend_boundary_function(g, ctx, prm);
  CHECK(e.atom_params.sigma == doctest::Approx(0.75 + 0.5));
  CHECK(seq_norm_domain(e.coefficients, 1.0, 2, 2) == seq_norm_boundary(g.coefficients(), 0.5, 2, 2));
  const auto F = reconstruct(e, 3, grid_box(dom, 6), 6);
  const Box patch = DyadicCube{3, {3, 0}, 2}.dilated(2.0);
  double outside = 0.0;
  for (long iy = 0; iy < F.ny(); ++iy) {
    for (long ix = 0; ix < F.nx(); ++ix) {
      if (!patch.contains(F.node(ix, iy))) outside = std::max(outside, std::abs(F.at(ix, iy)));
    }
  }
  CHECK(outside == 0.0);
  CHECK(F.max_abs() > 0.0);
  CHECK_THROWS_AS(extend_boundary_function(g, ctx, prm, 0.4), std::invalid_argument);
}

TEST_CASE("trace round trip") {
  const auto dom = LipschitzDomain::unit_square();
  const auto ctx = ExtensionContext::build(dom, 6);
  BoundaryDecomposition g(dom);
  g.atoms.coefficients.set(2, {1, 0}, 1.0);
  const auto r = roundtrip_report(g, ctx, {0.5, 2, 2, 1, 8}, 6);
  CHECK(r.direct_error <= 1e-12);
  CHECK(r.trace_ok());
  CHECK(r.extension_norm > 0.0);
  CHECK(r.ratio_ext > 0.0);

  const auto rz = roundtrip_report(BoundaryDecomposition(dom), ctx, {0.5, 2, 2, 1, 8}, 5);
  CHECK(rz.node_error == 0.0);
  CHECK(rz.extension_norm == 0.0);
  CHECK(rz.boundary_seq_norm == 0.0);

  const auto rnd = random_boundary_decomposition(dom, 2, 9);
  const auto reps = roundtrip_report(rnd, ctx, {{0.3, 2, 2, 1, 8}, {0.7, 2, 2, 1, 8}}, 5);
  REQUIRE(reps.size() == 2);
  for (const auto& x : reps) {
    CHECK(x.direct_error <= 1e-12);
    CHECK(x.trace_ok());
  }
  CHECK(reps[0].boundary_seq_norm < reps[1].boundary_seq_norm);
}

TEST_CASE("extension depends on the decomposition") {
  const auto ctx = ExtensionContext::build(LipschitzDomain::unit_square(), 6);
  const auto w = nonlinearity_witness(ctx, 2, {1, 0}, 6);
  CHECK(w.trace_gap <= 1e-12);
  CHECK(w.extension_gap > 1e-3);
}
