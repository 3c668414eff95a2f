#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "opk/opk.hpp"

using namespace opk;

namespace {

Point plane_point(double x, double y) {
  Point m(2);
  m << x, y;
  return m;
}

std::vector<Point> two_atom_frame_points() {
  return {plane_point(0.0, 0.0), plane_point(M_PI / 4.0, 0.0)};
}

std::vector<Point> gaussian_frame_points() {
  return {plane_point(0.0, 0.0), plane_point(0.5, 0.0), plane_point(-0.3, 0.2)};
}

}  // namespace

TEST_CASE("two-atom generator spectrum is the atom set", "[quantization]") {
  const TranslationModel model = translation_model(two_atom_measure());
  const CoherentFrame frame = build_frame(model.kernel, two_atom_frame_points());
  const CMat a = generator_matrix(frame, model.pair);

  CHECK(selfadjointness_residual(frame, a) < 1e-6);
  CHECK(spectrum_imag_residual(frame, a) < 1e-8);

  const Vec spec = whitened_spectrum(frame, a);
  REQUIRE(spec.size() == 2);
  CHECK(std::abs(spec[0] + 1.0) < 1e-9);
  CHECK(std::abs(spec[1] - 1.0) < 1e-9);
}

TEST_CASE("compressed propagator tracks the exact flow", "[quantization]") {
  const TranslationModel model = translation_model(two_atom_measure());
  const CoherentFrame frame = build_frame(model.kernel, two_atom_frame_points());
  const CMat a = generator_matrix(frame, model.pair);

  for (double t : {0.1, 0.5, 1.0}) {
    INFO("t = " << t);
    const Propagator prop = propagate(frame, a, t);
    CHECK(propagator_unitarity_residual(frame, prop) < 1e-12);
    CHECK(propagator_vs_flow_residual(frame, prop, model.flow, model.rep) < 1e-9);
  }

  // Group structure: U(0) is the identity on coefficients (the frame has full
  // rank here), and U(s)U(t) composes to U(s + t).
  const Propagator at_zero = propagate(frame, a, 0.0);
  CHECK(max_abs(CMat(at_zero.u - CMat::Identity(frame.dim(), frame.dim()))) < 1e-12);
  CHECK(propagator_group_residual(frame, a, 0.3, 0.45) < 1e-10);
}

TEST_CASE("propagation refuses an asymmetric generator", "[quantization]") {
  const TranslationModel model = translation_model(two_atom_measure());
  const CoherentFrame frame = build_frame(model.kernel, two_atom_frame_points());
  CMat bad = generator_matrix(frame, model.pair);
  bad(0, 1) += Complex(0.01, 0.0);
  CHECK_THROWS_AS(propagate(frame, bad, 0.5), std::domain_error);
}

TEST_CASE("matrix fields are recovered from generator diagonal blocks", "[quantization]") {
  {
    // Two-atom model at real points: the matrix field vanishes there.
    const TranslationModel model = translation_model(two_atom_measure());
    const CoherentFrame frame = build_frame(model.kernel, two_atom_frame_points());
    const CMat a = generator_matrix(frame, model.pair);
    for (int j = 0; j < 2; ++j) {
      CHECK(max_abs(reconstruct_F(frame, a, j)) < 1e-10);
    }
  }
  {
    // Normal-measure model at a complex point: F(z) = z - zbar.
    const TranslationModel model = translation_model(gaussian_measure());
    const CoherentFrame frame = build_frame(model.kernel, gaussian_frame_points());
    const CMat a = generator_matrix(frame, model.pair);
    const CMat rec = reconstruct_F(frame, a, 2);
    CHECK(std::abs(rec(0, 0) - Complex(0.0, 0.4)) < 1e-8);
  }
  {
    // Round trip through an explicit matrix-valued candidate on the bidisc:
    // the diagonal block inverts back to the candidate's value.
    const ChartKernel k = bidisc_kernel();
    std::vector<Point> pts = {Vec::Zero(4)};
    for (const Point& p : bidisc_frame_points()) pts.push_back(p);
    const CoherentFrame frame = build_frame(k, pts);
    const CMat a = generator_matrix(frame, bidisc_quoted_pair());
    CMat expected0 = CMat::Zero(2, 2);
    expected0(0, 0) = Complex(0.0, 1.0);
    expected0(1, 1) = Complex(0.0, -1.0);
    CHECK(max_abs(CMat(reconstruct_F(frame, a, 0) - expected0)) < 1e-5);
    CHECK(max_abs(CMat(reconstruct_F(frame, a, 1) - bidisc_F_hol(pts[1]))) < 1e-4);
    CHECK_THROWS_AS(reconstruct_F(frame, a, 99), std::invalid_argument);
  }
}

TEST_CASE("generator agrees with the section-operator matrix", "[quantization]") {
  {
    const TranslationModel model = translation_model(two_atom_measure());
    const CoherentFrame frame = build_frame(model.kernel, two_atom_frame_points());
    const ChartKernel k = model.kernel;
    const HamiltonianPair pair = model.pair;
    auto phi = [k, pair](const Point& m) -> CMat { return phi_from_pair(k, pair, m); };
    CHECK(generator_vs_ks_residual(frame, pair.X, phi) < 1e-5);
  }
  {
    const ChartKernel k = bidisc_kernel();
    const Representation rep = bidisc_representation();
    const FlowSpec flow = bidisc_flow("rot1");
    const CoherentFrame frame = build_frame(k, bidisc_frame_points());
    auto phi = [k, rep, flow](const Point& m) -> CMat { return -phi_from_cocycle(rep, flow, m); };
    CHECK(generator_vs_ks_residual(frame, flow.field, phi) < 1e-4);
  }
}

TEST_CASE("self-commutator of a pair maps to zero exactly", "[quantization]") {
  const TranslationModel model = translation_model(two_atom_measure());
  const CoherentFrame frame = build_frame(model.kernel, two_atom_frame_points());
  CHECK(prequantization_commutator_residual(frame, model.pair, model.pair) < 1e-12);
}

TEST_CASE("rotation commutator closes on the bracket generator", "[quantization]") {
  // In the unitary gauge the two single-factor rotations give symmetric form
  // matrices; their operator commutator reproduces the bracket pair's
  // generator through genuine operator composition.
  const ChartKernel k = bidisc_kernel();
  const Representation rep = bidisc_representation();
  const ChartKernel ku = unitary_gauge(k);
  const GaugedFlow g1 = unitary_gauge_flow(k, bidisc_flow("rot1"), rep);
  const GaugedFlow g2 = unitary_gauge_flow(k, bidisc_flow("rot2"), rep);
  const CoherentFrame frame = build_frame(ku, bidisc_frame_points());
  const HamiltonianPair p1 = flow_hamiltonian_pair(ku, g1.flow, g1.rep);
  const HamiltonianPair p2 = flow_hamiltonian_pair(ku, g2.flow, g2.rep);
  CHECK(prequantization_commutator_residual(frame, p1, p2) < 1e-4);
}

TEST_CASE("gauge transport conjugates the generator", "[quantization]") {
  const ChartKernel k = bidisc_kernel();
  const Representation rep = bidisc_representation();
  const std::vector<Point> pts = bidisc_frame_points();

  const ChartKernel ku = unitary_gauge(k);
  const GaugedFlow g1 = unitary_gauge_flow(k, bidisc_flow("rot1"), rep);
  const CoherentFrame frame_u = build_frame(ku, pts);
  const CoherentFrame frame_hol = build_frame(k, pts);

  const CMat a_u = generator_matrix(frame_u, g1.flow, g1.rep);
  const CMat a_hol = generator_matrix(frame_hol, bidisc_flow("rot1"), rep);
  const CMat conjugated = gauge_conjugate_generator(k, pts, a_hol);
  CHECK(max_abs(CMat(conjugated - a_u)) / (1.0 + max_abs(a_u)) < 1e-5);

  // The gauged kernel is the identity on its diagonal, so both routes see the
  // same whitened spectrum up to discretization error.
  CHECK(max_abs(CMat(eval_kernel(ku, pts[0], pts[0]) - CMat::Identity(2, 2))) < 1e-12);
  const Vec spec_u = whitened_spectrum(frame_u, a_u);
  const Vec spec_hol = whitened_spectrum(frame_hol, a_hol);
  CHECK((spec_u - spec_hol).cwiseAbs().maxCoeff() < 1e-5);

  CHECK(selfadjointness_residual(frame_u, a_u) < 1e-6);
  CHECK(spectrum_imag_residual(frame_hol, a_hol) < 1e-8);
}
