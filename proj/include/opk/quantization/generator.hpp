#pragma once

#include <functional>

#include "opk/geometry/bracket.hpp"
#include "opk/geometry/flow.hpp"
#include "opk/quantization/frame.hpp"

namespace opk {

//! Sesquilinear form matrix of the quantized generator on the coherent frame.
//! Block (i, j) is −i·[ (∂₂K)(p_i, p_j)·X(p_j) + K(p_i, p_j)·φ(p_j) ], so the
//! entry at ((i,a), (j,b)) is the pairing of the i-th frame state with the
//! generator applied to the j-th. The φ argument uses the same convention as
//! phi_from_pair; for a pair's vertical component the diagonal blocks reduce to
//! +i·K(p_j, p_j)·F(p_j), which reconstruct_F inverts.
inline CMat generator_matrix(const CoherentFrame& frame,
                             const std::function<Vec(const Point&)>& field,
                             const std::function<CMat(const Point&)>& phi) {
  const ChartKernel& k = frame.kernel();
  const int n = frame.fiber_dim();
  const auto& pts = frame.points();
  const int j = static_cast<int>(pts.size());
  CMat a(j * n, j * n);
  const Complex minus_i(0.0, -1.0);
  for (int col = 0; col < j; ++col) {
    const Vec x = field(pts[col]);
    const CMat ph = phi(pts[col]);
    for (int row = 0; row < j; ++row) {
      auto slot2 = [&](const Point& q) -> CMat { return eval_kernel(k, pts[row], q); };
      const CMat dk = deriv_dir(slot2, pts[col], x);
      a.block(row * n, col * n, n, n) =
          minus_i * (dk + eval_kernel(k, pts[row], pts[col]) * ph);
    }
  }
  return a;
}

//! Generator of a Hamiltonian pair: the vertical component is derived from the
//! pair itself (φ = −(F + θ(X))).
inline CMat generator_matrix(const CoherentFrame& frame, const HamiltonianPair& pair) {
  const ChartKernel& k = frame.kernel();
  auto phi = [k, pair](const Point& m) -> CMat { return phi_from_pair(k, pair, m); };
  return generator_matrix(frame, pair.X, phi);
}

//! Generator of a kernel-preserving flow: the vertical component is the negated
//! cocycle derivative, matching the pair route through F = φ_h − θ(X).
inline CMat generator_matrix(const CoherentFrame& frame, const FlowSpec& flow,
                             const Representation& t_rep) {
  auto phi = [t_rep, flow](const Point& m) -> CMat { return -phi_from_cocycle(t_rep, flow, m); };
  return generator_matrix(frame, flow.field, phi);
}

//! Deviation of the form matrix from Hermitian symmetry. Because the matrix
//! collects the frame pairings themselves, symmetry of the form is plain
//! conjugate symmetry of this matrix.
inline double selfadjointness_residual(const CoherentFrame&, const CMat& a) {
  return max_abs(CMat(a - a.adjoint()));
}

//! Recovers the matrix field at frame point index j from the generator's
//! diagonal block of coherent-state pairings: F(p_j) = −i·K(p_j,p_j)^{-1}·A_jj.
//! This inverts the assembly route above, so a generator built from a pair
//! returns that pair's matrix field (the global sign is part of the calibrated
//! convention set recorded in reports). Throws for degenerate K(p_j, p_j).
inline CMat reconstruct_F(const CoherentFrame& frame, const CMat& a, int j) {
  const int n = frame.fiber_dim();
  if (j < 0 || j >= static_cast<int>(frame.points().size())) {
    throw std::invalid_argument("reconstruct_F: frame point index out of range");
  }
  const CMat block = a.block(j * n, j * n, n, n);
  const CMat self = eval_kernel(frame.kernel(), frame.points()[j], frame.points()[j]);
  return Complex(0.0, -1.0) * herm_solve(self, block);
}

}  // namespace opk
