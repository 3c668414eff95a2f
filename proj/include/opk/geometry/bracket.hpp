#pragma once

#include <functional>
#include <vector>

#include "opk/geometry/curvature.hpp"

namespace opk {

//! Coefficient of the curvature term in the pair bracket under this library's
//! 2-form normalization. Calibrated so that two commuting kernel-preserving
//! flows bracket to zero (conventions carrying a ½ in the exterior derivative
//! write the same term with coefficient −2). Recorded in every report.
inline constexpr double kBracketCurvatureFactor = -1.0;

//! Lie bracket of vector fields [X, Y] = (X·∇)Y − (Y·∇)X by finite differences.
inline Vec lie_bracket_field(const std::function<Vec(const Point&)>& x,
                             const std::function<Vec(const Point&)>& y, const Point& m) {
  const Vec xm = x(m);
  const Vec ym = y(m);
  const Vec dxy = deriv_dir(y, m, xm);
  const Vec dyx = deriv_dir(x, m, ym);
  return dxy - dyx;
}

//! Pair bracket evaluated at m:
//! matrix part kBracketCurvatureFactor·Ω(m)(X,Y) + [F(m), G(m)]; field part [X, Y](m).
struct PairBracketValue {
  CMat matrix;
  Vec field;
};

inline PairBracketValue bracket(const ChartKernel& k, const HamiltonianPair& p1,
                                const HamiltonianPair& p2, const Point& m) {
  PairBracketValue out;
  const CMat omega = curvature_apply(k, m, p1.X(m), p2.X(m));
  const CMat f1 = p1.F(m);
  const CMat f2 = p2.F(m);
  out.matrix = kBracketCurvatureFactor * omega + f1 * f2 - f2 * f1;
  out.field = lie_bracket_field(p1.X, p2.X, m);
  return out;
}

//! The bracket as a pair of functions, evaluable anywhere in the chart.
inline HamiltonianPair bracket_pair(const ChartKernel& k, const HamiltonianPair& p1,
                                    const HamiltonianPair& p2) {
  return HamiltonianPair{
      [k, p1, p2](const Point& m) -> CMat { return bracket(k, p1, p2, m).matrix; },
      [p1, p2](const Point& m) -> Vec { return lie_bracket_field(p1.X, p2.X, m); }};
}

//! Cyclic-sum defect of the Jacobi identity on a triple of pairs at m, measured
//! over both the matrix and the field component.
inline double jacobi_residual(const ChartKernel& k, const HamiltonianPair& p1,
                              const HamiltonianPair& p2, const HamiltonianPair& p3,
                              const Point& m) {
  const HamiltonianPair b12 = bracket_pair(k, p1, p2);
  const HamiltonianPair b23 = bracket_pair(k, p2, p3);
  const HamiltonianPair b31 = bracket_pair(k, p3, p1);
  const PairBracketValue t1 = bracket(k, b12, p3, m);
  const PairBracketValue t2 = bracket(k, b23, p1, m);
  const PairBracketValue t3 = bracket(k, b31, p2, m);
  const CMat msum = t1.matrix + t2.matrix + t3.matrix;
  const Vec fsum = t1.field + t2.field + t3.field;
  return std::max(max_abs(msum), fsum.cwiseAbs().maxCoeff());
}

//! Vertical component associated with a pair: φ(m) = −(F(m) + θ(m)(X(m))).
//! This is the convention consumed by the generator and section-operator routes.
inline CMat phi_from_pair(const ChartKernel& k, const HamiltonianPair& pair, const Point& m) {
  return -(pair.F(m) + connection_of_field(k, m, pair.X));
}

}  // namespace opk
