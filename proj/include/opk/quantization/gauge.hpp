#pragma once

#include <vector>

#include "opk/geometry/flow.hpp"
#include "opk/quantization/frame.hpp"

namespace opk {

//! Unitary-gauge transform of a kernel:
//! K_u(m, n) = K(m,m)^{-1/2} · K(m,n) · K(n,n)^{-1/2}.
//! Diagonal values become the identity; the chart loses the holomorphic flag
//! because the normalization mixes the slots' complex structure.
inline ChartKernel unitary_gauge(const ChartKernel& k) {
  ChartKernel u = k;
  u.holomorphic = false;
  u.eval = [k](const Point& m, const Point& n) -> CMat {
    const CMat left = herm_sqrt(k.eval(m, m)).inv_sqrt;
    const CMat right = herm_sqrt(k.eval(n, n)).inv_sqrt;
    return left * k.eval(m, n) * right;
  };
  return u;
}

//! A flow re-expressed in another gauge: the base maps are unchanged, but the
//! cocycle becomes matrix-valued.
struct GaugedFlow {
  FlowSpec flow;
  Representation rep;
};

//! Pushes a kernel-preserving flow into the unitary gauge:
//! c_u(t, m) = K(m,m)^{1/2} · c(t, m) · K(σ_t m, σ_t m)^{-1/2}.
inline GaugedFlow unitary_gauge_flow(const ChartKernel& k, const FlowSpec& flow,
                                     const Representation& t_rep) {
  GaugedFlow out;
  out.rep.kind = GroupKind::FullMatrix;
  out.rep.fiber_dim = k.fiber_dim;
  out.flow.sigma = flow.sigma;
  out.flow.field = flow.field;
  out.flow.cocycle = [k, flow, t_rep](double t, const Point& m) -> GroupParam {
    const CMat left = herm_sqrt(k.eval(m, m)).sqrt;
    const Point moved = flow.sigma(t, m);
    const CMat right = herm_sqrt(k.eval(moved, moved)).inv_sqrt;
    GroupParam g;
    g.matrix = left * t_rep.apply(flow.cocycle(t, m)) * right;
    return g;
  };
  return out;
}

//! Conjugates a pair's matrix field into the unitary gauge:
//! F_u(m) = K(m,m)^{1/2} · F(m) · K(m,m)^{-1/2}; the base field is unchanged.
inline HamiltonianPair unitary_gauge_pair(const ChartKernel& k, const HamiltonianPair& pair) {
  return HamiltonianPair{[k, pair](const Point& m) -> CMat {
                           const HermSqrt s = herm_sqrt(k.eval(m, m));
                           return s.sqrt * pair.F(m) * s.inv_sqrt;
                         },
                         pair.X};
}

//! Conjugates a generator form matrix assembled in the original gauge into the
//! unitary gauge over the same frame points: A_u = D · A · D with
//! D = blockdiag(K(p_j, p_j)^{-1/2}). Used to check that generator assembly in
//! the two gauges agrees.
inline CMat gauge_conjugate_generator(const ChartKernel& k, const std::vector<Point>& pts,
                                      const CMat& a) {
  const int n = k.fiber_dim;
  const int j = static_cast<int>(pts.size());
  CMat d = CMat::Zero(j * n, j * n);
  for (int i = 0; i < j; ++i) {
    d.block(i * n, i * n, n, n) = herm_sqrt(eval_kernel(k, pts[i], pts[i])).inv_sqrt;
  }
  return d * a * d;
}

}  // namespace opk
