#pragma once

#include <stdexcept>
#include <vector>

#include "opk/core/kernel.hpp"
#include "opk/core/linalg.hpp"
#include "opk/core/numdiff.hpp"

namespace opk {

//! Connection coefficient along coordinate k:
//! θ_k(m) = K(m,m)^{-1} · ∂/∂n_k K(m,n)|_{n=m}  (central differences, one
//! Richardson level). Refuses points with near-degenerate K(m,m).
inline CMat connection_coord(const ChartKernel& k, const Point& m, int dir,
                             double scale = kFirstStep) {
  auto slot2 = [&](const Point& n) -> CMat { return eval_kernel(k, m, n); };
  const CMat d = deriv_coord(slot2, m, dir, scale);
  return herm_solve(eval_kernel(k, m, m), d);
}

//! Connection form contracted with a constant tangent direction u.
inline CMat connection_apply(const ChartKernel& k, const Point& m, const Vec& u,
                             double scale = kFirstStep) {
  auto slot2 = [&](const Point& n) -> CMat { return eval_kernel(k, m, n); };
  const CMat d = deriv_dir(slot2, m, u, scale);
  return herm_solve(eval_kernel(k, m, m), d);
}

//! Connection contracted with the value of a vector field at m (coordinate route,
//! Σ_k X_k(m) θ_k(m); matches the curvature contraction convention).
inline CMat connection_of_field(const ChartKernel& k, const Point& m,
                                const std::function<Vec(const Point&)>& field) {
  const Vec x = field(m);
  CMat out = CMat::Zero(k.fiber_dim, k.fiber_dim);
  for (int dir = 0; dir < k.chart_dim; ++dir) {
    if (x[dir] == 0.0) continue;
    out += x[dir] * connection_coord(k, m, dir);
  }
  return out;
}

//! Connection in Wirtinger form for complex coordinate pair i:
//! conjugate = false gives θ(∂/∂z_i), conjugate = true gives θ(∂/∂z̄_i).
inline CMat connection_wirtinger(const ChartKernel& k, const Point& m, int i, bool conjugate) {
  const CMat tx = connection_coord(k, m, 2 * i);
  const CMat ty = connection_coord(k, m, 2 * i + 1);
  const Complex iu(0.0, conjugate ? 1.0 : -1.0);
  return (tx + iu * ty) / 2.0;
}

//! Kernel-induced connection 1-form θ(m)(u).
struct Chart1Form {
  ChartKernel kernel;
  CMat operator()(const Point& m, const Vec& u) const { return connection_apply(kernel, m, u); }
  CMat coord(const Point& m, int dir) const { return connection_coord(kernel, m, dir); }
};

inline Chart1Form connection_form(const ChartKernel& k) { return Chart1Form{k}; }

//! Compatibility defect of the connection with the fiber metric K(m,m):
//! ‖ d/du K(m,m) − K(m,m)θ(m)(u) − θ(m)(u)* K(m,m) ‖ (largest entry).
inline double metric_compat_residual(const ChartKernel& k, const Point& m, const Vec& u) {
  auto diagonal = [&](const Point& p) -> CMat { return eval_kernel(k, p, p); };
  const CMat d = deriv_dir(diagonal, m, u);
  const CMat kk = eval_kernel(k, m, m);
  const CMat th = connection_apply(k, m, u);
  return max_abs(CMat(d - kk * th - th.adjoint() * kk));
}

}  // namespace opk
