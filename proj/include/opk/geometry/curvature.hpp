#pragma once

#include <functional>

#include "opk/geometry/connection.hpp"

namespace opk {

//! Curvature coefficient for the coordinate pair (j, k):
//! Ω_{jk}(m) = ∂_j θ_k − ∂_k θ_j + [θ_j, θ_k], evaluated with nested central
//! differences (outer step kNestedStep) in constant coordinate frames.
inline CMat curvature_coord(const ChartKernel& k, const Point& m, int j, int kdir,
                            double outer_scale = kNestedStep) {
  auto theta_j = [&](const Point& p) -> CMat { return connection_coord(k, p, j); };
  auto theta_k = [&](const Point& p) -> CMat { return connection_coord(k, p, kdir); };
  const CMat djk = deriv_coord(theta_k, m, j, outer_scale);
  const CMat dkj = deriv_coord(theta_j, m, kdir, outer_scale);
  const CMat tj = theta_j(m);
  const CMat tk = theta_k(m);
  return djk - dkj + tj * tk - tk * tj;
}

//! Curvature evaluated on two constant tangent directions by bilinear expansion
//! over the coordinate coefficients.
inline CMat curvature_apply(const ChartKernel& k, const Point& m, const Vec& u, const Vec& v) {
  CMat out = CMat::Zero(k.fiber_dim, k.fiber_dim);
  for (int j = 0; j < k.chart_dim; ++j) {
    for (int kk = j + 1; kk < k.chart_dim; ++kk) {
      const double coeff = u[j] * v[kk] - u[kk] * v[j];
      if (coeff == 0.0) continue;
      out += coeff * curvature_coord(k, m, j, kk);
    }
  }
  return out;
}

//! Curvature form Ω(m)(u,v), antisymmetric in (u, v).
struct Chart2Form {
  ChartKernel kernel;
  CMat operator()(const Point& m, const Vec& u, const Vec& v) const {
    return curvature_apply(kernel, m, u, v);
  }
  CMat coord(const Point& m, int j, int k) const { return curvature_coord(kernel, m, j, k); }
};

inline Chart2Form curvature(const Chart1Form& theta) { return Chart2Form{theta.kernel}; }

//! Curvature on the Wirtinger pair (∂/∂z̄_i, ∂/∂z_i) of complex coordinate pair i:
//! Ω(∂_z̄, ∂_z) = (−i/2) · Ω(∂_x, ∂_y). For difference kernels built from a scalar
//! weight χ this coefficient equals −(log χ)''.
inline Complex curvature_wirtinger_scalar(const ChartKernel& k, const Point& m, int i) {
  const CMat o = curvature_coord(k, m, 2 * i, 2 * i + 1);
  return Complex(0.0, -0.5) * o(0, 0);
}

//! Covariant differential of a matrix-valued function along a constant direction:
//! (DF)(m)(u) = d/du F + [θ(m)(u), F(m)].
inline CMat covariant_diff(const ChartKernel& k, const std::function<CMat(const Point&)>& f,
                           const Point& m, const Vec& u, double scale = kNestedStep) {
  const CMat df = deriv_dir(f, m, u, scale);
  const CMat th = connection_apply(k, m, u);
  const CMat fm = f(m);
  return df + th * fm - fm * th;
}

//! A candidate pair (F, X): matrix-valued function and base vector field.
struct HamiltonianPair {
  std::function<CMat(const Point&)> F;
  std::function<Vec(const Point&)> X;
};

//! Defect of the Hamiltonian equation X ⌟ Ω = DF at m: the maximum over
//! coordinate directions e_k of ‖Ω(m)(X(m), e_k) − (DF)(m)(e_k)‖.
inline double hamiltonian_residual(const ChartKernel& k, const HamiltonianPair& pair,
                                   const Point& m) {
  const Vec x = pair.X(m);
  double worst = 0.0;
  // Precompute coordinate curvature coefficients (antisymmetric in the pair).
  std::vector<std::vector<CMat>> omega(k.chart_dim, std::vector<CMat>(k.chart_dim));
  for (int j = 0; j < k.chart_dim; ++j) {
    for (int kk = j + 1; kk < k.chart_dim; ++kk) {
      omega[j][kk] = curvature_coord(k, m, j, kk);
      omega[kk][j] = -omega[j][kk];
    }
  }
  for (int dir = 0; dir < k.chart_dim; ++dir) {
    CMat contraction = CMat::Zero(k.fiber_dim, k.fiber_dim);
    for (int j = 0; j < k.chart_dim; ++j) {
      if (j == dir || x[j] == 0.0) continue;
      contraction += x[j] * omega[j][dir];
    }
    Vec e = Vec::Zero(k.chart_dim);
    e[dir] = 1.0;
    const CMat df = covariant_diff(k, pair.F, m, e);
    worst = std::max(worst, max_abs(CMat(contraction - df)));
  }
  return worst;
}

}  // namespace opk
