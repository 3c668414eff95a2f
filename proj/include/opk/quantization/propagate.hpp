#pragma once

#include <cmath>
#include <stdexcept>

#include "opk/geometry/flow.hpp"
#include "opk/quantization/generator.hpp"

namespace opk {

//! Unitary propagator on the coherent span, stored as its action on frame
//! coefficient vectors (dim × dim, rank-limited by the whitener).
struct Propagator {
  CMat u;
  double t = 0.0;
  int rank = 0;
};

//! Generator form matrix pushed to the whitened orthonormal basis: W* A W.
inline CMat whitened_generator(const CoherentFrame& frame, const CMat& a) {
  return frame.whitener.w.adjoint() * a * frame.whitener.w;
}

//! Hermitian part of the whitened generator — the operator that is exponentiated.
inline CMat whitened_hamiltonian(const CoherentFrame& frame, const CMat& a) {
  return herm_part(whitened_generator(frame, a));
}

//! Ascending eigenvalues of the whitened Hermitian generator.
inline Vec whitened_spectrum(const CoherentFrame& frame, const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(whitened_hamiltonian(frame, a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

//! Largest imaginary part among the eigenvalues of the (un-symmetrized)
//! whitened generator; near zero whenever the form matrix is near-Hermitian.
inline double spectrum_imag_residual(const CoherentFrame& frame, const CMat& a) {
  Eigen::ComplexEigenSolver<CMat> es(whitened_generator(frame, a), /*computeEigenvectors=*/false);
  return es.eigenvalues().imag().cwiseAbs().maxCoeff();
}

//! Exponentiates the generator to the time-t propagator on frame coefficients:
//! U(t) = W · exp(+i t Ĥ) · W⁺ with Ĥ the whitened Hermitian generator.
//! Refuses generators that are far from symmetric.
inline Propagator propagate(const CoherentFrame& frame, const CMat& a, double t) {
  if (selfadjointness_residual(frame, a) > 1e-4) {
    throw std::domain_error("propagate: generator form matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(whitened_hamiltonian(frame, a));
  const Vec ev = es.eigenvalues();
  const CMat& v = es.eigenvectors();
  CVec phases(ev.size());
  for (int i = 0; i < ev.size(); ++i) phases[i] = std::polar(1.0, t * ev[i]);
  const CMat exp_h = v * phases.asDiagonal() * v.adjoint();
  Propagator p;
  p.u = frame.whitener.w * exp_h * frame.whitener.w_pinv;
  p.t = t;
  p.rank = frame.rank();
  return p;
}

//! Deviation of the propagator from unitarity in the frame metric: ‖U*GU − G‖.
inline double propagator_unitarity_residual(const CoherentFrame& frame, const Propagator& p) {
  const CMat& g = frame.system.gram;
  return max_abs(CMat(p.u.adjoint() * g * p.u - g));
}

//! Deviation from the one-parameter group law ‖U(s)·U(t) − U(s+t)‖.
inline double propagator_group_residual(const CoherentFrame& frame, const CMat& a, double s,
                                        double t) {
  const Propagator us = propagate(frame, a, s);
  const Propagator ut = propagate(frame, a, t);
  const Propagator ust = propagate(frame, a, s + t);
  return max_abs(CMat(us.u * ut.u - ust.u));
}

//! Largest frame-metric distance between the propagated coherent states and the
//! flow-transported ones: for each frame state (j, b), the norm of
//! U(t)·K(·,p_j)e_b − K(·,σ_t p_j)·T(c(t,p_j))e_b computed through kernel
//! inner products (the transported point need not be a frame point).
inline double propagator_vs_flow_residual(const CoherentFrame& frame, const Propagator& prop,
                                          const FlowSpec& flow, const Representation& t_rep) {
  const ChartKernel& k = frame.kernel();
  const int n = frame.fiber_dim();
  const auto& pts = frame.points();
  const int j = static_cast<int>(pts.size());
  double worst = 0.0;
  for (int col = 0; col < j; ++col) {
    const Point moved = flow.sigma(prop.t, pts[col]);
    if (!k.domain.contains(moved)) {
      throw std::domain_error("propagator_vs_flow_residual: flow leaves the chart domain");
    }
    const CMat trans = t_rep.apply(flow.cocycle(prop.t, pts[col]));
    const CMat moved_self = eval_kernel(k, moved, moved);
    for (int b = 0; b < n; ++b) {
      const CVec w = trans.col(b);
      const CVec c = prop.u.col(frame.system.index(col, b));
      CVec cross(frame.dim());
      for (int i = 0; i < j; ++i) {
        cross.segment(i * n, n) = eval_kernel(k, pts[i], moved) * w;
      }
      const double pp = ((c.adjoint() * frame.system.gram * c)(0)).real();
      const double ff = ((w.adjoint() * moved_self * w)(0)).real();
      const double pf = ((c.adjoint() * cross)(0)).real();
      worst = std::max(worst, std::sqrt(std::max(0.0, pp + ff - 2.0 * pf)));
    }
  }
  return worst;
}

//! Best-approximation defect of the flow-transported frame states within the
//! frame span: the largest distance from K(·, σ_t p_j)·T(c(t, p_j))e_b to its
//! orthogonal projection onto the span of the frame states. Any propagator
//! confined to the span tracks the flow no more closely than this floor; the
//! floor is zero exactly when the frame spans the full reproducing space.
inline double flow_projection_defect(const CoherentFrame& frame, double t, const FlowSpec& flow,
                                     const Representation& t_rep) {
  const ChartKernel& k = frame.kernel();
  const int n = frame.fiber_dim();
  const auto& pts = frame.points();
  const int j = static_cast<int>(pts.size());
  const CMat gram_pinv = frame.whitener.w * frame.whitener.w.adjoint();
  double worst = 0.0;
  for (int col = 0; col < j; ++col) {
    const Point moved = flow.sigma(t, pts[col]);
    if (!k.domain.contains(moved)) {
      throw std::domain_error("flow_projection_defect: flow leaves the chart domain");
    }
    const CMat trans = t_rep.apply(flow.cocycle(t, pts[col]));
    const CMat moved_self = eval_kernel(k, moved, moved);
    for (int b = 0; b < n; ++b) {
      const CVec w = trans.col(b);
      CVec cross(frame.dim());
      for (int i = 0; i < j; ++i) {
        cross.segment(i * n, n) = eval_kernel(k, pts[i], moved) * w;
      }
      const double ff = ((w.adjoint() * moved_self * w)(0)).real();
      const double proj = ((cross.adjoint() * gram_pinv * cross)(0)).real();
      worst = std::max(worst, std::sqrt(std::max(0.0, ff - proj)));
    }
  }
  return worst;
}

}  // namespace opk
