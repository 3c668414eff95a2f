#pragma once

#include <cmath>
#include <stdexcept>

#include "opk/rkhs/gram.hpp"

namespace opk {

//! Element of the kernel's function space spanned by the sample columns:
//! f(·) = Σ_i K(·, p_i) v_i  with  v_i = Σ_a c_{(i,a)} e_a.
struct SpanElement {
  CVec c;  // length J·N, blocked by sample point
};

//! Pointwise value f(x) = Σ_i K(x, p_i) v_i.
inline CVec span_eval(const GramSystem& g, const SpanElement& f, const Point& x) {
  const int n = g.fiber_dim();
  CVec out = CVec::Zero(n);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    out += eval_kernel(g.kernel, x, g.points[i]) * f.c.segment(static_cast<int>(i) * n, n);
  }
  return out;
}

//! Function-space inner product ⟨f, h⟩ = c_f* G c_h (anti-linear in the first argument).
inline Complex span_inner(const GramSystem& g, const SpanElement& f, const SpanElement& h) {
  return (f.c.adjoint() * g.gram * h.c)(0);
}

inline double span_norm(const GramSystem& g, const SpanElement& f) {
  return std::sqrt(std::max(0.0, span_inner(g, f, f).real()));
}

//! Reproducing-property defect |⟨K(·,p)v, f⟩ − ⟨v, f(p)⟩|. The pairing with the
//! kernel column is expanded through kernel evaluations, so p need not be a
//! sample point of the system.
inline double reproducing_residual(const GramSystem& g, const SpanElement& f, const Point& p,
                                   const CVec& v) {
  const int n = g.fiber_dim();
  Complex lhs(0.0, 0.0);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    lhs += (v.adjoint() * eval_kernel(g.kernel, p, g.points[i]) *
            f.c.segment(static_cast<int>(i) * n, n))(0);
  }
  const Complex rhs = (v.adjoint() * span_eval(g, f, p))(0);
  return std::abs(lhs - rhs);
}

//! Checks the evaluation bound ‖f(p)‖ ≤ √‖K(p,p)‖₂ · ‖f‖ + slack.
inline bool norm_bound_check(const GramSystem& g, const SpanElement& f, const Point& p,
                             double slack = 1e-10) {
  const double lhs = span_eval(g, f, p).norm();
  const double rhs = std::sqrt(herm_norm(eval_kernel(g.kernel, p, p))) * span_norm(g, f);
  return lhs <= rhs + slack;
}

}  // namespace opk
