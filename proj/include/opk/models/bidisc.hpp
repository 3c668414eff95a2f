#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "opk/core/kernel.hpp"
#include "opk/core/rng.hpp"
#include "opk/geometry/curvature.hpp"
#include "opk/geometry/flow.hpp"

namespace opk {

//! Two-disc model: a rank-2 kernel over a chart of two unit discs,
//! z = (z₁, z₂) packed into real coordinates m = (x₁, y₁, x₂, y₂).
//!
//! K(z, w) = [ 1 + 1/(1 − z̄₁w₁)          w₁                    ]
//!           [ z̄₁                        1 + 1/(1 − z̄₂w₂) + z̄₁w₁ ]
//!
//! The first slot enters through conjugates only, so the chart is marked
//! holomorphic. Safe evaluation radius 0.95 per disc.

inline ChartKernel bidisc_kernel() {
  ChartKernel k;
  k.fiber_dim = 2;
  k.chart_dim = 4;
  k.holomorphic = true;
  k.domain = DomainBox::cube(4, 0.95);
  k.domain.disc_radius = {0.95, 0.95};
  k.eval = [](const Point& m, const Point& n) -> CMat {
    const Complex zb1 = std::conj(coord_complex(m, 0));
    const Complex zb2 = std::conj(coord_complex(m, 1));
    const Complex w1 = coord_complex(n, 0);
    const Complex w2 = coord_complex(n, 1);
    CMat k_val(2, 2);
    k_val(0, 0) = 1.0 + 1.0 / (1.0 - zb1 * w1);
    k_val(0, 1) = w1;
    k_val(1, 0) = zb1;
    k_val(1, 1) = 1.0 + 1.0 / (1.0 - zb2 * w2) + zb1 * w1;
    return k_val;
  };
  return k;
}

//! The model's diagonal-torus structure group representation on the rank-2 fiber.
inline Representation bidisc_representation() {
  Representation rep;
  rep.kind = GroupKind::DiagonalTorus;
  rep.fiber_dim = 2;
  return rep;
}

//! Closed-form candidate generator matrix F(z) quoted for this model, in the
//! original (holomorphic) gauge. At the origin it equals diag(i, −i).
inline CMat bidisc_F_hol(const Point& m) {
  const Complex z1 = coord_complex(m, 0);
  const Complex z2 = coord_complex(m, 1);
  const double a = std::norm(z1);
  const double b = std::norm(z2);
  const double d1 = (1.0 - b) * (4.0 - a - 2.0 * b);
  const double d2 = (1.0 - a) * (4.0 - a - 2.0 * b);
  const Complex i_unit(0.0, 1.0);
  CMat f(2, 2);
  f(0, 0) = i_unit * (4.0 - 3.0 * a - 2.0 * b + 2.0 * a * a + a * b - a * a * b) / d1;
  f(0, 1) = i_unit * z1 * (1.0 - a) * (2.0 - 4.0 * b + b * b) / d1;
  f(1, 0) = i_unit * std::conj(z1) * a * (1.0 - b) / d2;
  f(1, 1) = i_unit * (1.0 - a) * (-4.0 + 2.0 * a + 8.0 * b - 2.0 * b * b - 4.0 * a * b - a * b * b) / d1;
  return f;
}

namespace detail {

inline Point rotate_coords(const Point& m, double t1, double t2) {
  Point out(4);
  const Complex z1 = std::polar(1.0, t1) * coord_complex(m, 0);
  const Complex z2 = std::polar(1.0, t2) * coord_complex(m, 1);
  out[0] = z1.real();
  out[1] = z1.imag();
  out[2] = z2.real();
  out[3] = z2.imag();
  return out;
}

inline GroupParam torus_angles(double a, double b) {
  GroupParam g;
  g.angles = Vec(2);
  g.angles[0] = a;
  g.angles[1] = b;
  return g;
}

}  // namespace detail

//! Kernel-preserving circle flows on the two-disc model, by name:
//!  - "rot1":  σ_t(z₁, z₂) = (e^{it}z₁, z₂),        cocycle angles (0, t)
//!  - "rot2":  σ_t(z₁, z₂) = (z₁, e^{it}z₂),        cocycle angles (0, 0)
//!  - "sigma": σ_t(z₁, z₂) = (e^{it}z₁, e^{−it}z₂), cocycle angles (0, t)
//! The cocycle angle families were solved from the invariance identity and are
//! verified against it in the test suite.
inline FlowSpec bidisc_flow(const std::string& name) {
  FlowSpec flow;
  if (name == "rot1") {
    flow.sigma = [](double t, const Point& m) { return detail::rotate_coords(m, t, 0.0); };
    flow.cocycle = [](double t, const Point&) { return detail::torus_angles(0.0, t); };
    flow.field = [](const Point& m) {
      Vec x(4);
      x << -m[1], m[0], 0.0, 0.0;
      return x;
    };
  } else if (name == "rot2") {
    flow.sigma = [](double t, const Point& m) { return detail::rotate_coords(m, 0.0, t); };
    flow.cocycle = [](double t, const Point&) { return detail::torus_angles(0.0, 0.0); };
    flow.field = [](const Point& m) {
      Vec x(4);
      x << 0.0, 0.0, -m[3], m[2];
      return x;
    };
  } else if (name == "sigma") {
    flow.sigma = [](double t, const Point& m) { return detail::rotate_coords(m, t, -t); };
    flow.cocycle = [](double t, const Point&) { return detail::torus_angles(0.0, t); };
    flow.field = [](const Point& m) {
      Vec x(4);
      x << -m[1], m[0], m[3], -m[2];
      return x;
    };
  } else {
    throw std::invalid_argument("bidisc_flow: unknown flow name '" + name + "'");
  }
  return flow;
}

//! The transformation-family angles (t, −t) quoted alongside the model. This
//! family does NOT satisfy the kernel invariance identity (the solved family
//! for the "sigma" flow is (0, t)); it is kept as a fixture so the discrepancy
//! can be measured and reported.
inline GroupParam bidisc_quoted_cocycle(double t) { return detail::torus_angles(t, -t); }

//! The rotation base field quoted alongside F: X = iz₁∂₁ + iz₂∂₂, i.e.
//! (−y₁, x₁, −y₂, x₂). Note this is not the tangent field of the "sigma" flow.
inline Vec bidisc_quoted_field(const Point& m) {
  Vec x(4);
  x << -m[1], m[0], -m[3], m[2];
  return x;
}

//! Constant vertical component diag(i, −i) quoted with the section-operator
//! display for this model.
inline CMat bidisc_quoted_vertical(const Point&) {
  CMat phi = CMat::Zero(2, 2);
  phi(0, 0) = Complex(0.0, 1.0);
  phi(1, 1) = Complex(0.0, -1.0);
  return phi;
}

//! The quoted (F, X) pair: closed-form F with the quoted rotation field.
inline HamiltonianPair bidisc_quoted_pair() {
  return HamiltonianPair{[](const Point& m) { return bidisc_F_hol(m); },
                         [](const Point& m) { return bidisc_quoted_field(m); }};
}

//! Frozen four-point frame used by the commutator checks.
inline std::vector<Point> bidisc_frame_points() {
  std::vector<Point> pts;
  Point p(4);
  p << 0.2, 0.1, -0.15, 0.25;
  pts.push_back(p);
  p << 0.35, -0.2, 0.1, 0.05;
  pts.push_back(p);
  p << -0.3, 0.12, 0.22, -0.18;
  pts.push_back(p);
  p << 0.05, -0.12, 0.33, -0.44;
  pts.push_back(p);
  return pts;
}

//! Seeded interior sample points, uniform per coordinate in [−half_width, half_width].
inline std::vector<Point> bidisc_sample_points(Rng& rng, int count, double half_width = 0.55) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Point p(4);
    for (int k = 0; k < 4; ++k) p[k] = rng.uniform(-half_width, half_width);
    pts.push_back(p);
  }
  return pts;
}

//! Rational section data: ψ₁(z̄₁) = Σ_k v1_k/(1 − z̄₁ w1_k) + c and
//! ψ₂(z̄₁, z̄₂) = Σ_k v2_k/(1 − z̄₂ w2_k) + c·z̄₁. Admissible data satisfy
//! c = Σ_k (v1_k + w1_k·v2_k).
struct PsiTerm {
  Complex v1{0.0, 0.0};
  Complex v2{0.0, 0.0};
  Complex w1{0.0, 0.0};
  Complex w2{0.0, 0.0};
};

struct PsiFunction {
  std::vector<PsiTerm> terms;
  Complex c{0.0, 0.0};
};

inline Complex psi_constraint_residual(const PsiFunction& psi) {
  Complex sum(0.0, 0.0);
  for (const PsiTerm& term : psi.terms) sum += term.v1 + term.w1 * term.v2;
  return psi.c - sum;
}

//! Evaluates (ψ₁, ψ₂) at the chart point m.
inline CVec psi_eval(const PsiFunction& psi, const Point& m) {
  const Complex zb1 = std::conj(coord_complex(m, 0));
  const Complex zb2 = std::conj(coord_complex(m, 1));
  Complex p1 = psi.c;
  Complex p2 = psi.c * zb1;
  for (const PsiTerm& term : psi.terms) {
    p1 += term.v1 / (1.0 - zb1 * term.w1);
    p2 += term.v2 / (1.0 - zb2 * term.w2);
  }
  CVec out(2);
  out[0] = p1;
  out[1] = p2;
  return out;
}

//! Expresses the kernel section m ↦ K(m, w)·v in the rational ψ form.
inline PsiFunction embed_section(const Point& w, const CVec& v) {
  if (v.size() != 2) throw std::invalid_argument("embed_section: fiber vector must have size 2");
  const Complex w1 = coord_complex(w, 0);
  const Complex w2 = coord_complex(w, 1);
  PsiFunction psi;
  PsiTerm main;
  main.v1 = v[0];
  main.v2 = v[1];
  main.w1 = w1;
  main.w2 = w2;
  psi.terms.push_back(main);
  PsiTerm constant;
  constant.v1 = Complex(0.0, 0.0);
  constant.v2 = v[1];
  constant.w1 = Complex(0.0, 0.0);
  constant.w2 = Complex(0.0, 0.0);
  psi.terms.push_back(constant);
  psi.c = v[0] + w1 * v[1];
  return psi;
}

//! Reference section operator for the two-disc model, evaluated with exact
//! rational derivatives:
//!   Qψ = i·( z̄₁·∂̄₁ψ₁ + ψ₁ ,  z̄₁·∂̄₁ψ₂ + z̄₂·∂̄₂ψ₂ − ψ₂ ).
//! Requires the coefficient constraint c = Σ(v1 + w1·v2) within 1e-12.
inline CVec bidisc_ks_reference(const PsiFunction& psi, const Point& m) {
  if (std::abs(psi_constraint_residual(psi)) > 1e-12) {
    throw std::invalid_argument("bidisc_ks_reference: coefficient constraint violated");
  }
  const Complex zb1 = std::conj(coord_complex(m, 0));
  const Complex zb2 = std::conj(coord_complex(m, 1));
  Complex d1_psi1(0.0, 0.0);  // ∂ψ₁/∂z̄₁
  Complex d2_psi2(0.0, 0.0);  // Σ-part of ∂ψ₂/∂z̄₂
  for (const PsiTerm& term : psi.terms) {
    const Complex den1 = 1.0 - zb1 * term.w1;
    const Complex den2 = 1.0 - zb2 * term.w2;
    d1_psi1 += term.v1 * term.w1 / (den1 * den1);
    d2_psi2 += term.v2 * term.w2 / (den2 * den2);
  }
  const Complex d1_psi2 = psi.c;  // ∂ψ₂/∂z̄₁
  const CVec value = psi_eval(psi, m);
  const Complex i_unit(0.0, 1.0);
  CVec out(2);
  out[0] = i_unit * (zb1 * d1_psi1 + value[0]);
  out[1] = i_unit * (zb1 * d1_psi2 + zb2 * d2_psi2 - value[1]);
  return out;
}

//! Concatenates ψ data; admissibility is preserved under addition.
inline PsiFunction psi_sum(const std::vector<PsiFunction>& parts) {
  PsiFunction out;
  for (const PsiFunction& part : parts) {
    out.terms.insert(out.terms.end(), part.terms.begin(), part.terms.end());
    out.c += part.c;
  }
  return out;
}

}  // namespace opk
