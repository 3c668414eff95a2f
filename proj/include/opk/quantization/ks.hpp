#pragma once

#include <functional>
#include <stdexcept>

#include "opk/geometry/bracket.hpp"
#include "opk/quantization/generator.hpp"

namespace opk {

//! A kernel section K(·, source)·v — the fiber-valued function m ↦ K(m, source)v.
struct KernelSection {
  Point source;
  CVec v;
};

//! Applies the section operator of a pair to an arbitrary fiber-valued function:
//! (Q f)(m) = −(d_{X(m)} f)(m) − φ(m)* f(m).
//! The derivative is the plain directional one; on a holomorphic chart the
//! sections of interest depend anti-holomorphically on m, so this coincides
//! with the (0,1) part of the differential without a separate projection.
inline CVec ks_apply_to(const std::function<CVec(const Point&)>& f,
                        const std::function<Vec(const Point&)>& field,
                        const std::function<CMat(const Point&)>& phi, const Point& m,
                        double scale = kNestedStep) {
  const CVec d = deriv_dir(f, m, field(m), scale);
  return -d - phi(m).adjoint() * f(m);
}

//! Section operator applied to a kernel section at m.
inline CVec ks_apply(const ChartKernel& k, const KernelSection& section,
                     const std::function<Vec(const Point&)>& field,
                     const std::function<CMat(const Point&)>& phi, const Point& m,
                     double scale = kNestedStep) {
  auto f = [&](const Point& p) -> CVec { return eval_kernel(k, p, section.source) * section.v; };
  return ks_apply_to(f, field, phi, m, scale);
}

//! Section operator of a Hamiltonian pair (vertical component derived from the
//! pair) applied to a kernel section.
inline CVec ks_apply(const ChartKernel& k, const KernelSection& section,
                     const HamiltonianPair& pair, const Point& m, double scale = kNestedStep) {
  auto phi = [&](const Point& p) -> CMat { return phi_from_pair(k, pair, p); };
  return ks_apply(k, section, pair.X, phi, m, scale);
}

//! Frame matrix of a section operator: entry ((i,a),(j,b)) is fiber component a
//! of the operator applied to the (j,b) frame section, evaluated at p_i.
inline CMat ks_matrix(const CoherentFrame& frame, const std::function<Vec(const Point&)>& field,
                      const std::function<CMat(const Point&)>& phi) {
  const ChartKernel& k = frame.kernel();
  const int n = frame.fiber_dim();
  const auto& pts = frame.points();
  const int j = static_cast<int>(pts.size());
  CMat m(j * n, j * n);
  for (int col = 0; col < j; ++col) {
    for (int b = 0; b < n; ++b) {
      KernelSection section{pts[col], CVec::Unit(n, b)};
      for (int row = 0; row < j; ++row) {
        m.block(row * n, frame.system.index(col, b), n, 1) =
            ks_apply(k, section, field, phi, pts[row]);
      }
    }
  }
  return m;
}

//! Frame matrix of the composition Q₁∘Q₂ of two section operators, evaluated by
//! nesting the finite-difference application (the outer derivative acts on the
//! inner operator's output as a function of the base point).
inline CMat ks_compose_matrix(const CoherentFrame& frame,
                              const std::function<Vec(const Point&)>& field1,
                              const std::function<CMat(const Point&)>& phi1,
                              const std::function<Vec(const Point&)>& field2,
                              const std::function<CMat(const Point&)>& phi2) {
  const ChartKernel& k = frame.kernel();
  const int n = frame.fiber_dim();
  const auto& pts = frame.points();
  const int j = static_cast<int>(pts.size());
  CMat m(j * n, j * n);
  for (int col = 0; col < j; ++col) {
    for (int b = 0; b < n; ++b) {
      KernelSection section{pts[col], CVec::Unit(n, b)};
      auto inner = [&](const Point& p) -> CVec { return ks_apply(k, section, field2, phi2, p); };
      for (int row = 0; row < j; ++row) {
        m.block(row * n, frame.system.index(col, b), n, 1) =
            ks_apply_to(inner, field1, phi1, pts[row]);
      }
    }
  }
  return m;
}

//! Consistency of the two assembly routes for the same operator:
//! ‖(−i)·(section-operator frame matrix) − (generator form matrix)‖.
inline double generator_vs_ks_residual(const CoherentFrame& frame,
                                       const std::function<Vec(const Point&)>& field,
                                       const std::function<CMat(const Point&)>& phi) {
  const CMat mk = ks_matrix(frame, field, phi);
  const CMat a = generator_matrix(frame, field, phi);
  return max_abs(CMat(Complex(0.0, -1.0) * mk - a));
}

//! Commutator test data: the defect against the bracket pair's generator and
//! the raw commutator magnitude.
struct CommutatorCheck {
  double residual = 0.0;
  double commutator_norm = 0.0;
};

//! Checks that quantization sends the pair bracket to the operator commutator:
//! with A = −i·M(Q₁), B = −i·M(Q₂) assembled through genuine operator
//! compositions, returns ‖AB − BA − (−i)·C‖ where C is the generator of the
//! bracket pair. All three input pairs must satisfy the Hamiltonian equation
//! (finite-difference gate at the first frame point).
inline CommutatorCheck prequantization_commutator_check(const CoherentFrame& frame,
                                                        const HamiltonianPair& p1,
                                                        const HamiltonianPair& p2) {
  const ChartKernel& k = frame.kernel();
  const Point& gate_point = frame.points().front();
  const HamiltonianPair b = bracket_pair(k, p1, p2);
  if (hamiltonian_residual(k, p1, gate_point) > 1e-3 ||
      hamiltonian_residual(k, p2, gate_point) > 1e-3) {
    throw std::domain_error("prequantization_commutator_check: input pair fails the Hamiltonian equation");
  }
  if (hamiltonian_residual(k, b, gate_point) > 1e-3) {
    throw std::domain_error("prequantization_commutator_check: bracket pair fails the Hamiltonian equation");
  }
  auto phi1 = [&](const Point& m) -> CMat { return phi_from_pair(k, p1, m); };
  auto phi2 = [&](const Point& m) -> CMat { return phi_from_pair(k, p2, m); };
  const CMat ab = -ks_compose_matrix(frame, p1.X, phi1, p2.X, phi2);
  const CMat ba = -ks_compose_matrix(frame, p2.X, phi2, p1.X, phi1);
  const CMat c = generator_matrix(frame, b);
  CommutatorCheck out;
  out.commutator_norm = max_abs(CMat(ab - ba));
  out.residual = max_abs(CMat(ab - ba - Complex(0.0, -1.0) * c));
  return out;
}

inline double prequantization_commutator_residual(const CoherentFrame& frame,
                                                  const HamiltonianPair& p1,
                                                  const HamiltonianPair& p2) {
  return prequantization_commutator_check(frame, p1, p2).residual;
}

}  // namespace opk
