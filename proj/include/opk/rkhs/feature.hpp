#pragma once

#include <stdexcept>

#include "opk/core/linalg.hpp"
#include "opk/rkhs/gram.hpp"

namespace opk {

//! Finite feature factorization of a Gram matrix: columns (i,a) hold the
//! coordinates of the coherent vectors in an orthonormal basis of their span,
//! so that columns* · columns reproduces the Gram matrix.
struct FeatureMap {
  int rank = 0;
  CMat columns;  // rank × (J·N)
};

//! Factorizes a certified Gram matrix by Hermitian eigendecomposition with the
//! relative eigenvalue floor kEigRelFloor (rank-revealing truncation).
inline FeatureMap factorize(const GramSystem& g) {
  const PositivityCertificate cert = certify_positivity(g);
  if (!cert.pass) {
    throw std::domain_error("factorize: Gram positivity certification failed");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(g.gram));
  const Vec ev = es.eigenvalues();
  const double floor = kEigRelFloor * cert.norm;
  const int n = static_cast<int>(ev.size());
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    if (ev[i] > floor) ++rank;
  }
  FeatureMap f;
  f.rank = rank;
  f.columns = CMat(rank, n);
  int row = 0;
  for (int i = 0; i < n; ++i) {
    if (ev[i] <= floor) continue;
    f.columns.row(row) = std::sqrt(ev[i]) * es.eigenvectors().col(i).adjoint();
    ++row;
  }
  return f;
}

//! Gram matrix reproduced by a feature map.
inline CMat feature_gram(const FeatureMap& f) { return f.columns.adjoint() * f.columns; }

//! Unitary intertwiner between two factorizations of the same Gram matrix:
//! returns U with U·F1 ≈ F2 (least-squares unitary fit on the common span).
//! Refuses factorizations whose Grams differ beyond gram_tol (relative).
inline CMat factorization_equivalence(const FeatureMap& f1, const FeatureMap& f2,
                                      double gram_tol = 1e-8) {
  const CMat g1 = feature_gram(f1);
  const CMat g2 = feature_gram(f2);
  const double scale = std::max(max_abs(g1), max_abs(g2));
  if (max_abs(CMat(g1 - g2)) > gram_tol * (1.0 + scale)) {
    throw std::invalid_argument("factorization_equivalence: feature maps factorize different Grams");
  }
  if (f1.rank != f2.rank) {
    throw std::invalid_argument("factorization_equivalence: ranks differ on the common span");
  }
  return polar_unitary(f2.columns * f1.columns.adjoint());
}

}  // namespace opk
