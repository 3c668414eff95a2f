#pragma once

#include <stdexcept>
#include <vector>

#include "opk/core/kernel.hpp"
#include "opk/core/linalg.hpp"
#include "opk/core/types.hpp"

namespace opk {

//! Finite sample realization of a kernel: points p_1..p_J and the JN×JN block
//! Gram matrix with block (i,j) = K(p_i, p_j).
struct GramSystem {
  ChartKernel kernel;
  std::vector<Point> points;
  CMat gram;
  double eig_floor = kGramEigTol;  // relative tolerance on the most-negative eigenvalue

  int fiber_dim() const { return kernel.fiber_dim; }
  int dim() const { return static_cast<int>(gram.rows()); }
  //! Flat index of fiber basis label a at sample point i.
  int index(int i, int a) const { return i * kernel.fiber_dim + a; }
};

//! Assembles the block Gram matrix of a kernel over sample points.
inline GramSystem assemble_gram(const ChartKernel& k, const std::vector<Point>& pts) {
  if (pts.empty()) throw std::invalid_argument("assemble_gram: need at least one point");
  const int n = k.fiber_dim;
  const int j = static_cast<int>(pts.size());
  GramSystem g;
  g.kernel = k;
  g.points = pts;
  g.gram = CMat(j * n, j * n);
  for (int r = 0; r < j; ++r) {
    for (int c = 0; c < j; ++c) {
      g.gram.block(r * n, c * n, n, n) = eval_kernel(k, pts[r], pts[c]);
    }
  }
  return g;
}

//! Positivity certificate: min eigenvalue of the (Hermitian) Gram matrix and the
//! pass verdict min_eig ≥ −eig_floor·‖G‖₂. Rejects non-Hermitian input.
struct PositivityCertificate {
  double min_eig = 0.0;
  double norm = 0.0;
  bool pass = false;
};

inline PositivityCertificate certify_positivity(const GramSystem& g) {
  const double scale = max_abs(g.gram);
  if (max_abs(CMat(g.gram - g.gram.adjoint())) > 1e-10 * (1.0 + scale)) {
    throw std::invalid_argument("certify_positivity: Gram matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(g.gram), Eigen::EigenvaluesOnly);
  PositivityCertificate cert;
  cert.min_eig = es.eigenvalues().minCoeff();
  cert.norm = es.eigenvalues().cwiseAbs().maxCoeff();
  cert.pass = cert.min_eig >= -g.eig_floor * cert.norm;
  return cert;
}

}  // namespace opk
