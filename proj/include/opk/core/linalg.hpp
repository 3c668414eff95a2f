#pragma once

#include <cmath>
#include <stdexcept>

#include "opk/core/types.hpp"

namespace opk {

//! Hermitian symmetrization (A + A*)/2.
inline CMat herm_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

//! Largest absolute entry; the elementwise residual norm used throughout.
inline double max_abs(const CMat& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline double max_abs(const CVec& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

//! Operator 2-norm of a Hermitian matrix (largest |eigenvalue|).
inline double herm_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

//! Solve H x = b for Hermitian positive definite H, refusing near-degenerate input
//! (relative eigenvalue below floor_rel).
inline CMat herm_solve(const CMat& h, const CMat& b, double floor_rel = kFiberMetricRelFloor) {
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(h));
  const Vec ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  if (scale <= 0.0 || ev.minCoeff() < floor_rel * scale) {
    throw std::domain_error("herm_solve: operator is degenerate at this point");
  }
  const CMat& v = es.eigenvectors();
  return v * ev.cwiseInverse().asDiagonal() * v.adjoint() * b;
}

//! Square root and inverse square root of a Hermitian positive definite matrix.
struct HermSqrt {
  CMat sqrt;
  CMat inv_sqrt;
};

inline HermSqrt herm_sqrt(const CMat& a, double floor_rel = kFiberMetricRelFloor) {
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(a));
  const Vec ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  if (scale <= 0.0 || ev.minCoeff() < floor_rel * scale) {
    throw std::domain_error("herm_sqrt: matrix is degenerate (eigenvalue below refusal floor)");
  }
  const CMat& v = es.eigenvectors();
  HermSqrt out;
  out.sqrt = v * ev.cwiseSqrt().asDiagonal() * v.adjoint();
  out.inv_sqrt = v * ev.cwiseSqrt().cwiseInverse().asDiagonal() * v.adjoint();
  return out;
}

//! Truncated inverse square root of a Hermitian PSD matrix: eigenvalues below
//! floor_rel·‖·‖₂ are dropped. w is the whitener, w_pinv its pseudo-inverse (= G^{1/2}
//! on the retained span); condition reports max/min retained eigenvalue ratio.
struct Whitener {
  CMat w;
  CMat w_pinv;
  Vec eigenvalues;
  int rank = 0;
  double condition = 1.0;
};

inline Whitener whiten(const CMat& g, double floor_rel = kEigRelFloor) {
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(g));
  const Vec ev = es.eigenvalues();
  const CMat& v = es.eigenvectors();
  const double scale = ev.cwiseAbs().maxCoeff();
  const double floor = floor_rel * scale;
  const int n = static_cast<int>(ev.size());
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    if (ev[i] > floor) ++rank;
  }
  if (rank == 0) throw std::domain_error("whiten: matrix has no eigenvalue above the floor");
  Whitener out;
  out.eigenvalues = ev;
  out.rank = rank;
  out.w = CMat(n, rank);
  out.w_pinv = CMat(rank, n);
  double lo = 0.0, hi = 0.0;
  int col = 0;
  for (int i = 0; i < n; ++i) {
    if (ev[i] <= floor) continue;
    const double root = std::sqrt(ev[i]);
    out.w.col(col) = v.col(i) / root;
    out.w_pinv.row(col) = root * v.col(i).adjoint();
    if (col == 0) lo = ev[i];
    hi = ev[i];
    ++col;
  }
  out.condition = hi / lo;
  return out;
}

//! Unitary polar factor maximizing overlap with m (least-squares unitary fit).
inline CMat polar_unitary(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace opk
