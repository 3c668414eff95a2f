#pragma once

#include <Eigen/Dense>
#include <complex>

namespace opk {

using Complex = std::complex<double>;
using Vec  = Eigen::VectorXd;
using Mat  = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

//! A chart point: real coordinates; complex charts store interleaved (re, im) pairs.
using Point = Vec;

//! Relative step scale for first finite-difference derivatives. The quotients
//! are Richardson-refined central differences (fourth order), so the
//! roundoff/truncation balance sits near the fifth root of machine epsilon;
//! 1e-3 keeps the roundoff floor near 1e-13 instead of the 1e-11 a smaller
//! step would leak into compressed-generator spectra.
inline constexpr double kFirstStep = 1e-3;
//! Relative step scale for nested / second finite-difference derivatives.
inline constexpr double kNestedStep = 1e-3;
//! Relative eigenvalue floor for Gram factorization and whitening truncation.
inline constexpr double kEigRelFloor = 1e-12;
//! Relative refusal threshold for near-degenerate fiber metrics K(m,m).
inline constexpr double kFiberMetricRelFloor = 1e-10;
//! Default relative tolerance on the most-negative admissible Gram eigenvalue.
inline constexpr double kGramEigTol = 1e-9;

//! Complex value of coordinate pair i of a chart point (coords 2i, 2i+1).
inline Complex coord_complex(const Point& m, int i) {
  return Complex(m[2 * i], m[2 * i + 1]);
}

//! Chart point from complex coordinates (interleaved storage).
inline Point point_from_complex(std::initializer_list<Complex> zs) {
  Point m(2 * static_cast<int>(zs.size()));
  int i = 0;
  for (const Complex& z : zs) {
    m[2 * i] = z.real();
    m[2 * i + 1] = z.imag();
    ++i;
  }
  return m;
}

}  // namespace opk
