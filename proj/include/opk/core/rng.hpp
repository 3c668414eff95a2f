#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "opk/core/types.hpp"

namespace opk {

//! Deterministic random source. Values are derived from the raw mt19937_64 bit
//! stream with fixed arithmetic (standard-library distributions are
//! implementation-defined, which would break byte-identical reports).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  //! Uniform double in [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  //! Uniform double in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  //! Standard normal via Box–Muller on the fixed uniform stream.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    while (u <= 0.0) u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * M_PI * v;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

  Vec uniform_vec(int n, double a, double b) {
    Vec out(n);
    for (int i = 0; i < n; ++i) out[i] = uniform(a, b);
    return out;
  }

  CVec normal_cvec(int n) {
    CVec out(n);
    for (int i = 0; i < n; ++i) out[i] = Complex(normal(), normal());
    return out;
  }

  //! Haar-like random unitary: polar factor of a complex Gaussian matrix.
  CMat random_unitary(int n) {
    CMat g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = Complex(normal(), normal());
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ() * CMat::Identity(n, n);
    // Fix the phase ambiguity so the result is a deterministic function of the stream.
    CMat r = q.adjoint() * g;
    for (int i = 0; i < n; ++i) {
      const Complex d = r(i, i);
      const double mag = std::abs(d);
      if (mag > 0.0) q.col(i) *= d / mag;
    }
    return q;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace opk
