#pragma once

// Reference computations local to the test suite. These are written
// independently of the library's own evaluation routes so that agreement is
// meaningful: quadrature comes from diagonalizing the Jacobi matrix
// (Golub-Welsch) and polynomial values come from the three-term recurrence,
// while the library builds its basis by Cholesky factorization of the moment
// matrix and evaluates transforms in closed form.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace testsupport {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

//! Quadrature against the standard normal density: nodes are the eigenvalues
//! of the symmetric Jacobi matrix with off-diagonal entries sqrt(k), weights
//! are the squared first components of the normalized eigenvectors (so the
//! weights sum to the total mass, one).
inline QuadratureRule normal_quadrature(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = b;
    jacobi(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double first = es.eigenvectors()(0, i);
    rule.weights[i] = first * first;
  }
  return rule;
}

//! Shared 48-node rule: exact for polynomial integrands up to degree 95 and
//! accurate to machine precision for entire integrands of moderate growth.
inline const QuadratureRule& normal_rule_48() {
  static const QuadratureRule rule = normal_quadrature(48);
  return rule;
}

//! Orthonormal polynomial of the standard normal, by the recurrence
//! P_{k+1}(x) = (x P_k(x) - sqrt(k) P_{k-1}(x)) / sqrt(k+1), P_0 = 1, P_1 = x.
inline std::complex<double> normal_poly(int k, std::complex<double> x) {
  std::complex<double> prev(1.0, 0.0);
  if (k == 0) return prev;
  std::complex<double> cur = x;
  for (int j = 1; j < k; ++j) {
    const std::complex<double> next =
        (x * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(static_cast<double>(j + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

//! Quadrature value of the n-th transform coefficient of the standard normal:
//! integral of e^{-i z w} P_n(w) against the normal density.
inline std::complex<double> normal_transform_quadrature(int n, std::complex<double> z) {
  const QuadratureRule& rule = normal_rule_48();
  const std::complex<double> minus_i(0.0, -1.0);
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * std::exp(minus_i * z * rule.nodes[i]) *
           normal_poly(n, std::complex<double>(rule.nodes[i], 0.0));
  }
  return acc;
}

//! Quadrature value of the n-th raw moment of the standard normal.
inline double normal_moment_quadrature(int n) {
  const QuadratureRule& rule = normal_rule_48();
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * std::pow(rule.nodes[i], n);
  }
  return acc;
}

}  // namespace testsupport
