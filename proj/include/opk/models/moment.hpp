#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "opk/core/kernel.hpp"
#include "opk/geometry/curvature.hpp"
#include "opk/geometry/flow.hpp"

namespace opk {

//! A probability measure on the real line described through its moments:
//! either the standard gaussian or a finite discrete measure with positive
//! normalized weights. These are the measures for which the induced
//! difference kernel χ(v − z̄) is entire in both slots.
struct MomentMeasure {
  enum class Kind { Gaussian, Discrete };

  Kind kind = Kind::Gaussian;
  Vec atoms;    //!< discrete support points (empty for gaussian)
  Vec weights;  //!< positive, summing to one (empty for gaussian)

  //! n-th moment μ_n = ∫ ω^n dσ(ω).
  double moment(int n) const {
    if (n < 0) throw std::invalid_argument("MomentMeasure::moment: negative order");
    if (kind == Kind::Gaussian) {
      if (n % 2 == 1) return 0.0;
      double acc = 1.0;
      for (int k = n - 1; k >= 2; k -= 2) acc *= static_cast<double>(k);
      return acc;  // (n-1)!! for even n, 1 for n = 0
    }
    double acc = 0.0;
    for (int i = 0; i < atoms.size(); ++i) acc += weights[i] * std::pow(atoms[i], n);
    return acc;
  }

  //! n-th absolute moment ∫ |ω|^n dσ(ω).
  double abs_moment(int n) const {
    if (n < 0) throw std::invalid_argument("MomentMeasure::abs_moment: negative order");
    if (kind == Kind::Gaussian) {
      // E|ω|^n = 2^{n/2} Γ((n+1)/2) / √π
      return std::exp(0.5 * n * std::log(2.0) + std::lgamma(0.5 * (n + 1))) / std::sqrt(M_PI);
    }
    double acc = 0.0;
    for (int i = 0; i < atoms.size(); ++i) acc += weights[i] * std::pow(std::abs(atoms[i]), n);
    return acc;
  }

  //! χ(s) = ∫ e^{−isω} dσ(ω), evaluated for complex s (entire).
  Complex chi(Complex s) const {
    if (kind == Kind::Gaussian) return std::exp(-0.5 * s * s);
    const Complex minus_i(0.0, -1.0);
    Complex acc(0.0, 0.0);
    for (int i = 0; i < atoms.size(); ++i) acc += weights[i] * std::exp(minus_i * s * atoms[i]);
    return acc;
  }

  //! (log χ)'(s). Throws when χ(s) is numerically zero.
  Complex dlogchi(Complex s) const {
    if (kind == Kind::Gaussian) return -s;
    const Complex chi_val = chi(s);
    if (std::abs(chi_val) <= 1e-10) {
      throw std::domain_error("MomentMeasure::dlogchi: chi vanishes at this argument");
    }
    const Complex minus_i(0.0, -1.0);
    Complex d1(0.0, 0.0);
    for (int i = 0; i < atoms.size(); ++i) {
      d1 += weights[i] * (minus_i * atoms[i]) * std::exp(minus_i * s * atoms[i]);
    }
    return d1 / chi_val;
  }

  //! (log χ)''(s). Throws when χ(s) is numerically zero.
  Complex d2logchi(Complex s) const {
    if (kind == Kind::Gaussian) return Complex(-1.0, 0.0);
    const Complex chi_val = chi(s);
    if (std::abs(chi_val) <= 1e-10) {
      throw std::domain_error("MomentMeasure::d2logchi: chi vanishes at this argument");
    }
    const Complex minus_i(0.0, -1.0);
    Complex d1(0.0, 0.0);
    Complex d2(0.0, 0.0);
    for (int i = 0; i < atoms.size(); ++i) {
      const Complex phase = std::exp(minus_i * s * atoms[i]);
      d1 += weights[i] * (minus_i * atoms[i]) * phase;
      d2 += weights[i] * (minus_i * atoms[i]) * (minus_i * atoms[i]) * phase;
    }
    const Complex ratio = d1 / chi_val;
    return d2 / chi_val - ratio * ratio;
  }
};

inline MomentMeasure gaussian_measure() { return MomentMeasure{}; }

inline MomentMeasure discrete_measure(const Vec& atoms, const Vec& weights) {
  if (atoms.size() == 0 || atoms.size() != weights.size()) {
    throw std::invalid_argument("discrete_measure: atoms and weights must match and be nonempty");
  }
  if (atoms.size() > 64) throw std::invalid_argument("discrete_measure: at most 64 atoms");
  double total = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) throw std::invalid_argument("discrete_measure: weights must be positive");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("discrete_measure: weights must sum to one");
  }
  MomentMeasure m;
  m.kind = MomentMeasure::Kind::Discrete;
  m.atoms = atoms;
  m.weights = weights;
  return m;
}

//! Symmetric two-atom measure at ±1 with equal weights.
inline MomentMeasure two_atom_measure() {
  Vec atoms(2), weights(2);
  atoms << 1.0, -1.0;
  weights << 0.5, 0.5;
  return discrete_measure(atoms, weights);
}

//! Orthonormal polynomials P_0 … P_{n−1} for a moment measure, stored by
//! monomial coefficients: P_k(ω) = Σ_j coeff(j, k)·ω^j (column k is upper
//! triangular, positive leading coefficient).
struct OrthoPolyBasis {
  Mat coeff;

  int size() const { return static_cast<int>(coeff.cols()); }

  Complex eval(int k, Complex w) const {
    if (k < 0 || k >= size()) throw std::invalid_argument("OrthoPolyBasis::eval: index out of range");
    Complex acc(0.0, 0.0);
    Complex power(1.0, 0.0);
    for (int j = 0; j < coeff.rows(); ++j) {
      acc += coeff(j, k) * power;
      power *= w;
    }
    return acc;
  }

  double eval_real(int k, double w) const { return eval(k, Complex(w, 0.0)).real(); }
};

//! Builds the orthonormal basis by Cholesky factorization of the Hankel moment
//! matrix H_{jk} = μ_{j+k}: with H = L·Lᵀ, the columns of L^{−T} give the
//! coefficients. Throws when the Hankel matrix is not positive definite (for a
//! discrete measure this happens as soon as n exceeds the number of atoms).
inline OrthoPolyBasis ortho_polys(const MomentMeasure& measure, int n) {
  if (n <= 0) throw std::invalid_argument("ortho_polys: order must be positive");
  if (measure.kind == MomentMeasure::Kind::Discrete && n > measure.atoms.size()) {
    throw std::domain_error("ortho_polys: order exceeds the measure's support size");
  }
  Mat hankel(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) hankel(j, k) = measure.moment(j + k);
  }
  Eigen::LLT<Mat> llt(hankel);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("ortho_polys: Hankel moment matrix is not positive definite");
  }
  const Mat upper = llt.matrixU();
  OrthoPolyBasis basis;
  basis.coeff = upper.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
  return basis;
}

//! χ_n(z) = ∫ e^{−izω} P_n(ω) dσ(ω): closed form for the gaussian measure
//! ((−iz)^n/√(n!) · e^{−z²/2}) and an exact finite sum for discrete measures.
inline Complex chi_n(const MomentMeasure& measure, const OrthoPolyBasis& basis, int n, Complex z) {
  if (n < 0) throw std::invalid_argument("chi_n: negative order");
  if (measure.kind == MomentMeasure::Kind::Gaussian) {
    const Complex minus_iz(z.imag(), -z.real());
    Complex acc = std::exp(-0.5 * z * z);
    for (int k = 1; k <= n; ++k) acc *= minus_iz / std::sqrt(static_cast<double>(k));
    return acc;
  }
  if (n >= basis.size()) throw std::invalid_argument("chi_n: basis too small for requested order");
  const Complex minus_i(0.0, -1.0);
  Complex acc(0.0, 0.0);
  for (int i = 0; i < measure.atoms.size(); ++i) {
    acc += measure.weights[i] * std::exp(minus_i * z * measure.atoms[i]) *
           basis.eval(n, Complex(measure.atoms[i], 0.0));
  }
  return acc;
}

inline Complex chi_n(const MomentMeasure& measure, int n, Complex z) {
  if (measure.kind == MomentMeasure::Kind::Gaussian) {
    static const OrthoPolyBasis kEmpty{};
    return chi_n(measure, kEmpty, n, z);
  }
  return chi_n(measure, ortho_polys(measure, n + 1), n, z);
}

//! Difference kernel value: the first argument enters through its conjugate,
//! K(z, v) = χ(v − z̄). For the even measures provided here this coincides
//! with χ(z̄ − v).
inline Complex sigma_kernel(const MomentMeasure& measure, Complex z, Complex v) {
  return measure.chi(v - std::conj(z));
}

//! Truncated factorization Σ_{n<terms} conj(χ_n(z))·χ_n(v). For a discrete
//! measure with `terms` equal to the atom count this reproduces the kernel
//! exactly; for the gaussian the tail decays factorially.
inline Complex sigma_kernel_series(const MomentMeasure& measure, int terms, Complex z, Complex v) {
  OrthoPolyBasis basis;
  if (measure.kind == MomentMeasure::Kind::Discrete) basis = ortho_polys(measure, terms);
  Complex acc(0.0, 0.0);
  for (int n = 0; n < terms; ++n) {
    acc += std::conj(chi_n(measure, basis, n, z)) * chi_n(measure, basis, n, v);
  }
  return acc;
}

//! Rank-1 chart kernel on the plane (m = (x, y) for z = x + iy) induced by a
//! moment measure.
inline ChartKernel sigma_kernel_chart(const MomentMeasure& measure) {
  ChartKernel k;
  k.fiber_dim = 1;
  k.chart_dim = 2;
  k.holomorphic = true;
  k.domain = DomainBox::cube(2, 4.0);
  k.eval = [measure](const Point& m, const Point& n) -> CMat {
    CMat out(1, 1);
    out(0, 0) = sigma_kernel(measure, coord_complex(m, 0), coord_complex(n, 0));
    return out;
  };
  return k;
}

//! Translation model for a moment measure: the flow z ↦ z + t preserves the
//! difference kernel with a trivial circle cocycle, and the matching pair is
//! F(m) = (log χ)'(z̄ − z), X = ∂_x.
struct TranslationModel {
  ChartKernel kernel;
  HamiltonianPair pair;
  FlowSpec flow;
  Representation rep;
  MomentMeasure measure;
};

inline TranslationModel translation_model(const MomentMeasure& measure) {
  TranslationModel model;
  model.measure = measure;
  model.kernel = sigma_kernel_chart(measure);
  model.rep.kind = GroupKind::U1;
  model.rep.fiber_dim = 1;
  model.pair.F = [measure](const Point& m) -> CMat {
    const Complex z = coord_complex(m, 0);
    CMat f(1, 1);
    f(0, 0) = measure.dlogchi(std::conj(z) - z);
    return f;
  };
  model.pair.X = [](const Point&) {
    Vec x(2);
    x << 1.0, 0.0;
    return x;
  };
  model.flow.sigma = [](double t, const Point& m) {
    Point out = m;
    out[0] += t;
    return out;
  };
  model.flow.cocycle = [](double, const Point&) {
    GroupParam g;
    g.angles = Vec::Zero(1);
    return g;
  };
  model.flow.field = model.pair.X;
  return model;
}

//! Exact finite-rank model for a discrete measure: feature vectors
//! 𝔎(z) = (√w_i · e^{−izω_i})_i, the diagonal position operator diag(ω_i), and
//! the exact propagator action 𝔎(z) ↦ 𝔎(z + t). Everything here is closed
//! form, independent of differentiation and frame compression, which makes it
//! the reference the compressed pipeline is tested against.
struct DiscreteOracle {
  Vec atoms;
  Vec weights;

  CVec feature(Complex z) const {
    const Complex minus_i(0.0, -1.0);
    CVec out(atoms.size());
    for (int i = 0; i < atoms.size(); ++i) {
      out[i] = std::sqrt(weights[i]) * std::exp(minus_i * z * atoms[i]);
    }
    return out;
  }

  CMat f_hat() const {
    CMat out = CMat::Zero(atoms.size(), atoms.size());
    for (int i = 0; i < atoms.size(); ++i) out(i, i) = atoms[i];
    return out;
  }

  //! Exact Gram matrix of features at the given complex points.
  CMat gram(const std::vector<Complex>& zs) const {
    const int j = static_cast<int>(zs.size());
    CMat g(j, j);
    for (int a = 0; a < j; ++a) {
      for (int b = 0; b < j; ++b) g(a, b) = feature(zs[a]).dot(feature(zs[b]));
    }
    return g;
  }

  //! e^{−it·diag(ω)}·𝔎(z), which equals 𝔎(z + t) exactly.
  CVec evolve(double t, Complex z) const {
    const Complex minus_i(0.0, -1.0);
    CVec out = feature(z);
    for (int i = 0; i < atoms.size(); ++i) out[i] *= std::exp(minus_i * t * atoms[i]);
    return out;
  }
};

inline DiscreteOracle discrete_oracle(const MomentMeasure& measure) {
  if (measure.kind != MomentMeasure::Kind::Discrete) {
    throw std::invalid_argument("discrete_oracle: requires a discrete measure");
  }
  return DiscreteOracle{measure.atoms, measure.weights};
}

//! Growth ratio (|μ|_n / n!)^{1/n} of the absolute moments; bounded ratios are
//! the heuristic admissibility condition checked before trusting an arbitrary
//! measure in the difference-kernel construction.
inline double moment_growth_ratio(const MomentMeasure& measure, int n) {
  return std::exp((std::log(measure.abs_moment(n)) - std::lgamma(n + 1.0)) / n);
}

struct MomentGrowthCheck {
  double max_ratio = 0.0;
  bool bounded = false;
};

//! Heuristic check that (|μ|_n/n!)^{1/n} stays below a fixed bound up to
//! n_max. For the gaussian and for finite discrete measures the condition
//! holds provably; for other inputs a failure means the difference kernel's
//! convergence is not established.
inline MomentGrowthCheck moment_growth_check(const MomentMeasure& measure, int n_max = 20,
                                             double bound = 10.0) {
  MomentGrowthCheck out;
  for (int n = 2; n <= n_max; ++n) {
    out.max_ratio = std::max(out.max_ratio, moment_growth_ratio(measure, n));
  }
  out.bounded = out.max_ratio <= bound;
  return out;
}

}  // namespace opk
