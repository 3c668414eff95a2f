#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "opk/opk.hpp"
#include "support/oracles.hpp"

using namespace opk;

namespace {

Point plane_point(double x, double y) {
  Point m(2);
  m << x, y;
  return m;
}

}  // namespace

TEST_CASE("moments match quadrature and closed forms", "[models][measure]") {
  const MomentMeasure g = gaussian_measure();
  const testsupport::QuadratureRule& rule = testsupport::normal_rule_48();
  for (int n = 0; n <= 16; ++n) {
    // The quadrature's roundoff scales with the summed term magnitudes
    // (~2e6 by order sixteen, and odd orders cancel large terms to zero), so
    // the comparison is scaled by the quadrature's own absolute-moment size.
    double scale = 0.0;
    for (int i = 0; i < static_cast<int>(rule.nodes.size()); ++i) {
      scale += rule.weights[i] * std::pow(std::abs(rule.nodes[i]), n);
    }
    const double expected = testsupport::normal_moment_quadrature(n);
    CHECK(std::abs(g.moment(n) - expected) < 1e-12 * (1.0 + scale));
  }
  CHECK(g.moment(4) == 3.0);
  CHECK(g.moment(5) == 0.0);
  CHECK(std::abs(g.abs_moment(3) - 2.0 * std::sqrt(2.0 / M_PI)) < 1e-14);
  CHECK(std::abs(g.abs_moment(4) - 3.0) < 1e-13);

  const MomentMeasure m2 = two_atom_measure();
  for (int n = 0; n <= 9; ++n) {
    CHECK(m2.moment(n) == ((n % 2 == 0) ? 1.0 : 0.0));
    CHECK(m2.abs_moment(n) == 1.0);
  }
}

TEST_CASE("transform derivatives have closed forms", "[models][measure]") {
  const MomentMeasure g = gaussian_measure();
  CHECK(std::abs(g.chi(Complex(0.7, -0.3)) -
                 std::exp(-0.5 * Complex(0.7, -0.3) * Complex(0.7, -0.3))) < 1e-15);
  CHECK(std::abs(g.dlogchi(Complex(0.2, 0.4)) + Complex(0.2, 0.4)) < 1e-15);
  CHECK(std::abs(g.d2logchi(Complex(0.2, 0.4)) + 1.0) < 1e-15);

  const MomentMeasure m2 = two_atom_measure();
  CHECK(std::abs(m2.chi(Complex(0.6, 0.0)) - std::cos(0.6)) < 1e-15);
  CHECK(std::abs(m2.dlogchi(Complex(0.6, 0.0)) + std::tan(0.6)) < 1e-14);
  const double sec = 1.0 / std::cos(0.6);
  CHECK(std::abs(m2.d2logchi(Complex(0.6, 0.0)) + sec * sec) < 1e-13);
  CHECK_THROWS_AS(m2.dlogchi(Complex(M_PI / 2.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(m2.d2logchi(Complex(M_PI / 2.0, 0.0)), std::domain_error);
}

TEST_CASE("measure constructors validate their inputs", "[models][measure]") {
  Vec atoms(2), weights(2);
  atoms << 1.0, -1.0;
  weights << 0.5, 0.5;
  CHECK_NOTHROW(discrete_measure(atoms, weights));

  CHECK_THROWS_AS(discrete_measure(Vec(), Vec()), std::invalid_argument);
  CHECK_THROWS_AS(discrete_measure(atoms, Vec::Constant(3, 0.2)), std::invalid_argument);

  Vec bad_weights(2);
  bad_weights << 1.5, -0.5;
  CHECK_THROWS_AS(discrete_measure(atoms, bad_weights), std::invalid_argument);

  Vec off_sum(2);
  off_sum << 0.5, 0.6;
  CHECK_THROWS_AS(discrete_measure(atoms, off_sum), std::invalid_argument);

  const Vec many_atoms = Vec::LinSpaced(65, -1.0, 1.0);
  CHECK_THROWS_AS(discrete_measure(many_atoms, Vec::Constant(65, 1.0 / 65.0)),
                  std::invalid_argument);
}

TEST_CASE("orthonormal basis matches the recurrence route", "[models][basis]") {
  const MomentMeasure g = gaussian_measure();
  const OrthoPolyBasis basis = ortho_polys(g, 7);

  // Frozen low orders: P_2 = (w^2 - 1)/sqrt(2).
  CHECK(std::abs(basis.coeff(0, 2) + 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(basis.coeff(1, 2)) < 1e-12);
  CHECK(std::abs(basis.coeff(2, 2) - 1.0 / std::sqrt(2.0)) < 1e-12);

  // Full values against the independent three-term recurrence.
  for (int k = 0; k < 7; ++k) {
    for (double x : {-1.8, -0.6, 0.0, 0.9, 2.1}) {
      CHECK(std::abs(basis.eval(k, Complex(x, 0.0)) - testsupport::normal_poly(k, Complex(x, 0.0)))
            < 1e-10);
    }
  }

  // Orthonormality through exact moment sums.
  for (int j = 0; j < 7; ++j) {
    for (int k = 0; k < 7; ++k) {
      double acc = 0.0;
      for (int a = 0; a <= j; ++a) {
        for (int b = 0; b <= k; ++b) {
          acc += basis.coeff(a, j) * basis.coeff(b, k) * g.moment(a + b);
        }
      }
      CHECK(std::abs(acc - (j == k ? 1.0 : 0.0)) < 1e-10);
    }
  }

  const MomentMeasure m2 = two_atom_measure();
  const OrthoPolyBasis b2 = ortho_polys(m2, 2);
  CHECK(std::abs(b2.coeff(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(b2.coeff(0, 1)) < 1e-14);
  CHECK(std::abs(b2.coeff(1, 1) - 1.0) < 1e-14);
  CHECK_THROWS_AS(ortho_polys(m2, 3), std::domain_error);
  CHECK_THROWS_AS(ortho_polys(m2, 0), std::invalid_argument);
}

TEST_CASE("transform coefficients match the quadrature oracle", "[models][transform]") {
  const MomentMeasure g = gaussian_measure();
  const std::vector<Complex> zs = {Complex(0.0, 0.0),  Complex(0.5, 0.0),  Complex(-1.0, 0.0),
                                   Complex(2.0, 0.0),  Complex(0.0, 1.0),  Complex(1.0, 1.0),
                                   Complex(-1.3, 0.7), Complex(0.0, -2.0), Complex(1.4, -1.4)};
  double worst = 0.0;
  for (int n = 0; n <= 10; ++n) {
    for (const Complex& z : zs) {
      worst = std::max(worst,
                       std::abs(chi_n(g, n, z) - testsupport::normal_transform_quadrature(n, z)));
    }
  }
  CHECK(worst < 1e-10);

  // Frozen values.
  CHECK(std::abs(chi_n(g, 0, Complex(0.0, 0.0)) - 1.0) < 1e-15);
  CHECK(std::abs(chi_n(g, 1, Complex(1.0, 0.0)) - Complex(0.0, -1.0) * std::exp(-0.5)) < 1e-15);
  const MomentMeasure m2 = two_atom_measure();
  CHECK(std::abs(chi_n(m2, 1, Complex(0.7, 0.0)) - Complex(0.0, -1.0) * std::sin(0.7)) < 1e-14);
}

TEST_CASE("kernel factorization through transform coefficients", "[models][transform]") {
  Rng rng(61);
  const MomentMeasure g = gaussian_measure();
  const MomentMeasure m2 = two_atom_measure();
  double worst_gauss = 0.0;
  double worst_atoms = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Complex z(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    const Complex v(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    worst_gauss = std::max(worst_gauss,
                           std::abs(sigma_kernel_series(g, 30, z, v) - sigma_kernel(g, z, v)));
    worst_atoms = std::max(worst_atoms,
                           std::abs(sigma_kernel_series(m2, 2, z, v) - sigma_kernel(m2, z, v)));
  }
  CHECK(worst_gauss < 1e-10);
  CHECK(worst_atoms < 1e-12);

  // A visibly short truncation misses badly, so the completeness check above
  // has discriminating power.
  CHECK(std::abs(sigma_kernel_series(g, 3, Complex(0.0, 1.4), Complex(0.0, -1.2)) -
                 sigma_kernel(g, Complex(0.0, 1.4), Complex(0.0, -1.2))) > 1e-3);
}

TEST_CASE("closed-form reference model for a discrete measure", "[models][oracle]") {
  const MomentMeasure m2 = two_atom_measure();
  const DiscreteOracle orc = discrete_oracle(m2);

  const Complex z(0.3, 0.2);
  const Complex minus_i(0.0, -1.0);
  CVec expected(2);
  expected << std::sqrt(0.5) * std::exp(minus_i * z), std::sqrt(0.5) * std::exp(-minus_i * z);
  CHECK((orc.feature(z) - expected).norm() < 1e-15);

  // Position matrix and moments.
  CHECK(orc.f_hat()(0, 0) == 1.0);
  CHECK(orc.f_hat()(1, 1) == -1.0);
  const CVec k0 = orc.feature(Complex(0.0, 0.0));
  CHECK(std::abs((k0.adjoint() * orc.f_hat() * k0)(0) - m2.moment(1)) < 1e-14);
  CHECK(std::abs((k0.adjoint() * orc.f_hat() * orc.f_hat() * k0)(0) - m2.moment(2)) < 1e-14);

  // Feature Gram agrees with the chart kernel's Gram.
  const std::vector<Complex> zs = {Complex(0.1, -0.2), Complex(-0.4, 0.3), Complex(0.7, 0.1)};
  std::vector<Point> pts;
  for (const Complex& w : zs) pts.push_back(plane_point(w.real(), w.imag()));
  const CMat oracle_gram = orc.gram(zs);
  const GramSystem chart_gram = assemble_gram(sigma_kernel_chart(m2), pts);
  CHECK(max_abs(CMat(oracle_gram - chart_gram.gram)) < 1e-12);

  // Evolution is translation.
  CHECK((orc.evolve(0.8, z) - orc.feature(z + 0.8)).norm() < 1e-14);

  CHECK_THROWS_AS(discrete_oracle(gaussian_measure()), std::invalid_argument);
}

TEST_CASE("moment growth stays bounded for shipped measures", "[models][measure]") {
  const MomentGrowthCheck g = moment_growth_check(gaussian_measure());
  CHECK(g.bounded);
  CHECK(g.max_ratio < 10.0);
  const MomentGrowthCheck d = moment_growth_check(two_atom_measure());
  CHECK(d.bounded);
}

TEST_CASE("translation sections differentiate anti-holomorphically", "[models][transform]") {
  // The normalized section operator of the translation pair acts on kernel
  // sections as i times the conjugate complex derivative. The operator route
  // carries an extra factor -i relative to the raw matrix convention.
  Rng rng(67);
  for (const MomentMeasure& measure : {gaussian_measure(), two_atom_measure()}) {
    const TranslationModel model = translation_model(measure);
    const ChartKernel k = model.kernel;
    const HamiltonianPair pair = model.pair;
    auto phi = [k, pair](const Point& m) -> CMat { return phi_from_pair(k, pair, m); };
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const Point w = rng.uniform_vec(2, -0.8, 0.8);
      const Point m = rng.uniform_vec(2, -0.8, 0.8);
      const CVec v = rng.normal_cvec(1);
      std::function<CVec(const Point&)> f = [&](const Point& p) -> CVec {
        return eval_kernel(k, p, w) * v;
      };
      const CVec lhs = Complex(0.0, -1.0) * ks_apply_to(f, pair.X, phi, m);
      const CVec rhs = Complex(0.0, 1.0) * wirtinger(f, m, 0, /*conjugate=*/true);
      worst = std::max(worst, (lhs - rhs).norm() / (1.0 + f(m).norm()));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("rational sections evaluate and embed exactly", "[models][sections]") {
  const ChartKernel k = bidisc_kernel();
  Rng rng(71);
  double worst_embed = 0.0;
  double worst_constraint = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    Point w(4), m(4);
    for (int i = 0; i < 4; ++i) {
      w[i] = rng.uniform(-0.45, 0.45);
      m[i] = rng.uniform(-0.45, 0.45);
    }
    const CVec v = rng.normal_cvec(2);
    const PsiFunction psi = embed_section(w, v);
    worst_constraint = std::max(worst_constraint, std::abs(psi_constraint_residual(psi)));
    worst_embed =
        std::max(worst_embed, (psi_eval(psi, m) - CVec(eval_kernel(k, m, w) * v)).norm());
  }
  CHECK(worst_constraint < 1e-12);
  CHECK(worst_embed < 1e-12);
}

TEST_CASE("rational section operator has frozen values and refuses bad data", "[models][sections]") {
  const Point origin = Vec::Zero(4);

  PsiFunction psi;
  PsiTerm term;
  term.v1 = Complex(1.0, 0.0);
  psi.terms.push_back(term);
  psi.c = Complex(1.0, 0.0);
  CVec expected(2);
  expected << Complex(0.0, 2.0), Complex(0.0, 0.0);
  CHECK((bidisc_ks_reference(psi, origin) - expected).norm() < 1e-12);

  const PsiFunction zero;
  CHECK(bidisc_ks_reference(zero, origin).norm() < 1e-15);

  PsiFunction inconsistent = psi;
  inconsistent.c = Complex(0.25, 0.0);
  CHECK_THROWS_AS(bidisc_ks_reference(inconsistent, origin), std::invalid_argument);
}

TEST_CASE("rational section operator agrees with the differential route", "[models][sections]") {
  const ChartKernel k = bidisc_kernel();
  auto quoted_phi = [](const Point& m) -> CMat { return bidisc_quoted_vertical(m); };
  auto quoted_field = [](const Point& m) -> Vec { return bidisc_quoted_field(m); };
  Rng rng(73);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    Point w(4), m(4);
    for (int i = 0; i < 4; ++i) {
      w[i] = rng.uniform(-0.45, 0.45);
      m[i] = rng.uniform(-0.45, 0.45);
    }
    const CVec v = rng.normal_cvec(2);
    const PsiFunction psi = embed_section(w, v);
    std::function<CVec(const Point&)> f = [&](const Point& p) -> CVec {
      return eval_kernel(k, p, w) * v;
    };
    worst = std::max(worst,
                     (bidisc_ks_reference(psi, m) - ks_apply_to(f, quoted_field, quoted_phi, m))
                         .norm());
  }
  {
    // Linearity across a two-section combination.
    Point w1(4), w2(4), m(4);
    w1 << 0.2, -0.1, 0.15, 0.05;
    w2 << -0.25, 0.3, -0.1, 0.2;
    m << 0.1, 0.2, -0.15, 0.1;
    CVec v1(2), v2(2);
    v1 << Complex(0.7, -0.2), Complex(0.1, 0.4);
    v2 << Complex(-0.3, 0.5), Complex(0.6, 0.1);
    const PsiFunction psi = psi_sum({embed_section(w1, v1), embed_section(w2, v2)});
    std::function<CVec(const Point&)> f = [&](const Point& p) -> CVec {
      return CVec(eval_kernel(k, p, w1) * v1 + eval_kernel(k, p, w2) * v2);
    };
    worst = std::max(worst,
                     (bidisc_ks_reference(psi, m) - ks_apply_to(f, quoted_field, quoted_phi, m))
                         .norm());
  }
  CHECK(worst < 1e-8);
}
