// Acceptance gate: one criterion per invocation (or "all"), each sub-check
// printed as a single [PASS]/[FAIL] line with its measured value and pinned
// tolerance. The binary exits nonzero when any requested sub-check fails.
//
// Usage: acceptance [criterion|all] [path-to-cli]
// The command-line tool path is only consumed by criterion 8.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "opk/opk.hpp"
#include "support/oracles.hpp"

namespace {

using namespace opk;
using Clock = std::chrono::steady_clock;

struct Gate {
  int passed = 0;
  int failed = 0;

  void record(bool ok, const std::string& label, const std::string& detail) {
    std::printf("[%s] %-58s %s\n", ok ? "PASS" : "FAIL", label.c_str(), detail.c_str());
    if (ok) {
      ++passed;
    } else {
      ++failed;
    }
  }

  void residual(const std::string& label, double value, double tol,
                const std::string& note = "") {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "value=%.3e tol=%.1e%s%s", value, tol,
                  note.empty() ? "" : "  ", note.c_str());
    record(value <= tol, label, buf);
  }

  void expect(const std::string& label, bool ok, const std::string& detail) {
    record(ok, label, detail);
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Point plane_point(double x, double y) {
  Point m(2);
  m << x, y;
  return m;
}

// --- criterion 1: kernel axioms on sampled interior points -------------------

void criterion_1(Gate& gate) {
  const auto start = Clock::now();
  const ChartKernel k = bidisc_kernel();
  const Representation rep = bidisc_representation();
  Rng rng(12345);
  const std::vector<Point> pts = bidisc_sample_points(rng, 10);

  gate.residual("conjugate symmetry over 10 seeded points",
                hermitian_residual(k, pts), 1e-12);

  std::vector<BundlePoint> bundle_pts;
  for (const Point& p : pts) {
    GroupParam g;
    g.angles = rng.uniform_vec(2, -M_PI, M_PI);
    bundle_pts.push_back(BundlePoint{p, g});
  }
  std::vector<GroupParam> gs;
  for (int i = 0; i < 3; ++i) {
    GroupParam g;
    g.angles = rng.uniform_vec(2, -M_PI, M_PI);
    gs.push_back(g);
  }
  gate.residual("bundle right-equivariance over seeded group elements",
                equivariance_residual(k, rep, bundle_pts, gs), 1e-12);

  const PositivityCertificate cert = certify_positivity(assemble_gram(k, pts));
  gate.residual("normalized negative part of the Gram spectrum",
                std::max(0.0, -cert.min_eig) / std::max(cert.norm, 1e-300), 1e-9);

  const double elapsed = seconds_since(start);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "elapsed=%.3fs budget=1s", elapsed);
  gate.expect("criterion completes within one second", elapsed < 1.0, buf);
}

// --- criterion 2: factorization and reproducing identities -------------------

void criterion_2(Gate& gate) {
  const ChartKernel k = bidisc_kernel();
  Rng rng(20250821);
  const std::vector<Point> pts = bidisc_sample_points(rng, 6);
  const GramSystem g = assemble_gram(k, pts);

  const FeatureMap f = factorize(g);
  gate.residual("factorization reconstructs the Gram matrix (relative)",
                (feature_gram(f) - g.gram).norm() / g.gram.norm(), 1e-10);

  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    SpanElement span{rng.normal_cvec(g.dim())};
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const CVec v = rng.normal_cvec(2);
      worst = std::max(worst, reproducing_residual(g, span, pts[j], v));
      const Point mid = 0.5 * (pts[j] + pts[(j + 1) % pts.size()]);
      worst = std::max(worst, reproducing_residual(g, span, mid, v));
    }
  }
  gate.residual("reproducing identity over 20 random span elements", worst, 1e-10);

  const CMat planted = rng.random_unitary(f.rank);
  FeatureMap f2 = f;
  f2.columns = planted * f.columns;
  const CMat recovered = factorization_equivalence(f, f2);
  gate.residual("planted unitary intertwiner recovered",
                max_abs(CMat(recovered - planted)), 1e-9);
}

// --- criterion 3: translation-chart geometry closed forms --------------------

void criterion_3(Gate& gate) {
  const auto start = Clock::now();
  const TranslationModel model = translation_model(gaussian_measure());
  const ChartKernel& k = model.kernel;

  double worst_theta = 0.0;
  Rng rng(33);
  for (int trial = 0; trial < 3; ++trial) {
    const Point m = rng.uniform_vec(2, -1.0, 1.0);
    const Complex z = coord_complex(m, 0);
    const Complex s = z - std::conj(z);
    worst_theta = std::max(worst_theta,
                           std::abs(connection_coord(k, m, 0)(0, 0) - (-s)));
    worst_theta = std::max(worst_theta,
                           std::abs(connection_coord(k, m, 1)(0, 0) - Complex(0.0, 1.0) * (-s)));
  }
  gate.residual("connection matches the log-derivative closed form", worst_theta, 1e-6);

  double worst_curv = 0.0;
  for (const Point& m : {plane_point(0.0, 0.0), plane_point(0.6, -0.4)}) {
    worst_curv = std::max(worst_curv,
                          std::abs(curvature_wirtinger_scalar(k, m, 0) - 1.0));
  }
  gate.residual("curvature scalar is plus one (second log-derivative minus one)",
                worst_curv, 1e-6);

  double worst_ham = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const Point m = rng.uniform_vec(2, -1.0, 1.0);
    worst_ham = std::max(worst_ham, hamiltonian_residual(k, model.pair, m));
  }
  gate.residual("translation pair solves the field-curvature equation", worst_ham, 1e-6);

  const double elapsed = seconds_since(start);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "elapsed=%.3fs budget=1s", elapsed);
  gate.expect("criterion completes within one second", elapsed < 1.0, buf);
}

// --- criterion 4: two-atom compressed dynamics -------------------------------

void criterion_4(Gate& gate) {
  const TranslationModel model = translation_model(two_atom_measure());
  const std::vector<Point> pts = {plane_point(0.0, 0.0), plane_point(M_PI / 4.0, 0.0)};
  const CoherentFrame frame = build_frame(model.kernel, pts);
  const CMat a = generator_matrix(frame, model.pair);

  const Vec spec = whitened_spectrum(frame, a);
  double worst_spec = 1.0;
  if (spec.size() == 2) {
    worst_spec = std::max(std::abs(spec[0] + 1.0), std::abs(spec[1] - 1.0));
  }
  gate.residual("compressed spectrum equals the atom set", worst_spec, 1e-12);

  double worst_flow = 0.0;
  for (const double t : {0.1, 0.5, 1.0}) {
    const Propagator prop = propagate(frame, a, t);
    worst_flow = std::max(worst_flow,
                          propagator_vs_flow_residual(frame, prop, model.flow, model.rep));
  }
  gate.residual("propagator tracks the exact translation flow", worst_flow, 1e-9);

  double worst_rec = 0.0;
  for (int j = 0; j < 2; ++j) {
    worst_rec = std::max(worst_rec, max_abs(reconstruct_F(frame, a, j)));
  }
  gate.residual("recovered matrix field vanishes at real points", worst_rec, 1e-10);
}

// --- criterion 5: transform coefficients and section derivative --------------

void criterion_5(Gate& gate) {
  const MomentMeasure g = gaussian_measure();

  const std::vector<Complex> zs = {Complex(0.0, 0.0),  Complex(0.5, 0.0),  Complex(-1.0, 0.0),
                                   Complex(2.0, 0.0),  Complex(0.0, 1.0),  Complex(1.0, 1.0),
                                   Complex(-1.3, 0.7), Complex(0.0, -2.0), Complex(1.4, -1.4)};
  double worst_chi = 0.0;
  for (int n = 0; n <= 10; ++n) {
    for (const Complex& z : zs) {
      worst_chi = std::max(worst_chi, std::abs(chi_n(g, n, z) -
                                               testsupport::normal_transform_quadrature(n, z)));
    }
  }
  gate.residual("transform coefficients match the quadrature oracle", worst_chi, 1e-10);

  Rng rng(55);
  double worst_series = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Complex z(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    const Complex v(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    worst_series = std::max(worst_series,
                            std::abs(sigma_kernel_series(g, 30, z, v) - sigma_kernel(g, z, v)));
  }
  gate.residual("30-term factorization series reproduces the kernel", worst_series, 1e-10);

  const TranslationModel model = translation_model(g);
  const ChartKernel k = model.kernel;
  const HamiltonianPair pair = model.pair;
  auto phi = [k, pair](const Point& m) -> CMat { return phi_from_pair(k, pair, m); };
  double worst_ks = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Point w = rng.uniform_vec(2, -0.8, 0.8);
    const Point m = rng.uniform_vec(2, -0.8, 0.8);
    const CVec v = rng.normal_cvec(1);
    std::function<CVec(const Point&)> f = [&](const Point& p) -> CVec {
      return eval_kernel(k, p, w) * v;
    };
    const CVec lhs = Complex(0.0, -1.0) * ks_apply_to(f, pair.X, phi, m);
    const CVec rhs = Complex(0.0, 1.0) * wirtinger(f, m, 0, /*conjugate=*/true);
    worst_ks = std::max(worst_ks, (lhs - rhs).norm());
  }
  gate.residual("normalized section operator acts as i times the conjugate derivative",
                worst_ks, 1e-6);
}

// --- criterion 6: cocycle recovery and displayed-pair cross-checks -----------

void criterion_6(Gate& gate) {
  const ChartKernel k = bidisc_kernel();
  const Representation rep = bidisc_representation();
  Rng rng(66);
  const std::vector<Point> anchors = bidisc_sample_points(rng, 3);
  Point probe(4);
  probe << 0.3, 0.1, -0.2, 0.25;

  double worst_solve = 0.0;
  double worst_agreement = 0.0;
  for (const char* name : {"rot1", "rot2", "sigma"}) {
    const FlowSpec flow = bidisc_flow(name);
    for (const double t : {0.3, 0.7}) {
      const CocycleSolution sol = cocycle_solve(k, flow.sigma, rep, t, probe, anchors);
      worst_solve = std::max(worst_solve, sol.residual);
      worst_agreement = std::max(
          worst_agreement,
          max_abs(CMat(rep.apply(sol.g) - rep.apply(flow.cocycle(t, probe)))));
    }
  }
  gate.residual("solved cocycles preserve the kernel", worst_solve, 1e-9);
  gate.residual("solved cocycles agree with the declared families", worst_agreement, 1e-6);

  {
    FlowSpec quoted = bidisc_flow("sigma");
    quoted.cocycle = [](double t, const Point&) { return bidisc_quoted_cocycle(t); };
    const std::vector<Point> pts = bidisc_sample_points(rng, 4);
    const double mismatch = flow_invariance_residual(k, quoted, rep, 0.5, pts);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "preservation residual %.3e flagged as a discrepancy",
                  mismatch);
    gate.expect("quoted opposite-angle cocycle family is detected as inconsistent",
                mismatch > 1e-3, buf);
  }

  {
    const HamiltonianPair quoted = bidisc_quoted_pair();
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      Point m(4);
      for (int i = 0; i < 4; ++i) m[i] = rng.uniform(-0.35, 0.35);
      worst = std::max(worst, hamiltonian_residual(k, quoted, m));
    }
    gate.residual("quoted candidate pair solves the field-curvature equation", worst, 1e-4,
                  "(known discrepancy: the quoted closed form fails this equation)");
  }

  {
    auto quoted_phi = [](const Point& m) -> CMat { return bidisc_quoted_vertical(m); };
    auto quoted_field = [](const Point& m) -> Vec { return bidisc_quoted_field(m); };
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
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
      worst = std::max(worst, (bidisc_ks_reference(psi, m) -
                               ks_apply_to(f, quoted_field, quoted_phi, m)).norm());
    }
    gate.residual("closed-form section operator matches the differential route", worst, 1e-6);
  }

  {
    std::vector<Point> pts = {Vec::Zero(4)};
    const std::vector<Point> fp = bidisc_frame_points();
    pts.push_back(fp[0]);
    pts.push_back(fp[1]);
    const CoherentFrame frame = build_frame(k, pts);
    const CMat a = generator_matrix(frame, bidisc_quoted_pair());
    CMat expected = CMat::Zero(2, 2);
    expected(0, 0) = Complex(0.0, 1.0);
    expected(1, 1) = Complex(0.0, -1.0);
    gate.residual("origin reconstruction returns the candidate's diagonal value",
                  max_abs(CMat(reconstruct_F(frame, a, 0) - expected)), 1e-5);
  }
}

// --- criterion 7: commutator closure under quantization ----------------------

void criterion_7(Gate& gate) {
  {
    const ChartKernel k = bidisc_kernel();
    const Representation rep = bidisc_representation();
    const ChartKernel ku = unitary_gauge(k);
    const GaugedFlow g1 = unitary_gauge_flow(k, bidisc_flow("rot1"), rep);
    const GaugedFlow g2 = unitary_gauge_flow(k, bidisc_flow("rot2"), rep);
    const CoherentFrame frame = build_frame(ku, bidisc_frame_points());
    const HamiltonianPair p1 = flow_hamiltonian_pair(ku, g1.flow, g1.rep);
    const HamiltonianPair p2 = flow_hamiltonian_pair(ku, g2.flow, g2.rep);
    gate.residual("rotation commutator closes on the bracket generator",
                  prequantization_commutator_residual(frame, p1, p2), 1e-4);
  }
  {
    const TranslationModel model = translation_model(two_atom_measure());
    const std::vector<Point> pts = {plane_point(0.0, 0.0), plane_point(M_PI / 4.0, 0.0)};
    const CoherentFrame frame = build_frame(model.kernel, pts);
    gate.residual("self-commutator maps to the zero generator",
                  prequantization_commutator_residual(frame, model.pair, model.pair), 1e-12);
  }
}

// --- criterion 8: command-line pipeline end to end ---------------------------

void criterion_8(Gate& gate, const std::string& cli_path) {
  if (cli_path.empty()) {
    gate.expect("command-line binary path provided", false,
                "pass the tool path as the second argument");
    return;
  }
  const std::string cmd = "\"" + cli_path + "\" all > /dev/null";
  const auto start = Clock::now();
  const int rc = std::system(cmd.c_str());
  const double elapsed = seconds_since(start);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "exit=%d elapsed=%.1fs budget=30s", rc, elapsed);
  gate.expect("full default run exits cleanly", rc == 0, buf);
  gate.expect("full default run completes within thirty seconds", elapsed < 30.0, buf);
}

struct Criterion {
  int number;
  const char* label;
  std::function<void(Gate&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  const std::string cli_path = argc > 2 ? argv[2] : "";

  const std::vector<Criterion> criteria = {
      {1, "kernel axioms on sampled interior points", criterion_1},
      {2, "factorization and reproducing identities", criterion_2},
      {3, "translation-chart geometry closed forms", criterion_3},
      {4, "two-atom compressed dynamics", criterion_4},
      {5, "transform coefficients and section derivative", criterion_5},
      {6, "cocycle recovery and displayed-pair cross-checks", criterion_6},
      {7, "commutator closure under quantization", criterion_7},
      {8, "command-line pipeline end to end",
       [&cli_path](Gate& gate) { criterion_8(gate, cli_path); }},
  };

  int total_failed = 0;
  bool matched = false;
  for (const Criterion& c : criteria) {
    if (which != "all" && which != std::to_string(c.number)) continue;
    matched = true;
    std::printf("== criterion %d: %s ==\n", c.number, c.label);
    Gate gate;
    try {
      c.run(gate);
    } catch (const std::exception& e) {
      gate.expect("criterion body completes without throwing", false, e.what());
    }
    std::printf("criterion %d: %s (%d of %d sub-checks passed)\n\n", c.number,
                gate.failed == 0 ? "PASS" : "FAIL", gate.passed, gate.passed + gate.failed);
    total_failed += gate.failed;
  }

  if (!matched) {
    std::fprintf(stderr, "unknown criterion '%s' (expected 1..8 or all)\n", which.c_str());
    return 2;
  }
  return total_failed == 0 ? 0 : 1;
}
