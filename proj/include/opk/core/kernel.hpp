#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "opk/core/linalg.hpp"
#include "opk/core/numdiff.hpp"
#include "opk/core/types.hpp"

namespace opk {

//! Declared evaluation domain: a per-coordinate box, with optional disc-radius
//! bounds per complex coordinate pair for holomorphic charts.
struct DomainBox {
  Vec lo;
  Vec hi;
  std::vector<double> disc_radius;  // per complex pair; entries <= 0 impose no bound

  bool contains(const Point& m) const {
    if (lo.size() == 0) return true;  // unbounded chart
    if (m.size() != lo.size()) return false;
    for (int k = 0; k < m.size(); ++k) {
      if (!(m[k] >= lo[k] && m[k] <= hi[k])) return false;
    }
    for (std::size_t i = 0; i < disc_radius.size(); ++i) {
      if (disc_radius[i] <= 0.0) continue;
      if (std::abs(coord_complex(m, static_cast<int>(i))) > disc_radius[i]) return false;
    }
    return true;
  }

  static DomainBox unbounded() { return DomainBox{}; }

  static DomainBox cube(int dim, double half_width) {
    DomainBox b;
    b.lo = Vec::Constant(dim, -half_width);
    b.hi = Vec::Constant(dim, half_width);
    return b;
  }
};

//! Operator-valued kernel in one trivialization chart: a pure map
//! (m, n) -> complex fiber_dim × fiber_dim matrix over real chart coordinates.
struct ChartKernel {
  int fiber_dim = 0;
  int chart_dim = 0;
  bool holomorphic = false;  // complex chart: coords are interleaved (re, im) pairs
  bool grid_only = false;    // evaluation defined only on a fixed finite point grid
  DomainBox domain;
  std::function<CMat(const Point&, const Point&)> eval;
};

//! Domain-checked kernel evaluation.
inline CMat eval_kernel(const ChartKernel& k, const Point& m, const Point& n) {
  if (m.size() != k.chart_dim || n.size() != k.chart_dim) {
    throw std::invalid_argument("eval_kernel: point dimension does not match chart");
  }
  if (!k.domain.contains(m) || !k.domain.contains(n)) {
    throw std::domain_error("eval_kernel: point outside the declared chart domain");
  }
  return k.eval(m, n);
}

//! Largest deviation from Hermitian symmetry K(m,n) = K(n,m)* over all point pairs.
inline double hermitian_residual(const ChartKernel& k, const std::vector<Point>& pts) {
  if (pts.empty()) throw std::invalid_argument("hermitian_residual: need at least one point");
  double worst = 0.0;
  for (const Point& m : pts) {
    for (const Point& n : pts) {
      worst = std::max(worst, max_abs(CMat(eval_kernel(k, m, n) - eval_kernel(k, n, m).adjoint())));
    }
  }
  return worst;
}

//! Finite-difference Cauchy–Riemann residual for a holomorphic chart kernel:
//! the first slot must be anti-holomorphic (∂/∂z of slot one vanishes) and the
//! second slot holomorphic (∂/∂z̄ of slot two vanishes).
inline double cauchy_riemann_residual(const ChartKernel& k, const std::vector<Point>& pts) {
  if (!k.holomorphic) return 0.0;
  const int pairs = k.chart_dim / 2;
  double worst = 0.0;
  for (const Point& m : pts) {
    for (const Point& n : pts) {
      for (int i = 0; i < pairs; ++i) {
        auto slot1 = [&](const Point& p) -> CMat { return eval_kernel(k, p, n); };
        auto slot2 = [&](const Point& q) -> CMat { return eval_kernel(k, m, q); };
        worst = std::max(worst, max_abs(CMat(wirtinger(slot1, m, i, /*conjugate=*/false))));
        worst = std::max(worst, max_abs(CMat(wirtinger(slot2, n, i, /*conjugate=*/true))));
      }
    }
  }
  return worst;
}

//! Structural group element. U1 and diagonal-torus elements are angle vectors;
//! full-matrix elements carry the matrix explicitly.
enum class GroupKind { U1, DiagonalTorus, FullMatrix };

struct GroupParam {
  Vec angles;
  CMat matrix;
};

//! Matrix representation T of the structural group on the fiber.
struct Representation {
  GroupKind kind = GroupKind::DiagonalTorus;
  int fiber_dim = 0;

  CMat apply(const GroupParam& g) const {
    switch (kind) {
      case GroupKind::U1: {
        if (g.angles.size() != 1) throw std::invalid_argument("Representation: U1 wants one angle");
        return std::polar(1.0, g.angles[0]) * CMat::Identity(fiber_dim, fiber_dim);
      }
      case GroupKind::DiagonalTorus: {
        if (g.angles.size() != fiber_dim) {
          throw std::invalid_argument("Representation: torus wants fiber_dim angles");
        }
        CMat t = CMat::Zero(fiber_dim, fiber_dim);
        for (int i = 0; i < fiber_dim; ++i) t(i, i) = std::polar(1.0, g.angles[i]);
        return t;
      }
      case GroupKind::FullMatrix: {
        if (g.matrix.rows() != fiber_dim || g.matrix.cols() != fiber_dim) {
          throw std::invalid_argument("Representation: matrix dimension mismatch");
        }
        return g.matrix;
      }
    }
    throw std::logic_error("Representation: unknown kind");
  }

  GroupParam identity() const {
    GroupParam g;
    if (kind == GroupKind::FullMatrix) {
      g.matrix = CMat::Identity(fiber_dim, fiber_dim);
    } else {
      g.angles = Vec::Zero(kind == GroupKind::U1 ? 1 : fiber_dim);
    }
    return g;
  }

  GroupParam compose(const GroupParam& a, const GroupParam& b) const {
    GroupParam g;
    if (kind == GroupKind::FullMatrix) {
      g.matrix = apply(a) * apply(b);
    } else {
      g.angles = a.angles + b.angles;
    }
    return g;
  }

  GroupParam inverse(const GroupParam& a) const {
    GroupParam g;
    if (kind == GroupKind::FullMatrix) {
      g.matrix = apply(a).inverse();
    } else {
      g.angles = -a.angles;
    }
    return g;
  }
};

//! Point of the trivialized bundle M × G.
struct BundlePoint {
  Point base;
  GroupParam group;
};

//! Kernel extended to the trivialized bundle: K̂((m,g),(n,h)) = T(g)* K(m,n) T(h).
inline std::function<CMat(const BundlePoint&, const BundlePoint&)> bundle_extend(
    const ChartKernel& k, const Representation& t) {
  if (t.fiber_dim != k.fiber_dim) {
    throw std::invalid_argument("bundle_extend: representation/kernel fiber mismatch");
  }
  return [k, t](const BundlePoint& p, const BundlePoint& q) -> CMat {
    return t.apply(p.group).adjoint() * eval_kernel(k, p.base, q.base) * t.apply(q.group);
  };
}

//! Largest deviation from right-equivariance K̂(p, q·g) = K̂(p, q) T(g) over samples.
inline double equivariance_residual(const ChartKernel& k, const Representation& t,
                                    const std::vector<BundlePoint>& pts,
                                    const std::vector<GroupParam>& gs) {
  auto khat = bundle_extend(k, t);
  double worst = 0.0;
  for (const BundlePoint& p : pts) {
    for (const BundlePoint& q : pts) {
      for (const GroupParam& g : gs) {
        BundlePoint qg{q.base, t.compose(q.group, g)};
        worst = std::max(worst, max_abs(CMat(khat(p, qg) - khat(p, q) * t.apply(g))));
      }
    }
  }
  return worst;
}

//! Largest deviation from the homomorphism law T(g)T(h) = T(gh) over sampled pairs.
inline double homomorphism_residual(const Representation& t, const std::vector<GroupParam>& gs) {
  double worst = 0.0;
  for (const GroupParam& a : gs) {
    for (const GroupParam& b : gs) {
      worst = std::max(worst, max_abs(CMat(t.apply(a) * t.apply(b) - t.apply(t.compose(a, b)))));
    }
  }
  return worst;
}

//! Normalized overlap ⟨v, K(m,n) w⟩ / (⟨v,K(m,m)v⟩^{1/2} ⟨w,K(n,n)w⟩^{1/2}).
//! The fiber product is anti-linear in its first argument. For a positive
//! definite kernel the modulus is at most 1.
inline Complex transition_amplitude(const ChartKernel& k, const Point& m, const CVec& v,
                                    const Point& n, const CVec& w) {
  const Complex num = (v.adjoint() * eval_kernel(k, m, n) * w)(0);
  const double pv = ((v.adjoint() * eval_kernel(k, m, m) * v)(0)).real();
  const double pw = ((w.adjoint() * eval_kernel(k, n, n) * w)(0)).real();
  if (pv <= 0.0 || pw <= 0.0) {
    throw std::domain_error("transition_amplitude: degenerate state (zero self-amplitude)");
  }
  return num / std::sqrt(pv * pw);
}

}  // namespace opk
