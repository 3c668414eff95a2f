#pragma once

#include <cmath>
#include <utility>

#include "opk/core/types.hpp"

namespace opk {

//! Step size for a derivative at m along coordinate k, relative to the coordinate magnitude.
inline double coord_step(const Point& m, int k, double scale) {
  return scale * (1.0 + std::abs(m[k]));
}

//! Step size for a directional derivative at m, relative to the point magnitude.
inline double dir_step(const Point& m, double scale) {
  return scale * (1.0 + m.norm());
}

//! One Richardson extrapolation level over a symmetric difference quotient d(h).
template <class F>
auto richardson(F&& d, double h) -> decltype(d(h)) {
  auto fine = d(0.5 * h);
  auto coarse = d(h);
  return (4.0 * fine - coarse) / 3.0;
}

//! Central-difference derivative of g along coordinate k, with Richardson refinement.
template <class G>
auto deriv_coord(G&& g, const Point& m, int k, double scale = kFirstStep) -> decltype(g(m)) {
  auto d = [&](double h) -> decltype(g(m)) {
    Point p = m, q = m;
    p[k] += h;
    q[k] -= h;
    return (g(p) - g(q)) / (2.0 * h);
  };
  return richardson(d, coord_step(m, k, scale));
}

//! Central-difference derivative of g along the constant direction v.
//! Returns zero for a numerically vanishing direction.
template <class G>
auto deriv_dir(G&& g, const Point& m, const Vec& v, double scale = kFirstStep) -> decltype(g(m)) {
  using R = decltype(g(m));
  if (v.norm() < 1e-14) {
    R zero = g(m);
    zero.setZero();
    return zero;
  }
  auto d = [&](double h) -> R { return (g(m + h * v) - g(m - h * v)) / (2.0 * h); };
  return richardson(d, dir_step(m, scale));
}

//! Central-difference derivative at t = 0 of a map defined on a real parameter.
template <class G>
auto deriv_time(G&& g, double step = kFirstStep) -> decltype(g(0.0)) {
  auto d = [&](double h) -> decltype(g(0.0)) { return (g(h) - g(-h)) / (2.0 * h); };
  return richardson(d, step);
}

//! Wirtinger derivative of g with respect to complex coordinate pair i:
//! conjugate = false gives ∂/∂z = (∂x − i∂y)/2, conjugate = true gives ∂/∂z̄ = (∂x + i∂y)/2.
template <class G>
auto wirtinger(G&& g, const Point& m, int i, bool conjugate, double scale = kFirstStep)
    -> decltype(g(m)) {
  auto dx = deriv_coord(g, m, 2 * i, scale);
  auto dy = deriv_coord(g, m, 2 * i + 1, scale);
  const Complex iu(0.0, conjugate ? 1.0 : -1.0);
  return (dx + iu * dy) / 2.0;
}

}  // namespace opk
