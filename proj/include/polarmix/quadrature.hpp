// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>

namespace polarmix {

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (symmetric half listed).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kGK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <typename F>
void gk15(F&& f, double a, double b, double& kronrod, double& err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    double x = h * kGK15Nodes[i];
    double fv = (i == 7) ? f(c) : f(c - x) + f(c + x);
    resk += kGK15Weights[i] * fv;
    // Gauss-7 nodes are the odd-index Kronrod nodes plus the center.
    if (i % 2 == 1 || i == 7) resg += kG7Weights[i / 2] * fv;
  }
  kronrod = resk * h;
  err = std::abs((resk - resg) * h);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a,b].
/// Recursion splits until the local error estimate meets the budget.
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 1e-14, int max_depth = 48) {
  struct Rec {
    static double go(F& f, double a, double b, double tol, double abs_tol,
                     int depth) {
      double v, e;
      detail::gk15(f, a, b, v, e);
      if (e <= std::max(abs_tol, tol * std::abs(v)) || depth <= 0) return v;
      double m = 0.5 * (a + b);
      return go(f, a, m, tol, abs_tol * 0.5, depth - 1) +
             go(f, m, b, tol, abs_tol * 0.5, depth - 1);
    }
  };
  if (!(a <= b)) throw std::invalid_argument("integrate: bad interval");
  if (a == b) return 0.0;
  return Rec::go(f, a, b, rel_tol, abs_tol, max_depth);
}

}  // namespace polarmix
