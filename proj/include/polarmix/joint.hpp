// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "polarmix/distribution.hpp"

namespace polarmix {

/// Joint density of a (min, max) pair on a shared uniform grid over [a,b]:
/// axis u (first index) is the min component, axis v the max component.
class JointGrid {
 public:
  JointGrid() = default;
  JointGrid(double a, double b, std::size_t points)
      : a_(a), b_(b), f_(points * points, 0.0), n_(points) {
    detail::require(points >= 8, "joint grid: too few points");
    detail::require(a < b, "joint grid: needs a < b");
  }

  /// Independent product density f(u)f(v) of a base distribution.
  static JointGrid product(const RuntimeDistribution& d,
                           std::size_t points = 256) {
    JointGrid g(d.support_lo(), d.support_hi(), points);
    std::vector<double> dens(points);
    for (std::size_t i = 0; i < points; ++i) dens[i] = d.pdf(g.axis(i));
    for (std::size_t i = 0; i < points; ++i)
      for (std::size_t j = 0; j < points; ++j)
        g.at(i, j) = dens[i] * dens[j];
    g.renormalize();
    return g;
  }

  double axis(std::size_t i) const { return a_ + (b_ - a_) * i / (n_ - 1); }
  std::size_t points() const { return n_; }
  double support_lo() const { return a_; }
  double support_hi() const { return b_; }

  double& at(std::size_t iu, std::size_t iv) { return f_[iu * n_ + iv]; }
  double at(std::size_t iu, std::size_t iv) const { return f_[iu * n_ + iv]; }

  double step() const { return (b_ - a_) / (n_ - 1); }

  /// Trapezoid-rule total mass.
  double total_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        s += at(i, j) * weight(i) * weight(j);
    return s * step() * step();
  }

  /// Marginal over the max axis (density of the min component).
  std::vector<double> min_marginal() const {
    std::vector<double> m(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) m[i] += at(i, j) * weight(j);
    for (double& v : m) v *= step();
    return m;
  }

  /// Marginal over the min axis (density of the max component).
  std::vector<double> max_marginal() const {
    std::vector<double> m(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t i = 0; i < n_; ++i) m[j] += at(i, j) * weight(i);
    for (double& v : m) v *= step();
    return m;
  }

  void renormalize() {
    double m = total_mass();
    if (m <= 0.0) throw std::domain_error("joint grid: zero total mass");
    for (double& v : f_) v /= m;
  }

 private:
  double weight(std::size_t i) const {
    return (i == 0 || i + 1 == n_) ? 0.5 : 1.0;
  }

  double a_ = 0.0, b_ = 1.0;
  std::vector<double> f_;
  std::size_t n_ = 0;
};

/// One polarization step of the joint density: select the component named by
/// the bit (1 = max, 0 = min), marginalize the other axis out, and form the
/// (min, max) joint of two independent copies, 2 g(u) g(v) 1[u <= v].
inline JointGrid joint_density_step(const JointGrid& j, int bit) {
  std::vector<double> g = bit ? j.max_marginal() : j.min_marginal();
  JointGrid out(j.support_lo(), j.support_hi(), j.points());
  for (std::size_t iu = 0; iu < j.points(); ++iu) {
    // half weight on the boundary of {u <= v}
    out.at(iu, iu) = g[iu] * g[iu];
    for (std::size_t iv = iu + 1; iv < j.points(); ++iv)
      out.at(iu, iv) = 2.0 * g[iu] * g[iv];
  }
  out.renormalize();
  return out;
}

}  // namespace polarmix
