// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace polarmix {

/// Chebyshev series on the unit interval: f(u) = sum_k c[k] T_k(2u - 1).
///
/// This is the segment workhorse of the distribution code. Products,
/// derivatives and integrals are exact linear operations on coefficients,
/// and coefficients of bounded functions stay O(1) at any degree, which is
/// what makes degree-512 CDF arithmetic viable in doubles.
class ChebSeries {
 public:
  ChebSeries() : coef_{0.0} {}
  explicit ChebSeries(std::vector<double> coef) : coef_(std::move(coef)) {
    if (coef_.empty()) coef_.push_back(0.0);
  }

  static ChebSeries constant(double c) { return ChebSeries({c}); }

  /// Affine function a + b*u on [0,1]. T_1(2u-1) = 2u-1.
  static ChebSeries linear(double a, double b) {
    return ChebSeries({a + 0.5 * b, 0.5 * b});
  }

  /// Interpolate f at the d+1 Chebyshev extrema of the interval.
  template <typename F>
  static ChebSeries interpolate(F&& f, int degree) {
    const int n = degree;
    std::vector<double> fv(n + 1);
    for (int j = 0; j <= n; ++j) {
      double x = std::cos(M_PI * j / n);  // second-kind points
      fv[j] = f(0.5 * (x + 1.0));
    }
    std::vector<double> c(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
      double s = 0.5 * (fv[0] + (k % 2 == 0 ? fv[n] : -fv[n]));
      for (int j = 1; j < n; ++j) s += fv[j] * std::cos(M_PI * k * j / n);
      c[k] = 2.0 * s / n;
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    return ChebSeries(std::move(c));
  }

  const std::vector<double>& coef() const { return coef_; }
  int degree() const { return static_cast<int>(coef_.size()) - 1; }

  /// Clenshaw evaluation at u in [0,1].
  double operator()(double u) const {
    double x = 2.0 * u - 1.0;
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = coef_.size(); k-- > 1;) {
      double b0 = coef_[k] + 2.0 * x * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return coef_[0] + x * b1 - b2;
  }

  ChebSeries operator+(const ChebSeries& o) const {
    std::vector<double> c(std::max(coef_.size(), o.coef_.size()), 0.0);
    for (std::size_t k = 0; k < coef_.size(); ++k) c[k] += coef_[k];
    for (std::size_t k = 0; k < o.coef_.size(); ++k) c[k] += o.coef_[k];
    return ChebSeries(std::move(c));
  }

  ChebSeries operator-(const ChebSeries& o) const {
    std::vector<double> c(std::max(coef_.size(), o.coef_.size()), 0.0);
    for (std::size_t k = 0; k < coef_.size(); ++k) c[k] += coef_[k];
    for (std::size_t k = 0; k < o.coef_.size(); ++k) c[k] -= o.coef_[k];
    return ChebSeries(std::move(c));
  }

  ChebSeries operator*(double s) const {
    std::vector<double> c(coef_);
    for (double& v : c) v *= s;
    return ChebSeries(std::move(c));
  }

  /// Product via T_i T_j = (T_{i+j} + T_{|i-j|}) / 2.
  ChebSeries operator*(const ChebSeries& o) const {
    std::vector<double> c(coef_.size() + o.coef_.size() - 1, 0.0);
    for (std::size_t i = 0; i < coef_.size(); ++i) {
      if (coef_[i] == 0.0) continue;
      for (std::size_t j = 0; j < o.coef_.size(); ++j) {
        double h = 0.5 * coef_[i] * o.coef_[j];
        c[i + j] += h;
        c[i > j ? i - j : j - i] += h;
      }
    }
    return ChebSeries(std::move(c));
  }

  ChebSeries squared() const { return (*this) * (*this); }

  /// d/du (factor 2 from the [0,1] -> [-1,1] change of variable).
  ChebSeries derivative() const {
    int n = degree();
    if (n == 0) return constant(0.0);
    std::vector<double> d(n, 0.0);
    double dkp1 = 0.0, dkp2 = 0.0;
    for (int k = n - 1; k >= 0; --k) {
      double dk = dkp2 + 2.0 * (k + 1) * coef_[k + 1];
      d[k] = dk;
      dkp2 = dkp1;
      dkp1 = dk;
    }
    // the recurrence above is c'_k = c'_{k+2} + 2(k+1) c_{k+1}
    d[0] *= 0.5;
    for (double& v : d) v *= 2.0;
    return ChebSeries(std::move(d));
  }

  /// Integral over the full interval [0,1].
  double integral() const {
    double s = 0.0;
    for (std::size_t k = 0; k < coef_.size(); k += 2)
      s += coef_[k] / (1.0 - static_cast<double>(k) * static_cast<double>(k));
    return s;
  }

  /// Antiderivative with value 0 at u = 0.
  ChebSeries antiderivative() const {
    int n = degree();
    std::vector<double> b(n + 2, 0.0);
    for (int k = 1; k <= n + 1; ++k) {
      double ckm1 = coef_[k - 1];
      double ckp1 = (k + 1 <= n) ? coef_[k + 1] : 0.0;
      b[k] = (ckm1 - ckp1) / (2.0 * k);
    }
    for (double& v : b) v *= 0.5;  // du = dx/2
    ChebSeries r(std::move(b));
    r.coef_[0] -= r(0.0);
    return r;
  }

  /// Zero out coefficients below the cleanup threshold and drop trailing
  /// zeros; contains degree-doubling noise (threshold per artifact contract).
  ChebSeries& cleanup(double eps = 1e-14) {
    for (double& v : coef_)
      if (std::abs(v) < eps) v = 0.0;
    std::size_t n = coef_.size();
    while (n > 1 && coef_[n - 1] == 0.0) --n;
    coef_.resize(n);
    return *this;
  }

  double max_abs_coef() const {
    double m = 0.0;
    for (double v : coef_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Monomial coefficients in u (ascending). Intended for modest degrees;
  /// the conversion is ill-conditioned beyond degree ~40.
  std::vector<double> monomial_coefficients() const {
    int n = degree();
    if (n > 64) throw std::domain_error("monomial conversion beyond degree 64");
    // T_k(2u-1) expanded by the recurrence T_{k+1} = 2(2u-1)T_k - T_{k-1}.
    std::vector<std::vector<double>> T(n + 1);
    T[0] = {1.0};
    if (n >= 1) T[1] = {-1.0, 2.0};
    for (int k = 2; k <= n; ++k) {
      T[k].assign(k + 1, 0.0);
      for (int j = 0; j < k; ++j) {
        T[k][j + 1] += 4.0 * T[k - 1][j];
        T[k][j] -= 2.0 * T[k - 1][j];
      }
      for (int j = 0; j < k - 1; ++j) T[k][j] -= T[k - 2][j];
    }
    std::vector<double> m(n + 1, 0.0);
    for (int k = 0; k <= n; ++k)
      for (int j = 0; j <= k; ++j) m[j] += coef_[k] * T[k][j];
    return m;
  }

  /// Series for a polynomial given by monomial coefficients in u (ascending).
  static ChebSeries from_monomial(const std::vector<double>& mono) {
    ChebSeries r = constant(0.0);
    ChebSeries u = linear(0.0, 1.0);
    for (std::size_t k = mono.size(); k-- > 0;) {
      r = r * u;
      r.coef_[0] += mono[k];
    }
    return r;
  }

 private:
  std::vector<double> coef_;
};

}  // namespace polarmix
