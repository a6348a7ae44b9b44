// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polarmix/cheb.hpp"
#include "polarmix/quadrature.hpp"
#include "polarmix/rng.hpp"

namespace polarmix {

inline constexpr double kCdfEndpointTol = 1e-12;
inline constexpr int kDefaultDegreeCap = 512;
inline constexpr int kDefaultGridPoints = 4096;

namespace detail {

inline void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

/// %.17g rendering used for every floating-point value we write to disk.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Point mass of a mixed distribution.
struct Atom {
  double location;
  double mass;
};

/// Runtime distribution with a piecewise-polynomial CDF plus point masses.
///
/// Segment j carries the *total* CDF (continuous part plus all atoms at or
/// left of the segment) as a Chebyshev series on the local coordinate
/// u = (t - t_j) / (t_{j+1} - t_j). The CDF is right-continuous; an atom at
/// breakpoint t_j is the jump between segment j-1's right limit and segment
/// j's left value.
class RuntimeDistribution {
 public:
  RuntimeDistribution() = default;

  /// breakpoints: M+1 ascending abscissae framing M segments.
  RuntimeDistribution(std::vector<double> breakpoints,
                      std::vector<ChebSeries> segments,
                      std::vector<Atom> atoms = {})
      : breakpoints_(std::move(breakpoints)),
        segments_(std::move(segments)),
        atoms_(std::move(atoms)) {
    validate();
  }

  static RuntimeDistribution uniform(double a, double b) {
    detail::require(a < b, "uniform: requires a < b");
    return RuntimeDistribution({a, b}, {ChebSeries::linear(0.0, 1.0)});
  }

  /// Truncated-renormalized exponential with the given mean, represented as
  /// 512 quartic segments on [0, mean*ln(1e9)] (truncated tail mass 1e-9).
  static RuntimeDistribution exponential(double mean) {
    detail::require(mean > 0.0, "exponential: mean must be positive");
    const int segs = 512, deg = 4;
    const double b = mean * std::log(1e9);
    const double norm = 1.0 - std::exp(-b / mean);
    std::vector<double> bp(segs + 1);
    std::vector<ChebSeries> ss;
    ss.reserve(segs);
    for (int j = 0; j <= segs; ++j) bp[j] = b * j / segs;
    for (int j = 0; j < segs; ++j) {
      double lo = bp[j], h = bp[j + 1] - bp[j];
      ss.push_back(ChebSeries::interpolate(
          [&](double u) {
            return (1.0 - std::exp(-(lo + h * u) / mean)) / norm;
          },
          deg));
    }
    // pin the endpoints exactly
    auto& first = ss.front();
    auto& last = ss.back();
    first = first - ChebSeries::constant(first(0.0));
    last = last + ChebSeries::constant(1.0 - last(1.0));
    return RuntimeDistribution(std::move(bp), std::move(ss));
  }

  static RuntimeDistribution dirac(double c) {
    return RuntimeDistribution({c}, {}, {{c, 1.0}});
  }

  /// Discrete distribution from atoms (ascending locations, masses sum to 1).
  static RuntimeDistribution from_atoms(std::vector<Atom> atoms) {
    detail::require(!atoms.empty(), "from_atoms: empty");
    if (atoms.size() == 1) return dirac(atoms[0].location);
    std::vector<double> bp;
    std::vector<ChebSeries> ss;
    double acc = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      bp.push_back(atoms[k].location);
      acc += atoms[k].mass;
      if (k + 1 < atoms.size()) ss.push_back(ChebSeries::constant(acc));
    }
    return RuntimeDistribution(std::move(bp), std::move(ss), std::move(atoms));
  }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<ChebSeries>& segments() const { return segments_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double support_lo() const { return breakpoints_.front(); }
  double support_hi() const { return breakpoints_.back(); }
  bool has_atoms() const { return !atoms_.empty(); }

  int max_degree() const {
    int d = 0;
    for (const auto& s : segments_) d = std::max(d, s.degree());
    return d;
  }

  /// F(t), right-continuous, 0 below and 1 above the support.
  double cdf(double t) const {
    if (std::isnan(t)) throw std::domain_error("cdf: NaN input");
    if (t < breakpoints_.front()) return 0.0;
    if (t >= breakpoints_.back()) return 1.0;
    std::size_t j = segment_index(t);
    double h = breakpoints_[j + 1] - breakpoints_[j];
    double u = (t - breakpoints_[j]) / h;
    return std::clamp(segments_[j](u), 0.0, 1.0);
  }

  /// Density dF/dt of the continuous part; errors at an atom location.
  double pdf(double t) const {
    if (std::isnan(t)) throw std::domain_error("pdf: NaN input");
    for (const auto& a : atoms_)
      if (t == a.location)
        throw std::domain_error("pdf: point mass at t, no density exists");
    if (segments_.empty() || t < breakpoints_.front() ||
        t > breakpoints_.back())
      return 0.0;
    std::size_t j = segment_index(t);
    double h = breakpoints_[j + 1] - breakpoints_[j];
    double u = (t - breakpoints_[j]) / h;
    return segments_[j].derivative()(u) / h;
  }

  /// Left-continuous generalized inverse: smallest t with F(t) >= u.
  double quantile(double u) const {
    if (std::isnan(u) || u < 0.0 || u > 1.0)
      throw std::domain_error("quantile: u outside [0,1]");
    if (u <= cdf(breakpoints_.front())) return breakpoints_.front();
    for (std::size_t j = 0; j < segments_.size(); ++j) {
      double right = segments_[j](1.0);
      if (right >= u) {
        if (segments_[j](0.0) >= u) return breakpoints_[j];
        return invert_on_segment(j, u);
      }
      // atom at the next breakpoint may carry F across u
      if (cdf(breakpoints_[j + 1]) >= u) return breakpoints_[j + 1];
    }
    return breakpoints_.back();
  }

  /// Inverse-transform sample.
  double sample(RandomStream& stream) const {
    return quantile(stream.next_double());
  }

  /// Exact mean: per-segment integration by parts plus atom contributions.
  double mean() const {
    double m = 0.0;
    for (std::size_t j = 0; j < segments_.size(); ++j) {
      const auto& s = segments_[j];
      double a = breakpoints_[j], h = breakpoints_[j + 1] - a;
      m += a * (s(1.0) - s(0.0)) + h * (s(1.0) - s.integral());
    }
    for (const auto& at : atoms_) m += at.location * at.mass;
    return m;
  }

  /// M(lambda) = integral of e^{lambda t} dF; exactly 1 at lambda = 0.
  double laplace_transform(double lambda) const {
    if (lambda == 0.0) return 1.0;
    double m = 0.0;
    for (std::size_t j = 0; j < segments_.size(); ++j) {
      double a = breakpoints_[j], h = breakpoints_[j + 1] - a;
      ChebSeries dens = segments_[j].derivative();
      m += integrate(
          [&](double u) { return std::exp(lambda * (a + h * u)) * dens(u); },
          0.0, 1.0, 1e-13, 1e-16);
    }
    for (const auto& at : atoms_) m += at.mass * std::exp(lambda * at.location);
    if (!std::isfinite(m))
      throw std::domain_error("laplace_transform: divergent integral");
    return m;
  }

  /// Structural invariants; throws std::invalid_argument on violation.
  void validate() const {
    detail::require(!breakpoints_.empty(), "distribution: no breakpoints");
    for (double t : breakpoints_)
      detail::require(std::isfinite(t),
                      "distribution: breakpoints must be finite");
    for (std::size_t j = 1; j < breakpoints_.size(); ++j)
      detail::require(breakpoints_[j] > breakpoints_[j - 1],
                      "distribution: breakpoints must be strictly increasing");
    detail::require(segments_.size() + 1 == breakpoints_.size() ||
                        (segments_.empty() && breakpoints_.size() == 1),
                    "distribution: segment count must be breakpoints-1");
    double atot = 0.0;
    for (const auto& a : atoms_) {
      detail::require(a.mass > 0.0 && a.mass <= 1.0 + kCdfEndpointTol,
                      "distribution: atom mass outside (0,1]");
      atot += a.mass;
    }
    detail::require(atot <= 1.0 + kCdfEndpointTol,
                    "distribution: atom masses exceed 1");
    if (segments_.empty()) {
      // degenerate support {a}: all mass sits in atoms at a
      detail::require(std::abs(atot - 1.0) <= kCdfEndpointTol,
                      "distribution: point support needs total atom mass 1");
      return;
    }
    detail::require(
        std::abs(segments_.front()(0.0) - atom_mass_at(breakpoints_.front())) <
            1e-9,
        "distribution: F(a) must equal the atom mass at a");
    detail::require(std::abs(segments_.back()(1.0) +
                             atom_mass_at(breakpoints_.back()) - 1.0) < 1e-9,
                    "distribution: F(b) must reach 1");
    for (std::size_t j = 1; j < segments_.size(); ++j) {
      double jump = segments_[j](0.0) - segments_[j - 1](1.0);
      detail::require(jump > -1e-9, "distribution: CDF decreases at a join");
      detail::require(std::abs(jump - atom_mass_at(breakpoints_[j])) < 1e-9,
                      "distribution: join jump must match the listed atom");
    }
  }

  double atom_mass_at(double loc) const {
    for (const auto& a : atoms_)
      if (a.location == loc) return a.mass;
    return 0.0;
  }

 private:
  std::size_t segment_index(double t) const {
    auto it =
        std::upper_bound(breakpoints_.begin(), breakpoints_.end() - 1, t);
    std::size_t j = static_cast<std::size_t>(it - breakpoints_.begin());
    return j == 0 ? 0 : j - 1;
  }

  /// Leftmost u* in the segment with S(u*) >= target, mapped back to t.
  double invert_on_segment(std::size_t j, double target) const {
    const auto& s = segments_[j];
    double lo = 0.0, hi = 1.0;
    if (s.degree() == 1) {
      // linear segment: c0 + c1 (2u - 1)
      double c1 = s.coef()[1];
      if (c1 > 0.0)
        hi = std::clamp(0.5 * ((target - s.coef()[0]) / c1 + 1.0), 0.0, 1.0);
    } else {
      for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
        double mid = 0.5 * (lo + hi);
        if (s(mid) >= target)
          hi = mid;
        else
          lo = mid;
      }
    }
    return breakpoints_[j] + (breakpoints_[j + 1] - breakpoints_[j]) * hi;
  }

  std::vector<double> breakpoints_;
  std::vector<ChebSeries> segments_;
  std::vector<Atom> atoms_;
};

/// Dense monotone CDF on a uniform grid; the fallback representation once
/// piecewise-polynomial degrees exceed the cap.
class GridDistribution {
 public:
  GridDistribution() = default;
  GridDistribution(double a, double b, std::vector<double> values)
      : a_(a), b_(b), values_(std::move(values)) {
    detail::require(values_.size() >= 2, "grid: needs at least 2 points");
    detail::require(a_ < b_, "grid: needs a < b");
  }

  static GridDistribution from(const RuntimeDistribution& d,
                               int points = kDefaultGridPoints) {
    double a = d.support_lo(), b = d.support_hi();
    if (a == b) {  // point support
      a -= 0.5;
      b += 0.5;
    }
    if (d.cdf(a) > 0.0) a -= (b - a) / points;  // keep first value at 0
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i)
      v[i] = d.cdf(a + (b - a) * i / (points - 1));
    v.front() = 0.0;
    v.back() = 1.0;
    return GridDistribution(a, b, std::move(v));
  }

  double support_lo() const { return a_; }
  double support_hi() const { return b_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  double cdf(double t) const {
    if (std::isnan(t)) throw std::domain_error("cdf: NaN input");
    if (t <= a_) return t < a_ ? 0.0 : values_.front();
    if (t >= b_) return 1.0;
    double x = (t - a_) / (b_ - a_) * (values_.size() - 1);
    std::size_t i = static_cast<std::size_t>(x);
    if (i + 1 >= values_.size()) i = values_.size() - 2;
    double w = x - i;
    return values_[i] + w * (values_[i + 1] - values_[i]);
  }

  double pdf(double t) const {
    if (t < a_ || t > b_) return 0.0;
    double x = (t - a_) / (b_ - a_) * (values_.size() - 1);
    std::size_t i = static_cast<std::size_t>(x);
    if (i + 1 >= values_.size()) i = values_.size() - 2;
    double h = (b_ - a_) / (values_.size() - 1);
    return (values_[i + 1] - values_[i]) / h;
  }

  double quantile(double u) const {
    if (std::isnan(u) || u < 0.0 || u > 1.0)
      throw std::domain_error("quantile: u outside [0,1]");
    auto it = std::lower_bound(values_.begin(), values_.end(), u);
    if (it == values_.begin()) return a_;
    if (it == values_.end()) return b_;
    std::size_t i = static_cast<std::size_t>(it - values_.begin());
    double h = (b_ - a_) / (values_.size() - 1);
    double f0 = values_[i - 1], f1 = values_[i];
    double w = (f1 > f0) ? (u - f0) / (f1 - f0) : 0.0;
    return a_ + h * (i - 1 + w);
  }

  double sample(RandomStream& stream) const {
    return quantile(stream.next_double());
  }

  double mean() const {
    // b - integral of F over [a,b], trapezoid on the grid
    double h = (b_ - a_) / (values_.size() - 1);
    double s = 0.5 * (values_.front() + values_.back());
    for (std::size_t i = 1; i + 1 < values_.size(); ++i) s += values_[i];
    return b_ - h * s;
  }

  double laplace_transform(double lambda) const {
    if (lambda == 0.0) return 1.0;
    // piecewise-linear CDF => piecewise-constant density, cell-exact integral
    double h = (b_ - a_) / (values_.size() - 1);
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
      double df = values_[i + 1] - values_[i];
      if (df == 0.0) continue;
      double t0 = a_ + h * i;
      m += df * (std::exp(lambda * (t0 + h)) - std::exp(lambda * t0)) /
           (lambda * h);
    }
    if (!std::isfinite(m))
      throw std::domain_error("laplace_transform: divergent integral");
    return m;
  }

  void validate() const {
    for (std::size_t i = 1; i < values_.size(); ++i)
      detail::require(values_[i] + 1e-12 >= values_[i - 1],
                      "grid: values must be non-decreasing");
    detail::require(std::abs(values_.front()) <= kCdfEndpointTol &&
                        std::abs(values_.back() - 1.0) <= kCdfEndpointTol,
                    "grid: endpoint values must be 0 and 1");
  }

 private:
  double a_ = 0.0, b_ = 1.0;
  std::vector<double> values_;
};

/// Step CDF of observed runtimes: jumps of 1/n at each sorted sample.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> samples)
      : sorted_(std::move(samples)) {
    detail::require(!sorted_.empty(), "empirical: no samples");
    for (double v : sorted_)
      detail::require(std::isfinite(v), "empirical: non-finite sample");
    std::sort(sorted_.begin(), sorted_.end());
  }

  const std::vector<double>& sorted_samples() const { return sorted_; }

  double cdf(double t) const {
    if (std::isnan(t)) throw std::domain_error("cdf: NaN input");
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
    return static_cast<double>(it - sorted_.begin()) / sorted_.size();
  }

  double quantile(double u) const {
    if (std::isnan(u) || u < 0.0 || u > 1.0)
      throw std::domain_error("quantile: u outside [0,1]");
    if (u == 0.0) return sorted_.front();
    std::size_t k = static_cast<std::size_t>(std::ceil(u * sorted_.size()));
    if (k == 0) k = 1;
    if (k > sorted_.size()) k = sorted_.size();
    return sorted_[k - 1];
  }

  double sample(RandomStream& stream) const {
    return quantile(stream.next_double());
  }

  double mean() const {
    double s = 0.0;
    for (double v : sorted_) s += v;
    return s / sorted_.size();
  }

  /// Mixed-representation view: one atom of mass 1/n per sample.
  RuntimeDistribution to_runtime() const {
    std::vector<Atom> atoms;
    double unit = 1.0 / sorted_.size();
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
      if (!atoms.empty() && atoms.back().location == sorted_[i])
        atoms.back().mass += unit;
      else
        atoms.push_back({sorted_[i], unit});
    }
    return RuntimeDistribution::from_atoms(std::move(atoms));
  }

 private:
  std::vector<double> sorted_;
};

inline EmpiricalDistribution from_samples(std::vector<double> samples) {
  return EmpiricalDistribution(std::move(samples));
}

/// L_p distance between two CDFs on their joint support: for p >= 1 the norm
/// (integral of |F-G|^p)^(1/p); for p < 1 the raw integral (the L_beta^beta
/// quantity of the convergence-rate analysis).
template <typename DistF, typename DistG>
double lp_distance(const DistF& F, const DistG& G, double p) {
  detail::require(p > 0.0, "lp_distance: p must be positive");
  double a = std::min(F.support_lo(), G.support_lo());
  double b = std::max(F.support_hi(), G.support_hi());
  detail::require(std::isfinite(a) && std::isfinite(b),
                  "lp_distance: unbounded support");
  if (a == b) return 0.0;
  double raw = integrate(
      [&](double t) { return std::pow(std::abs(F.cdf(t) - G.cdf(t)), p); }, a,
      b, 1e-9, 1e-15);
  return p >= 1.0 ? std::pow(raw, 1.0 / p) : raw;
}

// --- JSON serialization -----------------------------------------------------
// {"support":[a,b],"breakpoints":[...],"segments":[[c0,...],...],
//  "atoms":[[loc,mass],...]}  with doubles rendered at 17 significant digits.
// Segment arrays are Chebyshev coefficients of the total CDF on the local
// [0,1] coordinate of each interval.

inline std::string to_json(const RuntimeDistribution& d) {
  using detail::fmt17;
  std::string s = "{\"support\":[" + fmt17(d.support_lo()) + "," +
                  fmt17(d.support_hi()) + "],\"breakpoints\":[";
  for (std::size_t j = 0; j < d.breakpoints().size(); ++j) {
    if (j) s += ",";
    s += fmt17(d.breakpoints()[j]);
  }
  s += "],\"segments\":[";
  for (std::size_t j = 0; j < d.segments().size(); ++j) {
    if (j) s += ",";
    s += "[";
    const auto& c = d.segments()[j].coef();
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k) s += ",";
      s += fmt17(c[k]);
    }
    s += "]";
  }
  s += "],\"atoms\":[";
  for (std::size_t k = 0; k < d.atoms().size(); ++k) {
    if (k) s += ",";
    s += "[" + fmt17(d.atoms()[k].location) + "," + fmt17(d.atoms()[k].mass) +
         "]";
  }
  s += "]}";
  return s;
}

}  // namespace polarmix
