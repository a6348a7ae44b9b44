// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "polarmix/parallel.hpp"
#include "polarmix/polarization.hpp"
#include "polarmix/quadrature.hpp"
#include "polarmix/rng.hpp"

namespace polarmix {

/// Sup over internal nodes (swept on a uniform grid) of the martingale
/// defect |(child1 + child0)/2 - parent|. Levels are streamed, so deep grid
/// runs stay in memory.
inline double martingale_residual(const RuntimeDistribution& base, int depth,
                                  const PolarizeOptions& opts = {},
                                  int sweep_points = 10000) {
  double a = base.support_lo(), b = base.support_hi();
  std::vector<AnyDist> level;
  if (opts.force_grid)
    level.emplace_back(GridDistribution::from(base, opts.grid_points));
  else
    level.emplace_back(base);
  double worst = 0.0;
  for (int k = 0; k < depth; ++k) {
    std::vector<AnyDist> next(2 * level.size(), AnyDist(GridDistribution()));
    std::vector<double> local(level.size(), 0.0);
    parallel_for(level.size(), [&](std::size_t i) {
      SplitResult r = split_cdf(level[i], opts);
      double w = 0.0;
      for (int s = 0; s < sweep_points; ++s) {
        double t = a + (b - a) * s / (sweep_points - 1);
        double avg = 0.5 * (cdf(r.max_child, t) + cdf(r.min_child, t));
        w = std::max(w, std::abs(avg - cdf(level[i], t)));
      }
      local[i] = w;
      next[2 * i + 1] = std::move(r.max_child);
      next[2 * i] = std::move(r.min_child);
    });
    for (double w : local) worst = std::max(worst, w);
    level = std::move(next);
  }
  return worst;
}

/// Fractions of depth-n indices with F_{n,i}(t*) above / at-or-below 1/2.
inline std::pair<double, double> polarization_fraction(
    const RuntimeDistribution& base, int depth, double t_star) {
  std::size_t N = std::size_t{1} << depth;
  double z = base.cdf(t_star);
  std::vector<std::uint8_t> high(N, 0);
  parallel_for(N, [&](std::size_t i) {
    high[i] =
        scalar_path(z, BitPath::from_index(i, depth).bits) > 0.5 ? 1 : 0;
  });
  double h = 0.0;
  for (auto v : high) h += v;
  return {h / static_cast<double>(N), 1.0 - h / static_cast<double>(N)};
}

/// Tail statistics of the increment norm ||F_{n+1} - F_n||_{L_beta}^beta.
struct DeltaTailResult {
  int depth = 0;
  double beta = 0.5;
  double rho = 0.375;
  double threshold = 0.0;        // rho^n
  double exceedance = 0.0;       // empirical P[ integral > threshold ]
  double standard_error = 0.0;
  double base_integral = 0.0;    // integral of (F(1-F))^beta dt, high accuracy
  double markov_bound = 0.0;     // (3/(4 rho))^(beta n) * base_integral
  double quoted_bound = 0.0;     // (4 rho/3)^(beta n) * base_integral
};

/// Monte-Carlo exceedance of the increment norm over random paths. The
/// increment satisfies |F_{n+1} - F_n| = F_n (1 - F_n) pointwise, so only
/// the depth-n state is needed; integrals use a fixed fine grid.
inline DeltaTailResult delta_norm_tail(const RuntimeDistribution& base,
                                       int depth, double beta, double rho,
                                       std::size_t paths,
                                       std::uint64_t seed,
                                       int grid_points = 8193) {
  detail::require(beta > 0.0 && beta <= 0.5,
                  "delta_norm_tail: beta must be in (0, 1/2]");
  detail::require(rho > 0.0 && rho < 1.0, "delta_norm_tail: rho in (0,1)");
  double a = base.support_lo(), b = base.support_hi();
  double h = (b - a) / (grid_points - 1);
  std::vector<double> z0(grid_points);
  for (int s = 0; s < grid_points; ++s) z0[s] = base.cdf(a + h * s);

  DeltaTailResult r;
  r.depth = depth;
  r.beta = beta;
  r.rho = rho;
  r.threshold = std::pow(rho, depth);
  r.base_integral = integrate(
      [&](double t) {
        double z = base.cdf(t);
        return std::pow(std::max(z * (1.0 - z), 0.0), beta);
      },
      a, b, 1e-12, 1e-15);
  r.markov_bound =
      std::pow(3.0 / (4.0 * rho), beta * depth) * r.base_integral;
  r.quoted_bound =
      std::pow(4.0 * rho / 3.0, beta * depth) * r.base_integral;

  std::vector<std::uint8_t> exceeded(paths, 0);
  parallel_for(paths, [&](std::size_t p) {
    RandomStream stream(seed, p);
    std::vector<double> z = z0;
    for (int k = 0; k < depth; ++k) {
      int bit = static_cast<int>(stream.next_u64() & 1);
      for (double& v : z) v = scalar_step(v, bit);
    }
    double integral = 0.0;
    for (int s = 0; s < grid_points; ++s) {
      double w = (s == 0 || s == grid_points - 1) ? 0.5 : 1.0;
      integral += w * std::pow(std::max(z[s] * (1.0 - z[s]), 0.0), beta);
    }
    integral *= h;
    exceeded[p] = integral > r.threshold ? 1 : 0;
  });
  double e = 0.0;
  for (auto v : exceeded) e += v;
  r.exceedance = e / static_cast<double>(paths);
  r.standard_error =
      std::sqrt(std::max(r.exceedance * (1.0 - r.exceedance), 1e-12) /
                static_cast<double>(paths));
  return r;
}

/// Two-sided KS distance between samples and a reference distribution,
/// evaluated with both one-sided limits so atoms are handled correctly.
inline double ks_statistic(std::vector<double> samples,
                           const RuntimeDistribution& ref) {
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double hi = ref.cdf(samples[i]);
    double lo = hi - ref.atom_mass_at(samples[i]);
    d = std::max(d, std::abs((i + 1) / n - hi));
    d = std::max(d, std::abs(i / n - lo));
  }
  return d;
}

/// Asymptotic Kolmogorov critical value at significance alpha.
inline double ks_critical(std::size_t n, double alpha = 0.01) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(
             static_cast<double>(n));
}

/// Dirac-location law check: for each random path, the location where F_n
/// crosses 1/2 (the approximate point-mass position); returns the KS
/// distance between the location sample and the base CDF.
struct LimitLocationResult {
  double ks = 0.0;
  double ks_critical_1pct = 0.0;
  std::vector<double> locations;
};

inline LimitLocationResult limit_location_test(const RuntimeDistribution& base,
                                               int depth, std::size_t paths,
                                               std::uint64_t seed) {
  LimitLocationResult res;
  res.locations.resize(paths);
  parallel_for(paths, [&](std::size_t p) {
    RandomStream stream(seed, p);
    std::vector<int> bits(depth);
    for (int& b : bits) b = static_cast<int>(stream.next_u64() & 1);
    // the crossing is monotone in the base CDF value, so locate it in
    // z-space and map through the quantile
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (scalar_path(mid, bits) < 0.5)
        lo = mid;
      else
        hi = mid;
    }
    res.locations[p] = base.quantile(0.5 * (lo + hi));
  });
  res.ks = ks_statistic(res.locations, base);
  res.ks_critical_1pct = ks_critical(paths, 0.01);
  return res;
}

/// Per-depth Monte-Carlo means of the squared L2 increment
/// ||F_{n+1} - F_n||^2 = integral of (F_n(1-F_n))^2 dt.
inline std::vector<double> l2_increment_series(const RuntimeDistribution& base,
                                               const std::vector<int>& depths,
                                               std::size_t paths,
                                               std::uint64_t seed,
                                               int grid_points = 8193) {
  detail::require(!depths.empty(), "l2_increment_series: no depths");
  int max_depth = *std::max_element(depths.begin(), depths.end());
  double a = base.support_lo(), b = base.support_hi();
  double h = (b - a) / (grid_points - 1);
  std::vector<double> z0(grid_points);
  for (int s = 0; s < grid_points; ++s) z0[s] = base.cdf(a + h * s);

  std::vector<std::vector<double>> per_path(paths);
  parallel_for(paths, [&](std::size_t p) {
    RandomStream stream(seed, p);
    std::vector<double> z = z0;
    std::vector<double> out(depths.size(), 0.0);
    for (int k = 0; k <= max_depth; ++k) {
      for (std::size_t di = 0; di < depths.size(); ++di) {
        if (depths[di] != k) continue;
        double integral = 0.0;
        for (int s = 0; s < grid_points; ++s) {
          double w = (s == 0 || s == grid_points - 1) ? 0.5 : 1.0;
          double d = z[s] * (1.0 - z[s]);
          integral += w * d * d;
        }
        out[di] = integral * h;
      }
      if (k == max_depth) break;
      int bit = static_cast<int>(stream.next_u64() & 1);
      for (double& v : z) v = scalar_step(v, bit);
    }
    per_path[p] = std::move(out);
  });
  std::vector<double> means(depths.size(), 0.0);
  for (const auto& v : per_path)
    for (std::size_t di = 0; di < depths.size(); ++di) means[di] += v[di];
  for (double& m : means) m /= static_cast<double>(paths);
  return means;
}

/// Scalar erasure-type process min(F_n, 1-F_n) at a fixed time.
struct MinFDecayResult {
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double envelope = 0.0;  // 2^(-2^((n - beta log2 n)(1/2 - eta)))
  std::vector<double> sorted_values;
};

inline MinFDecayResult min_f_decay(const RuntimeDistribution& base, int depth,
                                   std::size_t paths, std::uint64_t seed,
                                   double t_fixed =
                                       std::numeric_limits<double>::quiet_NaN(),
                                   double beta = 2.0, double eta = 0.1) {
  double t = std::isnan(t_fixed) ? base.quantile(0.5) : t_fixed;
  double z0 = base.cdf(t);
  MinFDecayResult res;
  res.sorted_values.resize(paths);
  parallel_for(paths, [&](std::size_t p) {
    RandomStream stream(seed, p);
    double z = z0;
    for (int k = 0; k < depth; ++k)
      z = scalar_step(z, static_cast<int>(stream.next_u64() & 1));
    res.sorted_values[p] = std::min(z, 1.0 - z);
  });
  std::sort(res.sorted_values.begin(), res.sorted_values.end());
  auto q = [&](double u) {
    std::size_t i = static_cast<std::size_t>(u * (paths - 1));
    return res.sorted_values[i];
  };
  res.p10 = q(0.10);
  res.p50 = q(0.50);
  res.p90 = q(0.90);
  double expo = (depth - beta * std::log2(std::max(2.0, double(depth)))) *
                (0.5 - eta);
  res.envelope = std::pow(2.0, -std::pow(2.0, expo));
  return res;
}

}  // namespace polarmix
