// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "polarmix/codec.hpp"
#include "polarmix/parallel.hpp"
#include "polarmix/polarization.hpp"

namespace polarmix {

enum class FreezeRule { kQuantile, kLaplace };

inline const char* to_string(FreezeRule r) {
  return r == FreezeRule::kQuantile ? "quantile" : "laplace";
}

/// Bit-indexed partition of the 2^n virtual workers into data and frozen
/// sets, with the per-index rule scores that produced it.
struct FrozenSet {
  int depth = 0;
  FreezeRule rule = FreezeRule::kQuantile;
  double rule_param = 0.0;            // t* for quantile, lambda for laplace
  std::vector<std::size_t> frozen;    // ascending path indices
  std::vector<std::size_t> data;      // ascending path indices
  std::vector<double> scores;         // per path index, size 2^n
  bool rate_floored = false;          // K = floor(R*2^n) was not integral

  std::size_t workers() const { return std::size_t{1} << depth; }
  std::size_t data_count() const { return data.size(); }
  double rate() const {
    return static_cast<double>(data.size()) / workers();
  }

  std::vector<std::uint8_t> frozen_mask() const {
    std::vector<std::uint8_t> m(workers(), 0);
    for (std::size_t i : frozen) m[i] = 1;
    return m;
  }

  CodeConfig code_config() const {
    CodeConfig c;
    c.workers = workers();
    c.data_blocks = data.size();
    c.frozen = frozen_mask();
    return c;
  }
};

namespace detail {

inline std::size_t data_count_for_rate(double rate, std::size_t N,
                                       bool* floored) {
  require(rate > 0.0 && rate < 1.0, "freeze: rate must be inside (0,1)");
  double kf = rate * static_cast<double>(N);
  double rounded = std::nearbyint(kf);
  if (std::abs(kf - rounded) < 1e-9) {
    *floored = false;
    return static_cast<std::size_t>(rounded);
  }
  *floored = true;
  return static_cast<std::size_t>(std::floor(kf));
}

/// Split path indices into (data, frozen): data gets the K best scores.
/// Ties break toward the smaller index for determinism.
inline void select_by_score(FrozenSet& fs, std::size_t K, bool larger_wins) {
  std::size_t N = fs.scores.size();
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (fs.scores[a] != fs.scores[b])
                       return larger_wins ? fs.scores[a] > fs.scores[b]
                                          : fs.scores[a] < fs.scores[b];
                     return a < b;
                   });
  fs.data.assign(order.begin(), order.begin() + K);
  fs.frozen.assign(order.begin() + K, order.end());
  std::sort(fs.data.begin(), fs.data.end());
  std::sort(fs.frozen.begin(), fs.frozen.end());
}

}  // namespace detail

/// Quantile rule at t* = F^{-1}(R): keep as data the K indices whose
/// polarized CDF value at t* is largest, i.e. the virtual workers most
/// likely to have finished by the target quantile.
inline FrozenSet quantile_freeze(const RuntimeDistribution& base, int depth,
                                 double rate) {
  detail::require(depth >= 0 && depth <= 24, "quantile_freeze: bad depth");
  FrozenSet fs;
  fs.depth = depth;
  fs.rule = FreezeRule::kQuantile;
  std::size_t N = std::size_t{1} << depth;
  std::size_t K = detail::data_count_for_rate(rate, N, &fs.rate_floored);
  detail::require(K >= 1, "quantile_freeze: rate leaves no data blocks");
  double tstar = base.quantile(rate);
  fs.rule_param = tstar;
  double z = base.cdf(tstar);
  fs.scores.resize(N);
  parallel_for(N, [&](std::size_t i) {
    fs.scores[i] =
        scalar_path(z, BitPath::from_index(i, depth).bits);
  });
  detail::select_by_score(fs, K, /*larger_wins=*/true);
  return fs;
}

/// Laplace-transform rule: keep as data the K indices with the smallest
/// exponential moment M_{n,i}(lambda). The usual parameter choice is
/// lambda = log(N R) / epsilon for a target slack epsilon.
inline FrozenSet laplace_freeze(const RuntimeDistribution& base, int depth,
                                double rate, double lambda,
                                const PolarizeOptions& opts = {}) {
  detail::require(depth >= 0 && depth <= 14, "laplace_freeze: bad depth");
  detail::require(lambda > 0.0 && std::isfinite(lambda),
                  "laplace_freeze: lambda must be positive finite");
  FrozenSet fs;
  fs.depth = depth;
  fs.rule = FreezeRule::kLaplace;
  fs.rule_param = lambda;
  std::size_t N = std::size_t{1} << depth;
  std::size_t K = detail::data_count_for_rate(rate, N, &fs.rate_floored);
  detail::require(K >= 1, "laplace_freeze: rate leaves no data blocks");
  PolarFamily fam = polarize(base, depth, opts);
  fs.scores.resize(N);
  parallel_for(N, [&](std::size_t i) {
    fs.scores[i] = laplace_transform(fam.members[i], lambda);
  });
  detail::select_by_score(fs, K, /*larger_wins=*/false);
  return fs;
}

inline double default_laplace_lambda(std::size_t N, double rate,
                                     double epsilon) {
  detail::require(epsilon > 0.0, "lambda: epsilon must be positive");
  return std::log(static_cast<double>(N) * rate) / epsilon;
}

/// Union bound on decoding failure by deadline t: sum of survival
/// probabilities of the data-path runtimes, clipped to [0,1].
inline double failure_bound(const RuntimeDistribution& base,
                            const FrozenSet& fs, double t) {
  double z = base.cdf(t);
  double s = 0.0;
  for (std::size_t i : fs.data)
    s += 1.0 - scalar_path(z, BitPath::from_index(i, fs.depth).bits);
  return std::clamp(s, 0.0, 1.0);
}

// --- JSON serialization ------------------------------------------------------
// {"n":..,"rule":"quantile"|"laplace","param":..,"frozen":[..],"scores":[..]}

inline std::string to_json(const FrozenSet& fs) {
  using detail::fmt17;
  std::string s = "{\"n\":" + std::to_string(fs.depth) + ",\"rule\":\"" +
                  to_string(fs.rule) + "\",\"param\":" + fmt17(fs.rule_param) +
                  ",\"frozen\":[";
  for (std::size_t k = 0; k < fs.frozen.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(fs.frozen[k]);
  }
  s += "],\"scores\":[";
  for (std::size_t k = 0; k < fs.scores.size(); ++k) {
    if (k) s += ",";
    s += fmt17(fs.scores[k]);
  }
  s += "]}";
  return s;
}

}  // namespace polarmix
