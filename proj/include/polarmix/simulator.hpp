// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polarmix/codec.hpp"
#include "polarmix/freezing.hpp"
#include "polarmix/parallel.hpp"
#include "polarmix/rng.hpp"

namespace polarmix {

enum class Scheme { kUncoded, kRepetition, kMds, kPolar };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::kUncoded: return "uncoded";
    case Scheme::kRepetition: return "repetition";
    case Scheme::kMds: return "mds";
    default: return "polar";
  }
}

namespace detail {

/// log(C(n,k)) via lgamma; keeps binomial tails finite up to N ~ 1e4.
inline double log_binom(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace detail

/// Closed-form runtime CDF of the classical schemes at time t:
/// uncoded F^N, repetition (1-(1-F)^{N/K})^K, MDS the K-th order statistic.
inline double scheme_cdf(Scheme scheme, const RuntimeDistribution& base,
                         std::size_t N, std::size_t K, double t) {
  detail::require(K >= 1 && K <= N, "scheme_cdf: K must be in [1,N]");
  double F = base.cdf(t);
  switch (scheme) {
    case Scheme::kUncoded:
      return std::pow(F, static_cast<double>(N));
    case Scheme::kRepetition: {
      detail::require(N % K == 0, "scheme_cdf: repetition needs K | N");
      double g = static_cast<double>(N) / static_cast<double>(K);
      return std::pow(1.0 - std::pow(1.0 - F, g), static_cast<double>(K));
    }
    case Scheme::kMds: {
      if (F <= 0.0) return 0.0;
      if (F >= 1.0) return 1.0;
      // log-space accumulation of sum_{j=K}^{N} C(N,j) F^j (1-F)^(N-j)
      double lf = std::log(F), lg = std::log1p(-F);
      double sum = 0.0, mx = -std::numeric_limits<double>::infinity();
      std::vector<double> terms;
      terms.reserve(N - K + 1);
      for (std::size_t j = K; j <= N; ++j) {
        double lt = detail::log_binom(static_cast<double>(N),
                                      static_cast<double>(j)) +
                    static_cast<double>(j) * lf +
                    static_cast<double>(N - j) * lg;
        terms.push_back(lt);
        mx = std::max(mx, lt);
      }
      for (double lt : terms) sum += std::exp(lt - mx);
      return std::min(1.0, std::exp(mx) * sum);
    }
    default:
      throw std::invalid_argument("scheme_cdf: no closed form for polar");
  }
}

/// Normal approximation of the MDS runtime: the K-th order statistic tends
/// to N(F^{-1}(R), R(1-R) / (N p(F^{-1}(R))^2)).
inline std::pair<double, double> mds_normal_approx(
    const RuntimeDistribution& base, std::size_t N, double rate) {
  detail::require(rate > 0.0 && rate < 1.0, "mds_normal_approx: rate");
  double q = base.quantile(rate);
  double dens = base.pdf(q);
  if (dens <= 0.0)
    throw std::domain_error("mds_normal_approx: zero density at the quantile");
  double var = rate * (1.0 - rate) / (static_cast<double>(N) * dens * dens);
  return {q, var};
}

/// Information-theoretic floor: any rate-R scheme has
/// P[T_D >= F^{-1}(R(1-beta))] >= beta - 1/(N R).
inline double info_lower_bound(std::size_t N, double rate, double beta) {
  detail::require(beta > 0.0 && beta < 1.0, "info_lower_bound: beta");
  return std::max(0.0, beta - 1.0 / (static_cast<double>(N) * rate));
}

/// One Monte-Carlo draw: shared runtime vector and per-scheme decode times.
struct TrialRecord {
  std::uint64_t trial = 0;
  std::vector<double> runtimes;
  double uncoded = 0.0;
  double repetition = 0.0;
  double mds = 0.0;
  double polar = 0.0;
};

struct SchemeSummary {
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double fail_at_deadline = 0.0;
};

/// Seeded comparison run; bit-exact reproducible from (config, seed).
struct ComparisonReport {
  std::size_t workers = 0;
  std::size_t data_blocks = 0;
  double rate = 0.0;
  double deadline = 0.0;
  std::uint64_t master_seed = 0;
  std::size_t trials = 0;
  std::map<std::string, SchemeSummary> summary;
  std::vector<TrialRecord> records;
};

namespace detail {

inline double kth_smallest(std::vector<double> v, std::size_t k) {
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
  return v[k - 1];
}

inline SchemeSummary summarize(std::vector<double> times, double deadline) {
  SchemeSummary s;
  std::size_t n = times.size();
  for (double t : times) {
    s.mean += t;
    if (t > deadline) s.fail_at_deadline += 1.0;
  }
  s.mean /= static_cast<double>(n);
  s.fail_at_deadline /= static_cast<double>(n);
  std::sort(times.begin(), times.end());
  s.p50 = times[(n - 1) / 2];
  s.p95 = times[std::min(n - 1, static_cast<std::size_t>(0.95 * (n - 1)))];
  return s;
}

}  // namespace detail

/// Run `trials` comparisons with common random numbers: one shared runtime
/// vector per trial drives all four schemes. Repetition replicates the K
/// tasks over contiguous blocks of N/K workers (max over blocks of the
/// within-block min). Trials are keyed by id, so any thread count yields
/// bitwise-identical output.
inline ComparisonReport run_comparison(const RuntimeDistribution& base,
                                       const FrozenSet& fs,
                                       std::size_t trials,
                                       std::uint64_t master_seed,
                                       double deadline) {
  detail::require(trials >= 1, "run_comparison: trials must be >= 1");
  std::size_t N = fs.workers();
  std::size_t K = fs.data_count();
  detail::require(N % K == 0,
                  "run_comparison: repetition baseline needs K | N");
  auto frozen = fs.frozen_mask();

  ComparisonReport rep;
  rep.workers = N;
  rep.data_blocks = K;
  rep.rate = fs.rate();
  rep.deadline = deadline;
  rep.master_seed = master_seed;
  rep.trials = trials;
  rep.records.resize(trials);

  std::size_t group = N / K;
  parallel_for(trials, [&](std::size_t t) {
    RandomStream stream(master_seed, t);
    TrialRecord& r = rep.records[t];
    r.trial = t;
    r.runtimes.resize(N);
    for (double& v : r.runtimes) v = base.sample(stream);
    r.uncoded = *std::max_element(r.runtimes.begin(), r.runtimes.end());
    r.mds = detail::kth_smallest(r.runtimes, K);
    r.polar = decode_time(r.runtimes, frozen);
    double rep_time = 0.0;
    for (std::size_t b = 0; b < K; ++b) {
      double blk = r.runtimes[b * group];
      for (std::size_t j = 1; j < group; ++j)
        blk = std::min(blk, r.runtimes[b * group + j]);
      rep_time = std::max(rep_time, blk);
    }
    r.repetition = rep_time;
  });

  std::vector<double> u(trials), g(trials), m(trials), p(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    u[t] = rep.records[t].uncoded;
    g[t] = rep.records[t].repetition;
    m[t] = rep.records[t].mds;
    p[t] = rep.records[t].polar;
  }
  rep.summary["uncoded"] = detail::summarize(std::move(u), deadline);
  rep.summary["repetition"] = detail::summarize(std::move(g), deadline);
  rep.summary["mds"] = detail::summarize(std::move(m), deadline);
  rep.summary["polar"] = detail::summarize(std::move(p), deadline);
  return rep;
}

/// Empirical decoding-failure probability at a deadline under the quantile
/// rule, with its binomial standard error.
struct FailureEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
};

inline FailureEstimate empirical_failure_prob(const RuntimeDistribution& base,
                                              int depth, double rate,
                                              double deadline,
                                              std::size_t trials,
                                              std::uint64_t master_seed) {
  detail::require(trials >= 1, "empirical_failure_prob: trials");
  FrozenSet fs = quantile_freeze(base, depth, rate);
  auto frozen = fs.frozen_mask();
  std::size_t N = fs.workers();
  std::vector<std::uint8_t> fails(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    RandomStream stream(master_seed, t);
    std::vector<double> times(N);
    for (double& v : times) v = base.sample(stream);
    fails[t] = decode_time(times, frozen) > deadline ? 1 : 0;
  });
  double f = 0.0;
  for (auto b : fails) f += b;
  FailureEstimate e;
  e.trials = trials;
  e.probability = f / static_cast<double>(trials);
  e.standard_error = std::sqrt(
      std::max(e.probability * (1.0 - e.probability), 1e-12) /
      static_cast<double>(trials));
  return e;
}

}  // namespace polarmix
