// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: 13 numbered criteria, one pass/fail line each.
// Usage: polarmix_acceptance [--criterion K]
// Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "polarmix/io.hpp"
#include "polarmix/polarmix.hpp"

namespace fs = std::filesystem;
using namespace polarmix;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

const RuntimeDistribution kUniform = RuntimeDistribution::uniform(0, 1);

// ---------------------------------------------------------------- criterion 1
// Depth-2 uniform leaf densities equal 4t^3, 4t(1-t)(1+t), 4t(1-t)(2-t),
// 4(1-t)^3 with coefficient error < 1e-12.
Check criterion_1() {
  Check c;
  PolarFamily fam = polarize(kUniform, 2);
  const std::vector<std::pair<std::string, std::vector<double>>> expected = {
      {"11", {0, 0, 0, 4}},
      {"10", {0, 4, 0, -4}},
      {"01", {0, 8, -12, 4}},
      {"00", {4, -12, 12, -4}},
  };
  for (const auto& [path, coefs] : expected) {
    BitPath p;
    for (char ch : path) p.bits.push_back(ch - '0');
    const auto& leaf = std::get<RuntimeDistribution>(fam.member(p));
    auto mono = leaf.segments().front().derivative().monomial_coefficients();
    mono.resize(std::max(mono.size(), coefs.size()), 0.0);
    double err = 0.0;
    for (std::size_t k = 0; k < mono.size(); ++k)
      err = std::max(err,
                     std::abs(mono[k] - (k < coefs.size() ? coefs[k] : 0.0)));
    c.expect(err < 1e-12,
             "path " + path + " coefficient error " + fmt(err));
  }
  return c;
}

// ---------------------------------------------------------------- criterion 2
// Martingale conservation: sup residual < 1e-10 at depth 5 (exact) and
// < 1e-4 at depth 12 (grid), uniform and exponential bases.
Check criterion_2() {
  Check c;
  for (const auto& [name, base] :
       {std::pair<std::string, RuntimeDistribution>{"uniform", kUniform},
        {"exponential", RuntimeDistribution::exponential(1.0)}}) {
    double exact = martingale_residual(base, 5, {}, 2000);
    c.expect(exact < 1e-10,
             name + " exact depth-5 residual " + fmt(exact));
    PolarizeOptions grid;
    grid.force_grid = true;
    double coarse = martingale_residual(base, 12, grid, 2000);
    c.expect(coarse < 1e-4,
             name + " grid depth-12 residual " + fmt(coarse));
    c.note(name + ": exact " + fmt(exact) + ", grid " + fmt(coarse));
  }
  return c;
}

// ---------------------------------------------------------------- criterion 3
// Codec roundtrip for N in {2..32} under f(A) = A*B with max relative error
// < 1e-9; decode_time equals event-driven readiness exactly on 1000 vectors.
Check criterion_3() {
  Check c;
  RandomStream rs(1003);
  for (std::size_t N : {2u, 4u, 8u, 16u, 32u}) {
    CodeConfig cfg;
    cfg.workers = N;
    cfg.data_blocks = N - N / 4;
    cfg.frozen.assign(N, 0);
    for (std::size_t i = 0; i < N / 4; ++i) cfg.frozen[N - 1 - i] = 1;
    if (N == 2) {
      cfg.data_blocks = 1;
      cfg.frozen = {0, 1};
    }
    std::vector<TaskMatrix> blocks(N);
    for (std::size_t pos = 0; pos < N; ++pos)
      blocks[pos] = cfg.frozen[path_of_position(pos, N)]
                        ? TaskMatrix(3, 2)
                        : TaskMatrix::random(3, 2, rs);
    TaskMatrix B = TaskMatrix::random(2, 3, rs);
    auto coded = encode(blocks, cfg);
    std::vector<WorkerReturn> rets(N);
    for (std::size_t w = 0; w < N; ++w)
      rets[w] = {w, coded[w].matmul(B), 1.0};
    auto out = sc_decode(rets, cfg);
    double worst = 0.0;
    for (std::size_t path = 0; path < N; ++path) {
      if (cfg.frozen[path]) continue;
      TaskMatrix direct = blocks[position_of_path(path, N)].matmul(B);
      worst = std::max(worst, out.blocks[path]->max_abs_diff(direct) /
                                   std::max(1.0, direct.max_abs()));
    }
    c.expect(worst < 1e-9, "N=" + std::to_string(N) + " roundtrip err " +
                               fmt(worst));
  }

  // event-driven readiness oracle at N=8, quantile-rule frozen set
  FrozenSet fsn = quantile_freeze(kUniform, 3, 0.5);
  CodeConfig cfg = fsn.code_config();
  std::size_t N = cfg.workers;
  std::vector<TaskMatrix> blocks(N);
  for (std::size_t pos = 0; pos < N; ++pos)
    blocks[pos] = cfg.frozen[path_of_position(pos, N)]
                      ? TaskMatrix(1, 1)
                      : TaskMatrix::random(1, 1, rs);
  auto coded = encode(blocks, cfg);
  int mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    RandomStream s(7000, rep);
    std::vector<double> t(N);
    for (double& v : t) v = kUniform.sample(s);
    double td = decode_time(t, cfg.frozen);
    std::vector<double> sorted = t;
    std::sort(sorted.begin(), sorted.end());
    double ready = std::numeric_limits<double>::infinity();
    for (double cut : sorted) {
      std::vector<WorkerReturn> rets(N);
      for (std::size_t w = 0; w < N; ++w)
        rets[w] = t[w] <= cut
                      ? WorkerReturn{w, coded[w], t[w]}
                      : WorkerReturn{w, std::nullopt,
                                     std::numeric_limits<double>::infinity()};
      try {
        sc_decode(rets, cfg);
        ready = cut;
        break;
      } catch (const UndecodableError&) {
      }
    }
    if (td != ready) ++mismatches;
  }
  c.expect(mismatches == 0,
           "event-driven mismatches " + std::to_string(mismatches) + "/1000");
  return c;
}

// ---------------------------------------------------------------- criterion 4
// Dominance T_mds <= T_polar <= T_uncoded in every one of 10^4 trials,
// Uniform[20,100], N=64, R=0.625.
Check criterion_4() {
  Check c;
  auto base = RuntimeDistribution::uniform(20, 100);
  FrozenSet fsn = quantile_freeze(base, 6, 0.625);
  ComparisonReport rep = run_comparison(base, fsn, 10000, 64, 80.0);
  int violations = 0;
  for (const auto& r : rep.records)
    if (!(r.mds <= r.polar && r.polar <= r.uncoded)) ++violations;
  c.expect(violations == 0,
           std::to_string(violations) + " dominance violations");
  c.note("mean mds " + fmt(rep.summary.at("mds").mean) + ", polar " +
         fmt(rep.summary.at("polar").mean) + ", uncoded " +
         fmt(rep.summary.at("uncoded").mean));
  return c;
}

// ---------------------------------------------------------------- criterion 5
// Failure-probability decay, uniform base, R=1/2, deadline 0.65, 10^4 trials
// per depth: non-increasing over n in {2..8} up to 2 MC standard errors and
// < 0.01 at n=8.
Check criterion_5() {
  Check c;
  double prev = 1.0, prev_se = 0.0;
  std::string series;
  double last = 1.0;
  for (int n = 2; n <= 8; ++n) {
    auto est = empirical_failure_prob(kUniform, n, 0.5, 0.65, 10000,
                                      50000 + n);
    series += (series.empty() ? "" : " ") + fmt(est.probability);
    double slack = 2.0 * std::max(est.standard_error, prev_se);
    c.expect(est.probability <= prev + slack,
             "n=" + std::to_string(n) + " rose " + fmt(prev) + " -> " +
                 fmt(est.probability) + " (+" +
                 fmt(est.probability - prev) + " > 2se " + fmt(slack) + ")");
    prev = est.probability;
    prev_se = est.standard_error;
    last = est.probability;
  }
  c.expect(last < 0.01, "failure probability at n=8 is " + fmt(last) +
                            " (needs < 0.01)");
  c.note("series " + series);
  return c;
}

// ---------------------------------------------------------------- criterion 6
// Union bound dominance over a 20-point deadline sweep.
Check criterion_6() {
  Check c;
  const int n = 6;
  FrozenSet fsn = quantile_freeze(kUniform, n, 0.5);
  for (int i = 1; i <= 20; ++i) {
    double t = static_cast<double>(i) / 20.0;
    auto est = empirical_failure_prob(kUniform, n, 0.5, t, 10000, 600 + i);
    double bound = failure_bound(kUniform, fsn, t);
    c.expect(est.probability <= bound + 3.0 * est.standard_error,
             "t=" + fmt(t) + " empirical " + fmt(est.probability) +
                 " > bound " + fmt(bound) + " + 3se");
  }
  return c;
}

// ---------------------------------------------------------------- criterion 7
// Information-theoretic lower bound at N=64, R=0.5, beta in {0.25, 0.5}.
Check criterion_7() {
  Check c;
  FrozenSet fsn = quantile_freeze(kUniform, 6, 0.5);
  auto frozen = fsn.frozen_mask();
  const std::size_t trials = 10000;
  for (double beta : {0.25, 0.5}) {
    double thr = kUniform.quantile(0.5 * (1.0 - beta));
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      RandomStream s(700, t);
      std::vector<double> times(64);
      for (double& v : times) v = kUniform.sample(s);
      if (decode_time(times, frozen) >= thr) ++hits;
    }
    double p = static_cast<double>(hits) / trials;
    double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / trials);
    double lb = info_lower_bound(64, 0.5, beta);
    c.expect(p >= lb - 3.0 * se, "beta=" + fmt(beta) + " empirical " +
                                     fmt(p) + " < bound " + fmt(lb) +
                                     " - 3se");
    c.note("beta=" + fmt(beta) + ": " + fmt(p) + " vs floor " + fmt(lb));
  }
  return c;
}

// ---------------------------------------------------------------- criterion 8
// Rate-theorem tail at (beta, rho) = (1/2, 3/8): exceedance of
// ||Delta_n||^(1/2) > (3/8)^n stays <= (1/sqrt2)^n * pi/8 + 3se for
// n in {2,4,6,8}; ||Delta_0||^(1/2) = pi/8 to 1e-9.
Check criterion_8() {
  Check c;
  DeltaTailResult base = delta_norm_tail(kUniform, 0, 0.5, 0.375, 10, 1);
  c.expect(std::abs(base.base_integral - M_PI / 8.0) < 1e-9,
           "||Delta_0|| = " + fmt(base.base_integral) + " != pi/8");
  for (int n : {2, 4, 6, 8}) {
    DeltaTailResult r = delta_norm_tail(kUniform, n, 0.5, 0.375, 10000,
                                        800 + n);
    double bound = std::pow(1.0 / std::sqrt(2.0), n) * M_PI / 8.0;
    c.expect(r.exceedance <= bound + 3.0 * r.standard_error,
             "n=" + std::to_string(n) + " exceedance " + fmt(r.exceedance) +
                 " > bound " + fmt(bound) + " + 3se");
  }
  return c;
}

// ---------------------------------------------------------------- criterion 9
// Limiting Dirac law: KS(half-crossing locations at depth 12, base CDF)
// < 0.05 with 2000 paths, uniform and exponential bases.
Check criterion_9() {
  Check c;
  LimitLocationResult u = limit_location_test(kUniform, 12, 2000, 900);
  c.expect(u.ks < 0.05, "uniform KS " + fmt(u.ks));
  auto e = RuntimeDistribution::exponential(1.0);
  LimitLocationResult x = limit_location_test(e, 12, 2000, 901);
  c.expect(x.ks < 0.05, "exponential KS " + fmt(x.ks));
  c.note("uniform " + fmt(u.ks) + ", exponential " + fmt(x.ks));
  return c;
}

// --------------------------------------------------------------- criterion 10
// Golden-ratio two-cycle: path_evolve([1,0]) is the identity to 1e-12 and
// the interior CDF value is a root of z^4 - 2z^2 + z in {0, 1, (sqrt5-1)/2}.
Check criterion_10() {
  Check c;
  RuntimeDistribution d = find_two_cycle(1.0, 2.0);
  AnyDist cycled = path_evolve(d, BitPath{{1, 0}});
  double sup = 0.0;
  for (int i = 0; i <= 400; ++i) {
    double t = 0.5 + 2.0 * i / 400.0;
    sup = std::max(sup, std::abs(cdf(cycled, t) - d.cdf(t)));
  }
  c.expect(sup < 1e-12, "cycle sup deviation " + fmt(sup));
  double interior = d.cdf(1.5);
  double best = 1.0;
  for (double root : two_cycle_roots())
    best = std::min(best, std::abs(interior - root));
  c.expect(best < 1e-12, "interior value " + fmt(interior) +
                             " not a quartic root (err " + fmt(best) + ")");
  double quartic = std::pow(interior, 4) - 2 * interior * interior + interior;
  c.expect(std::abs(quartic) < 1e-12, "quartic residual " + fmt(quartic));
  return c;
}

// --------------------------------------------------------------- criterion 11
// Discrete oracle equivalence for pmfs of size <= 6, exactly to 1e-12.
Check criterion_11() {
  Check c;
  RandomStream s(1100);
  for (std::size_t size = 1; size <= 6; ++size) {
    for (int rep = 0; rep < 8; ++rep) {
      std::vector<double> locs(size), masses(size);
      double tot = 0.0;
      for (std::size_t k = 0; k < size; ++k) {
        locs[k] = static_cast<double>(k) + 0.25 * s.next_double();
        masses[k] = 0.1 + s.next_double();
        tot += masses[k];
      }
      for (double& m : masses) m /= tot;
      masses[0] += 1.0 - std::accumulate(masses.begin(), masses.end(), 0.0);
      DiscretePmf pmf(locs, masses);

      // brute-force pair enumeration
      std::vector<double> omax(size, 0.0), omin(size, 0.0);
      for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j) {
          omax[std::max(i, j)] += masses[i] * masses[j];
          omin[std::min(i, j)] += masses[i] * masses[j];
        }

      auto [mx, mn] = discrete_pmf_split(pmf);
      double err = 0.0;
      for (std::size_t k = 0; k < size; ++k) {
        err = std::max(err, std::abs(mx.masses[k] - omax[k]));
        err = std::max(err, std::abs(mn.masses[k] - omin[k]));
      }
      c.expect(err < 1e-12, "pmf split size " + std::to_string(size) +
                                " err " + fmt(err));

      JointPmfMatrix P = JointPmfMatrix::diagonal(pmf);
      for (int bit : {1, 0}) {
        JointPmfMatrix P1 = discrete_joint_step(P, bit);
        auto rows = P1.max_marginal();
        auto cols = P1.min_marginal();
        double jerr = 0.0;
        for (std::size_t k = 0; k < size; ++k) {
          jerr = std::max(jerr, std::abs(rows.masses[k] - omax[k]));
          jerr = std::max(jerr, std::abs(cols.masses[k] - omin[k]));
        }
        c.expect(jerr < 1e-12, "joint step size " + std::to_string(size) +
                                   " bit " + std::to_string(bit) + " err " +
                                   fmt(jerr));
      }
    }
  }
  return c;
}

// --------------------------------------------------------------- criterion 12
// MDS normality: K-th order statistic (N=100, K=50) over 10^4 trials has
// mean within 3*sigma/sqrt(trials) of 0.5 and variance within 15% of 0.0025.
Check criterion_12() {
  Check c;
  const std::size_t trials = 10000, N = 100, K = 50;
  auto [m_theory, v_theory] = mds_normal_approx(kUniform, N, 0.5);
  std::vector<double> kth(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    RandomStream s(1200, t);
    std::vector<double> x(N);
    for (double& v : x) v = kUniform.sample(s);
    std::nth_element(x.begin(), x.begin() + (K - 1), x.end());
    kth[t] = x[K - 1];
  }
  double mean = std::accumulate(kth.begin(), kth.end(), 0.0) / trials;
  double var = 0.0;
  for (double v : kth) var += (v - mean) * (v - mean);
  var /= static_cast<double>(trials - 1);
  double tol = 3.0 * std::sqrt(v_theory) / std::sqrt(double(trials));
  c.expect(std::abs(mean - m_theory) <= tol,
           "mean " + fmt(mean) + " vs " + fmt(m_theory) + " (tol " +
               fmt(tol) + ")");
  c.expect(std::abs(var - v_theory) <= 0.15 * v_theory,
           "variance " + fmt(var) + " vs " + fmt(v_theory));
  c.note("mean " + fmt(mean) + ", var " + fmt(var));
  return c;
}

// --------------------------------------------------------------- criterion 13
// CLI determinism: byte-identical artifacts across repeated runs and across
// thread counts, for every subcommand.
Check criterion_13() {
  Check c;
#ifndef POLARMIX_CLI_PATH
  c.expect(false, "CLI path not configured");
  return c;
#else
  std::string cli = POLARMIX_CLI_PATH;
  auto run = [&](const std::string& args, const std::string& threads,
                 const fs::path& out) {
    fs::remove_all(out);
    fs::create_directories(out);
    std::string cmd = "POLARMIX_THREADS=" + threads + " " + cli + " " + args +
                      " --out " + out.string() + " >/dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  auto slurp_dir = [](const fs::path& dir) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (!e.is_regular_file()) continue;
      std::ifstream is(e.path(), std::ios::binary);
      std::ostringstream ss;
      ss << is.rdbuf();
      files.push_back({e.path().filename().string(), ss.str()});
    }
    std::sort(files.begin(), files.end());
    return files;
  };
  const std::vector<std::string> commands = {
      "construct --dist uniform:0,1 --n 5 --rate 0.5 --seed 7",
      "evolve --dist uniform:0,1 --n 2 --grid-points 64 --seed 7",
      "simulate --dist uniform:0,1 --n 4 --rate 0.5 --trials 400 --seed 7",
      "codec --n 3 --rate 0.5 --seed 7",
      "analyze --dist uniform:0,1 --n 5 --trials 300 --seed 7",
      "joint --dist uniform:0,1 --n 3 --seed 7",
  };
  fs::path root = fs::temp_directory_path() / "polarmix_acceptance13";
  int idx = 0;
  for (const auto& cmd : commands) {
    fs::path a = root / ("a" + std::to_string(idx));
    fs::path b = root / ("b" + std::to_string(idx));
    fs::path d = root / ("d" + std::to_string(idx));
    bool ok = run(cmd, "1", a) && run(cmd, "4", b) && run(cmd, "1", d);
    c.expect(ok, "subcommand failed: " + cmd);
    if (!ok) continue;
    c.expect(slurp_dir(a) == slurp_dir(b),
             "thread-count difference in: " + cmd);
    c.expect(slurp_dir(a) == slurp_dir(d), "rerun difference in: " + cmd);
    ++idx;
  }
  return c;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<std::pair<std::string, std::function<Check()>>> table = {
      {"closed-form leaf densities", criterion_1},
      {"martingale conservation", criterion_2},
      {"codec roundtrip + readiness", criterion_3},
      {"dominance", criterion_4},
      {"failure-probability decay", criterion_5},
      {"union bound dominance", criterion_6},
      {"information-theoretic lower bound", criterion_7},
      {"rate-theorem tail", criterion_8},
      {"limiting Dirac law", criterion_9},
      {"golden-ratio cycle", criterion_10},
      {"discrete oracle equivalence", criterion_11},
      {"MDS normality", criterion_12},
      {"CLI determinism", criterion_13},
  };
  int failures = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    int id = static_cast<int>(i) + 1;
    if (only != 0 && only != id) continue;
    auto start = std::chrono::steady_clock::now();
    Check c = table[i].second();
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    std::printf("criterion %2d [%s]: %s (%.2fs)%s%s\n", id,
                table[i].first.c_str(), c.ok ? "PASS" : "FAIL", secs,
                c.detail.empty() ? "" : " -- ", c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  return failures;
}
