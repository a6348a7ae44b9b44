// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0
//
// Compares mean decode times of uncoded / repetition / MDS / polar schemes
// on Uniform[20,100] workers at N=64, R=0.625.

#include <cstdio>

#include "polarmix/simulator.hpp"

int main() {
  using namespace polarmix;
  auto base = RuntimeDistribution::uniform(20, 100);
  FrozenSet fs = quantile_freeze(base, 6, 0.625);
  ComparisonReport rep = run_comparison(base, fs, 20000, 7, 80.0);
  std::printf("scheme      mean    p50     p95     fail@80\n");
  for (const auto& [name, s] : rep.summary)
    std::printf("%-10s %7.3f %7.3f %7.3f %7.4f\n", name.c_str(), s.mean,
                s.p50, s.p95, s.fail_at_deadline);
  return 0;
}
