// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0
//
// Prints the depth-2 polarized family of the uniform base: four CDFs and
// densities sampled over [0,1].

#include <cstdio>

#include "polarmix/polarization.hpp"

int main() {
  using namespace polarmix;
  auto base = RuntimeDistribution::uniform(0, 1);
  PolarFamily fam = polarize(base, 2);
  std::printf("t");
  for (std::size_t i = 0; i < fam.members.size(); ++i)
    std::printf("  F_%s  p_%s", BitPath::from_index(i, 2).to_string().c_str(),
                BitPath::from_index(i, 2).to_string().c_str());
  std::printf("\n");
  for (int s = 0; s <= 10; ++s) {
    double t = s / 10.0;
    std::printf("%.1f", t);
    for (const auto& member : fam.members)
      std::printf("  %.4f %.4f", cdf(member, t),
                  (s == 0 || s == 10) ? 0.0 : pdf(member, t));
    std::printf("\n");
  }
  return 0;
}
