// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "polarmix/discrete.hpp"
#include "polarmix/joint.hpp"
#include "polarmix/polarization.hpp"
#include "polarmix/rng.hpp"

using namespace polarmix;

namespace {

/// Brute-force oracle: enumerate all i.i.d. pairs (i, j) with weight
/// m_i m_j and accumulate the (min, max) pmfs.
std::pair<DiscretePmf, DiscretePmf> pair_enumeration_split(
    const DiscretePmf& pmf) {
  std::size_t n = pmf.size();
  std::vector<double> mx(n, 0.0), mn(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double w = pmf.masses[i] * pmf.masses[j];
      mx[std::max(i, j)] += w;
      mn[std::min(i, j)] += w;
    }
  return {DiscretePmf(pmf.locations, mx), DiscretePmf(pmf.locations, mn)};
}

}  // namespace

TEST_CASE("two-atom pmf split matches the pair enumeration") {
  DiscretePmf pmf({1.0, 2.0}, {0.3, 0.7});
  auto [mx, mn] = discrete_pmf_split(pmf);
  CHECK(mx.masses[0] == Catch::Approx(0.09).margin(1e-15));
  CHECK(mx.masses[1] == Catch::Approx(0.91).margin(1e-15));
  CHECK(mn.masses[0] == Catch::Approx(0.51).margin(1e-15));
  CHECK(mn.masses[1] == Catch::Approx(0.49).margin(1e-15));
  auto [omx, omn] = pair_enumeration_split(pmf);
  for (int k = 0; k < 2; ++k) {
    CHECK(mx.masses[k] == Catch::Approx(omx.masses[k]).margin(1e-14));
    CHECK(mn.masses[k] == Catch::Approx(omn.masses[k]).margin(1e-14));
  }
}

TEST_CASE("single atom splits into itself") {
  DiscretePmf pmf({5.0}, {1.0});
  auto [mx, mn] = discrete_pmf_split(pmf);
  CHECK(mx.masses[0] == 1.0);
  CHECK(mn.masses[0] == 1.0);
}

TEST_CASE("three-point uniform pmf squares the CDF") {
  DiscretePmf pmf({1.0, 2.0, 3.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  auto [mx, mn] = discrete_pmf_split(pmf);
  auto f = mx.cdf_values();
  CHECK(f[0] == Catch::Approx(1.0 / 9).margin(1e-14));
  CHECK(f[1] == Catch::Approx(4.0 / 9).margin(1e-14));
  CHECK(f[2] == Catch::Approx(1.0).margin(1e-14));
  (void)mn;
}

TEST_CASE("pmf split matches the enumeration oracle for sizes up to 6") {
  RandomStream s(2026);
  for (std::size_t n = 2; n <= 6; ++n) {
    std::vector<double> locs(n), masses(n);
    double tot = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      locs[k] = static_cast<double>(k) + s.next_double() * 0.5;
      masses[k] = 0.05 + s.next_double();
      tot += masses[k];
    }
    for (double& m : masses) m /= tot;
    double drift = 1.0 - std::accumulate(masses.begin(), masses.end(), 0.0);
    masses[0] += drift;
    DiscretePmf pmf(locs, masses);
    auto [mx, mn] = discrete_pmf_split(pmf);
    auto [omx, omn] = pair_enumeration_split(pmf);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(mx.masses[k] == Catch::Approx(omx.masses[k]).margin(1e-12));
      CHECK(mn.masses[k] == Catch::Approx(omn.masses[k]).margin(1e-12));
    }
  }
}

TEST_CASE("discrete and continuous splits agree on a 64-atom staircase") {
  auto u = RuntimeDistribution::uniform(0, 1);
  const std::size_t n = 64;
  std::vector<double> locs(n), masses(n);
  for (std::size_t k = 0; k < n; ++k) {
    locs[k] = (k + 1.0) / n;
    masses[k] = u.cdf(locs[k]) - (k == 0 ? 0.0 : u.cdf(locs[k - 1]));
  }
  DiscretePmf pmf(locs, masses);
  auto [mx, mn] = discrete_pmf_split(pmf);
  auto staircase = pmf.to_runtime();
  auto r = split_cdf(staircase);
  auto fmx = mx.cdf_values();
  auto fmn = mn.cdf_values();
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(fmx[k] == Catch::Approx(cdf(r.max_child, locs[k])).margin(1e-12));
    CHECK(fmn[k] == Catch::Approx(cdf(r.min_child, locs[k])).margin(1e-12));
  }
}

TEST_CASE("discrete joint step") {
  DiscretePmf pmf({1.0, 2.0}, {0.3, 0.7});
  JointPmfMatrix P = JointPmfMatrix::diagonal(pmf);

  SECTION("max-selected step has max-split rows") {
    JointPmfMatrix P1 = discrete_joint_step(P, 1);
    auto rows = P1.max_marginal();
    auto [mx, mn] = discrete_pmf_split(pmf);
    CHECK(rows.masses[0] == Catch::Approx(mx.masses[0]).margin(1e-15));
    CHECK(rows.masses[1] == Catch::Approx(mx.masses[1]).margin(1e-15));
    auto cols = P1.min_marginal();
    CHECK(cols.masses[0] == Catch::Approx(mn.masses[0]).margin(1e-15));
    CHECK(cols.masses[1] == Catch::Approx(mn.masses[1]).margin(1e-15));
  }

  SECTION("mass stays 1 and the matrix stays lower-triangular") {
    JointPmfMatrix cur = P;
    RandomStream s(5);
    for (int step = 0; step < 6; ++step) {
      cur = discrete_joint_step(cur, static_cast<int>(s.next_u64() & 1));
      CHECK(cur.total() == Catch::Approx(1.0).margin(1e-12));
      for (std::size_t i = 0; i < cur.dim(); ++i)
        for (std::size_t j = i + 1; j < cur.dim(); ++j)
          CHECK(cur.at(i, j) == 0.0);
    }
  }

  SECTION("point mass is a fixed point") {
    DiscretePmf point({2.5}, {1.0});
    JointPmfMatrix Q = JointPmfMatrix::diagonal(point);
    JointPmfMatrix Q1 = discrete_joint_step(Q, 0);
    CHECK(Q1.at(0, 0) == Catch::Approx(1.0).margin(1e-15));
  }

  SECTION("marginals track discrete_pmf_split along any bit string") {
    DiscretePmf cur_pmf({0.5, 1.0, 1.75, 3.0}, {0.1, 0.4, 0.3, 0.2});
    JointPmfMatrix cur = JointPmfMatrix::diagonal(cur_pmf);
    std::vector<int> bits = {1, 0, 1, 1, 0};
    for (int b : bits) {
      auto [mx, mn] = discrete_pmf_split(cur_pmf);
      cur = discrete_joint_step(cur, b);
      auto rows = cur.max_marginal();
      auto cols = cur.min_marginal();
      for (std::size_t k = 0; k < cur_pmf.size(); ++k) {
        CHECK(rows.masses[k] == Catch::Approx(mx.masses[k]).margin(1e-13));
        CHECK(cols.masses[k] == Catch::Approx(mn.masses[k]).margin(1e-13));
      }
      cur_pmf = b ? mx : mn;
    }
  }
}

TEST_CASE("joint density step on the uniform product") {
  auto u = RuntimeDistribution::uniform(0, 1);
  JointGrid g = JointGrid::product(u, 128);
  CHECK(g.total_mass() == Catch::Approx(1.0).margin(1e-3));

  JointGrid g1 = joint_density_step(g, 1);
  SECTION("density approaches 2 on u <= v and 0 above") {
    CHECK(g1.at(20, 90) == Catch::Approx(2.0).margin(0.02));
    CHECK(g1.at(90, 20) == 0.0);
    CHECK(g1.total_mass() == Catch::Approx(1.0).margin(1e-3));
  }
  SECTION("marginals match the density split") {
    auto mn = g1.min_marginal();
    auto mx = g1.max_marginal();
    for (std::size_t i = 16; i < 112; i += 16) {
      double t = g1.axis(i);
      CHECK(mn[i] == Catch::Approx(2.0 * (1.0 - t)).margin(0.03));
      CHECK(mx[i] == Catch::Approx(2.0 * t).margin(0.03));
    }
  }
  SECTION("monte-carlo cross-check of the first step") {
    RandomStream s(77);
    const int trials = 200000;
    const std::size_t cells = 8;
    std::vector<double> hist(cells * cells, 0.0);
    for (int i = 0; i < trials; ++i) {
      double a = u.sample(s), b = u.sample(s);
      double lo = std::min(a, b), hi = std::max(a, b);
      std::size_t iu = std::min<std::size_t>(cells - 1, lo * cells);
      std::size_t iv = std::min<std::size_t>(cells - 1, hi * cells);
      hist[iu * cells + iv] += 1.0;
    }
    for (std::size_t iu = 0; iu < cells; ++iu)
      for (std::size_t iv = 0; iv < cells; ++iv) {
        double expected = iu < iv   ? 2.0 / (cells * cells)
                          : iu == iv ? 1.0 / (cells * cells)
                                     : 0.0;
        CHECK(hist[iu * cells + iv] / trials ==
              Catch::Approx(expected).margin(4e-3));
      }
  }
}

TEST_CASE("zero-mass joint grid raises") {
  JointGrid g(0.0, 1.0, 16);
  CHECK_THROWS_AS(g.renormalize(), std::domain_error);
}
