// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "polarmix/distribution.hpp"
#include "polarmix/parallel.hpp"

namespace polarmix {

/// Path in the binary polarization tree. Bit 1 selects the max (slower)
/// child, bit 0 the min (faster) child; b1 is applied to the base first.
struct BitPath {
  std::vector<int> bits;

  int depth() const { return static_cast<int>(bits.size()); }

  /// 0-based integer index with b1 as the most significant bit.
  std::uint64_t index() const {
    std::uint64_t i = 0;
    for (int b : bits) i = (i << 1) | static_cast<std::uint64_t>(b);
    return i;
  }

  static BitPath from_index(std::uint64_t i, int n) {
    BitPath p;
    p.bits.resize(n);
    for (int k = 0; k < n; ++k) p.bits[k] = (i >> (n - 1 - k)) & 1;
    return p;
  }

  std::string to_string() const {
    std::string s;
    for (int b : bits) s += static_cast<char>('0' + b);
    return s;
  }
};

/// One-step transform of a CDF value: the erasure-process scalar map.
inline double scalar_step(double z, int bit) {
  return bit ? z * z : 2.0 * z - z * z;
}

/// F_{b1..bn}(t) from z = F(t), iterating the scalar map along the path.
inline double scalar_path(double z, const std::vector<int>& bits) {
  for (int b : bits) z = scalar_step(z, b);
  return z;
}

/// Either exact (piecewise-polynomial) or grid representation of a member.
using AnyDist = std::variant<RuntimeDistribution, GridDistribution>;

inline double cdf(const AnyDist& d, double t) {
  return std::visit([&](const auto& x) { return x.cdf(t); }, d);
}
inline double pdf(const AnyDist& d, double t) {
  return std::visit([&](const auto& x) { return x.pdf(t); }, d);
}
inline double quantile(const AnyDist& d, double u) {
  return std::visit([&](const auto& x) { return x.quantile(u); }, d);
}
inline double mean(const AnyDist& d) {
  return std::visit([](const auto& x) { return x.mean(); }, d);
}
inline double laplace_transform(const AnyDist& d, double lambda) {
  return std::visit([&](const auto& x) { return x.laplace_transform(lambda); },
                    d);
}
inline double support_lo(const AnyDist& d) {
  return std::visit([](const auto& x) { return x.support_lo(); }, d);
}
inline double support_hi(const AnyDist& d) {
  return std::visit([](const auto& x) { return x.support_hi(); }, d);
}
inline bool is_grid(const AnyDist& d) {
  return std::holds_alternative<GridDistribution>(d);
}

struct PolarizeOptions {
  int degree_cap = kDefaultDegreeCap;
  int grid_points = kDefaultGridPoints;
  bool force_grid = false;
};

/// Children of a one-step split; grid_fallback is set when the exact
/// representation would exceed the degree cap and the result degraded.
struct SplitResult {
  AnyDist max_child;
  AnyDist min_child;
  bool grid_fallback = false;
};

namespace detail {

inline std::pair<RuntimeDistribution, RuntimeDistribution> split_pp(
    const RuntimeDistribution& d) {
  // pointwise maps of the total CDF: z^2 (max) and 2z - z^2 (min); the
  // square is shared between the two children
  std::vector<ChebSeries> smax, smin;
  smax.reserve(d.segments().size());
  smin.reserve(d.segments().size());
  for (const auto& s : d.segments()) {
    ChebSeries sq = s.squared();
    ChebSeries mn = s * 2.0 - sq;
    sq.cleanup();
    mn.cleanup();
    smax.push_back(std::move(sq));
    smin.push_back(std::move(mn));
  }
  std::vector<Atom> amax, amin;
  for (const auto& a : d.atoms()) {
    double v = d.cdf(a.location);
    double l = v - a.mass;
    double mmax = v * v - l * l;
    double mmin = (2.0 * v - v * v) - (2.0 * l - l * l);
    if (mmax > 0.0) amax.push_back({a.location, mmax});
    if (mmin > 0.0) amin.push_back({a.location, mmin});
  }
  return {RuntimeDistribution(d.breakpoints(), std::move(smax),
                              std::move(amax)),
          RuntimeDistribution(d.breakpoints(), std::move(smin),
                              std::move(amin))};
}

}  // namespace detail

/// One-step split F -> (F^2, 2F - F^2).
inline SplitResult split_cdf(const RuntimeDistribution& d,
                             const PolarizeOptions& opts = {}) {
  if (opts.force_grid || 2 * d.max_degree() > opts.degree_cap) {
    GridDistribution g = GridDistribution::from(d, opts.grid_points);
    std::vector<double> vmax(g.values()), vmin(g.values());
    for (std::size_t i = 0; i < vmax.size(); ++i) {
      double z = g.values()[i];
      vmax[i] = z * z;
      vmin[i] = 2.0 * z - z * z;
    }
    return {GridDistribution(g.support_lo(), g.support_hi(), std::move(vmax)),
            GridDistribution(g.support_lo(), g.support_hi(), std::move(vmin)),
            true};
  }
  auto pair = detail::split_pp(d);
  return {std::move(pair.first), std::move(pair.second), false};
}

inline SplitResult split_cdf(const GridDistribution& g,
                             const PolarizeOptions& opts = {}) {
  (void)opts;
  std::vector<double> vmax(g.values()), vmin(g.values());
  for (std::size_t i = 0; i < vmax.size(); ++i) {
    double z = g.values()[i];
    vmax[i] = z * z;
    vmin[i] = 2.0 * z - z * z;
  }
  return {GridDistribution(g.support_lo(), g.support_hi(), std::move(vmax)),
          GridDistribution(g.support_lo(), g.support_hi(), std::move(vmin)),
          false};
}

inline SplitResult split_cdf(const AnyDist& d,
                             const PolarizeOptions& opts = {}) {
  return std::visit([&](const auto& x) { return split_cdf(x, opts); }, d);
}

/// One-step split for independent but non-identical workers:
/// F_max = F1*F2 and F_min = F1 + F2 - F1*F2. Provided for a single step,
/// mirroring the scope of the underlying analysis; recursing over the
/// outputs is mechanically possible but carries no guarantees here.
inline std::pair<RuntimeDistribution, RuntimeDistribution>
split_cdf_nonidentical(const RuntimeDistribution& f1,
                       const RuntimeDistribution& f2) {
  std::vector<double> bp;
  for (double t : f1.breakpoints()) bp.push_back(t);
  for (double t : f2.breakpoints()) bp.push_back(t);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  int deg = std::max(1, f1.max_degree() + f2.max_degree());
  auto build = [&](auto&& g) {
    std::vector<ChebSeries> segs;
    for (std::size_t j = 0; j + 1 < bp.size(); ++j) {
      double lo = bp[j], h = bp[j + 1] - bp[j];
      ChebSeries s = ChebSeries::interpolate(
          [&](double u) {
            // interpolation at deg+1 nodes reproduces g(F1,F2) exactly
            // (polynomial of degree <= deg on each merged interval); the
            // right node must take the left limit to stay on this segment
            double t = (u == 1.0) ? bp[j + 1] : lo + h * u;
            double z1 = f1.cdf(t), z2 = f2.cdf(t);
            if (u == 1.0) {
              z1 -= f1.atom_mass_at(t);
              z2 -= f2.atom_mass_at(t);
            }
            return g(z1, z2);
          },
          deg);
      s.cleanup();
      segs.push_back(std::move(s));
    }
    std::vector<Atom> atoms;
    for (double t : bp) {
      double m1 = f1.atom_mass_at(t) + f2.atom_mass_at(t);
      if (m1 == 0.0) continue;
      double v = g(f1.cdf(t), f2.cdf(t));
      double l = g(f1.cdf(t) - f1.atom_mass_at(t),
                   f2.cdf(t) - f2.atom_mass_at(t));
      if (v - l > 0.0) atoms.push_back({t, v - l});
    }
    if (bp.size() == 1)
      return RuntimeDistribution(bp, {}, std::move(atoms));
    return RuntimeDistribution(bp, std::move(segs), std::move(atoms));
  };
  auto fmax = build([](double z1, double z2) { return z1 * z2; });
  auto fmin =
      build([](double z1, double z2) { return z1 + z2 - z1 * z2; });
  return {std::move(fmax), std::move(fmin)};
}

/// Density-form split. Requires an absolutely continuous input; the children
/// carry densities 2 p F (max) and 2 p (1 - F) (min).
inline std::pair<RuntimeDistribution, RuntimeDistribution> split_pdf(
    const RuntimeDistribution& d, const PolarizeOptions& opts = {}) {
  if (d.has_atoms())
    throw std::domain_error(
        "split_pdf: input has point masses, use split_cdf");
  SplitResult r = split_cdf(d, opts);
  if (r.grid_fallback)
    throw std::domain_error("split_pdf: degree cap exceeded, use split_cdf");
  return {std::get<RuntimeDistribution>(std::move(r.max_child)),
          std::get<RuntimeDistribution>(std::move(r.min_child))};
}

/// The 2^n polarized distributions at depth n, keyed by bit-path index.
struct PolarFamily {
  RuntimeDistribution base;
  int depth = 0;
  std::vector<AnyDist> members;  // index = BitPath::index(), b1 MSB
  bool grid_mode = false;

  const AnyDist& member(const BitPath& p) const { return members[p.index()]; }
};

/// Materialize the full family by recursive splitting (bit 1 = max child).
/// Splitting degrades to the grid representation past the degree cap.
inline PolarFamily polarize(const RuntimeDistribution& base, int n,
                            const PolarizeOptions& opts = {}) {
  detail::require(n >= 0 && n <= 20, "polarize: depth must be in [0,20]");
  PolarFamily fam;
  fam.base = base;
  fam.depth = n;
  std::vector<AnyDist> level;
  if (opts.force_grid) {
    level.emplace_back(GridDistribution::from(base, opts.grid_points));
    fam.grid_mode = true;
  } else {
    level.emplace_back(base);
  }
  for (int k = 0; k < n; ++k) {
    std::vector<AnyDist> next(2 * level.size(),
                              AnyDist(GridDistribution()));
    std::atomic<bool> fell_back{false};
    parallel_for(level.size(), [&](std::size_t i) {
      SplitResult r = split_cdf(level[i], opts);
      if (r.grid_fallback) fell_back.store(true, std::memory_order_relaxed);
      // path index appends the new bit at the least significant position
      next[2 * i + 1] = std::move(r.max_child);
      next[2 * i] = std::move(r.min_child);
    });
    if (fell_back.load()) fam.grid_mode = true;
    level = std::move(next);
  }
  fam.members = std::move(level);
  return fam;
}

/// Evolve a single leaf without materializing the family.
inline AnyDist path_evolve(const RuntimeDistribution& base,
                           const BitPath& path,
                           const PolarizeOptions& opts = {}) {
  AnyDist d = opts.force_grid
                  ? AnyDist(GridDistribution::from(base, opts.grid_points))
                  : AnyDist(base);
  for (int b : path.bits) {
    SplitResult r = split_cdf(d, opts);
    d = b ? std::move(r.max_child) : std::move(r.min_child);
  }
  return d;
}

/// Roots of z^4 - 2z^2 + z = 0 inside [0,1]; the fixed-point values of the
/// two-step (max, min) cycle.
inline std::vector<double> two_cycle_roots() {
  return {0.0, 1.0, (std::sqrt(5.0) - 1.0) / 2.0};
}

/// Two-atom distribution that the composed [max, min] evolution maps onto
/// itself: interior CDF plateau at the inverse golden ratio.
inline RuntimeDistribution find_two_cycle(double t0, double t1) {
  detail::require(t0 < t1, "find_two_cycle: requires t0 < t1");
  double c = (std::sqrt(5.0) - 1.0) / 2.0;
  RuntimeDistribution d =
      RuntimeDistribution::from_atoms({{t0, c}, {t1, 1.0 - c}});
  AnyDist cycled = path_evolve(d, BitPath{{1, 0}});
  for (int i = 0; i <= 100; ++i) {
    double t = t0 + (t1 - t0) * i / 100.0 + (t1 - t0) * 1e-3;
    if (std::abs(cdf(cycled, t) - d.cdf(t)) > 1e-12)
      throw std::logic_error("find_two_cycle: fixed-point check failed");
  }
  return d;
}

}  // namespace polarmix
