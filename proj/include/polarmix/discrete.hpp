// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "polarmix/distribution.hpp"

namespace polarmix {

/// Probability mass function on a finite ascending support.
struct DiscretePmf {
  std::vector<double> locations;
  std::vector<double> masses;

  DiscretePmf() = default;
  DiscretePmf(std::vector<double> locs, std::vector<double> ms)
      : locations(std::move(locs)), masses(std::move(ms)) {
    validate();
  }

  std::size_t size() const { return locations.size(); }

  std::vector<double> cdf_values() const {
    std::vector<double> f(masses.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < masses.size(); ++k) f[k] = (acc += masses[k]);
    return f;
  }

  static DiscretePmf from_cdf(const std::vector<double>& locations,
                              const std::vector<double>& cdf) {
    std::vector<double> m(cdf.size());
    double prev = 0.0;
    for (std::size_t k = 0; k < cdf.size(); ++k) {
      m[k] = cdf[k] - prev;
      prev = cdf[k];
      if (m[k] < 0.0 && m[k] > -1e-15) m[k] = 0.0;
    }
    return DiscretePmf(locations, std::move(m));
  }

  RuntimeDistribution to_runtime() const {
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < size(); ++k)
      if (masses[k] > 0.0) atoms.push_back({locations[k], masses[k]});
    return RuntimeDistribution::from_atoms(std::move(atoms));
  }

  void validate() const {
    detail::require(locations.size() == masses.size() && !locations.empty(),
                    "pmf: shape mismatch or empty");
    for (std::size_t k = 1; k < locations.size(); ++k)
      detail::require(locations[k] > locations[k - 1],
                      "pmf: locations must be strictly increasing");
    double s = 0.0;
    for (double m : masses) {
      detail::require(m >= 0.0, "pmf: negative mass");
      s += m;
    }
    detail::require(std::abs(s - 1.0) <= 1e-12, "pmf: masses must sum to 1");
  }
};

/// One-step split on atoms: the children have CDF values F_k^2 and
/// 2 F_k - F_k^2 at the same locations, masses recovered by differencing.
inline std::pair<DiscretePmf, DiscretePmf> discrete_pmf_split(
    const DiscretePmf& pmf) {
  std::vector<double> f = pmf.cdf_values();
  std::vector<double> fmax(f.size()), fmin(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    fmax[k] = f[k] * f[k];
    fmin[k] = 2.0 * f[k] - f[k] * f[k];
  }
  return {DiscretePmf::from_cdf(pmf.locations, fmax),
          DiscretePmf::from_cdf(pmf.locations, fmin)};
}

/// Lower-triangular joint mass matrix of a (min, max) pair on a common
/// support: row i = max at location i, column j = min at location j.
struct JointPmfMatrix {
  std::vector<double> locations;
  std::vector<double> p;  // row-major, size n*n, zero above the diagonal

  std::size_t dim() const { return locations.size(); }
  double& at(std::size_t i, std::size_t j) { return p[i * dim() + j]; }
  double at(std::size_t i, std::size_t j) const { return p[i * dim() + j]; }

  static JointPmfMatrix diagonal(const DiscretePmf& pmf) {
    JointPmfMatrix m;
    m.locations = pmf.locations;
    m.p.assign(pmf.size() * pmf.size(), 0.0);
    for (std::size_t k = 0; k < pmf.size(); ++k) m.at(k, k) = pmf.masses[k];
    return m;
  }

  double total() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
  }

  /// Row sums: pmf of the max component.
  DiscretePmf max_marginal() const {
    std::vector<double> m(dim(), 0.0);
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j <= i; ++j) m[i] += at(i, j);
    return DiscretePmf(locations, std::move(m));
  }

  /// Column sums: pmf of the min component.
  DiscretePmf min_marginal() const {
    std::vector<double> m(dim(), 0.0);
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j <= i; ++j) m[j] += at(i, j);
    return DiscretePmf(locations, std::move(m));
  }
};

/// Joint update P' = L(2 m m^T - diag(m m^T)) where m is the bit-selected
/// marginal (bit 1: max/rows, bit 0: min/columns) and L keeps the lower
/// triangle. The marginals of P' equal the discrete_pmf_split children of m.
inline JointPmfMatrix discrete_joint_step(const JointPmfMatrix& P, int bit) {
  DiscretePmf m = bit ? P.max_marginal() : P.min_marginal();
  std::size_t n = m.size();
  JointPmfMatrix out;
  out.locations = P.locations;
  out.p.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j)
      out.at(i, j) = 2.0 * m.masses[i] * m.masses[j];
    out.at(i, i) = m.masses[i] * m.masses[i];
  }
  return out;
}

}  // namespace polarmix
