// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace polarmix {

/// Splittable counter-based random stream.
///
/// Output k of stream (seed, id) is a pure function of (seed, id, k), so
/// trial outcomes never depend on execution order or thread count. The
/// generator is a SplitMix64-style double-mix of the keyed counter.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : key_(mix(mix(master_seed + 0x9e3779b97f4a7c15ULL) ^
                 mix(stream_id + 0xbf58476d1ce4e5b9ULL))),
        counter_(0) {}

  explicit RandomStream(std::uint64_t master_seed)
      : RandomStream(master_seed, 0) {}

  std::uint64_t next_u64() { return mix(key_ ^ mix(++counter_ + key_)); }

  /// Uniform double strictly inside (0,1); safe for inverse-transform use.
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace polarmix
