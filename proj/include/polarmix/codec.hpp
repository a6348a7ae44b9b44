// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarmix/distribution.hpp"
#include "polarmix/rng.hpp"

namespace polarmix {

/// Dense real data block carried through encode/decode.
class TaskMatrix {
 public:
  TaskMatrix() = default;
  TaskMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static TaskMatrix random(std::size_t rows, std::size_t cols,
                           RandomStream& stream) {
    TaskMatrix m(rows, cols);
    for (double& v : m.data_) v = 2.0 * stream.next_double() - 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const TaskMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  TaskMatrix& operator+=(const TaskMatrix& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  TaskMatrix& operator-=(const TaskMatrix& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  TaskMatrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend TaskMatrix operator+(TaskMatrix a, const TaskMatrix& b) {
    return a += b;
  }
  friend TaskMatrix operator-(TaskMatrix a, const TaskMatrix& b) {
    return a -= b;
  }

  TaskMatrix matmul(const TaskMatrix& b) const {
    detail::require(cols_ == b.rows_, "matmul: inner dimensions differ");
    TaskMatrix r(rows_, b.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        double a = at(i, k);
        for (std::size_t j = 0; j < b.cols_; ++j)
          r.at(i, j) += a * b.at(k, j);
      }
    return r;
  }

  double max_abs_diff(const TaskMatrix& o) const {
    double m = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i)
      m = std::max(m, std::abs(data_[i] - o.data_[i]));
    return m;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Result returned by a worker; absent result means the worker never
/// finished (finish_time +inf).
struct WorkerReturn {
  std::size_t index = 0;
  std::optional<TaskMatrix> result;
  double finish_time = std::numeric_limits<double>::infinity();
};

/// Static shape of a code: N = 2^n virtual workers, K data blocks.
struct CodeConfig {
  std::size_t workers = 0;        // N, power of two
  std::size_t data_blocks = 0;    // K
  std::vector<std::uint8_t> frozen;  // by path index, 1 = frozen

  int levels() const {
    int n = 0;
    while ((std::size_t{1} << n) < workers) ++n;
    return n;
  }
  double rate() const {
    return static_cast<double>(data_blocks) / workers;
  }

  void validate() const {
    detail::require(workers >= 2 && (workers & (workers - 1)) == 0,
                    "config: N must be a power of two");
    detail::require(data_blocks >= 1 && data_blocks <= workers,
                    "config: K must be in [1,N]");
    detail::require(frozen.size() == workers, "config: frozen mask size");
    std::size_t nf = 0;
    for (auto b : frozen) nf += b;
    detail::require(nf == workers - data_blocks,
                    "config: |frozen| must equal N-K");
  }
};

inline bool is_power_of_two(std::size_t n) {
  return n >= 1 && (n & (n - 1)) == 0;
}

/// Permutation sending position i to the integer with reversed n-bit binary.
inline std::vector<std::size_t> bit_reversal_perm(std::size_t N) {
  detail::require(is_power_of_two(N), "bit_reversal_perm: N not a power of 2");
  int n = 0;
  while ((std::size_t{1} << n) < N) ++n;
  std::vector<std::size_t> perm(N);
  for (std::size_t i = 0; i < N; ++i) {
    std::size_t r = 0;
    for (int k = 0; k < n; ++k) r |= ((i >> k) & 1) << (n - 1 - k);
    perm[i] = r;
  }
  return perm;
}

/// Transform-input position of a bit path (b1 = MSB integer index): the
/// decode recursion places the slower/max side in the leading half, so the
/// position is the bitwise complement N-1-i. The codec owns this mapping.
inline std::size_t position_of_path(std::size_t path_index, std::size_t N) {
  return N - 1 - path_index;
}
inline std::size_t path_of_position(std::size_t position, std::size_t N) {
  return N - 1 - position;
}

namespace detail {

/// In-place Sylvester-Hadamard butterfly: x <- H_N x, O(N log N) add/sub.
template <typename T>
void hadamard_inplace(std::vector<T>& x) {
  std::size_t N = x.size();
  for (std::size_t h = 1; h < N; h *= 2) {
    for (std::size_t b = 0; b < N; b += 2 * h) {
      for (std::size_t j = b; j < b + h; ++j) {
        T sum = x[j] + x[j + h];
        T diff = x[j] - x[j + h];
        x[j] = std::move(sum);
        x[j + h] = std::move(diff);
      }
    }
  }
}

}  // namespace detail

/// Encode N equal-shape blocks (frozen positions holding the agreed known
/// matrices, all-zeros by default): bit-reversal composed with the H_2^{(x)n}
/// butterfly, applied elementwise across matrix entries.
inline std::vector<TaskMatrix> encode(const std::vector<TaskMatrix>& blocks,
                                      const CodeConfig& config) {
  config.validate();
  detail::require(blocks.size() == config.workers,
                  "encode: expected N blocks");
  for (const auto& b : blocks)
    detail::require(b.same_shape(blocks.front()), "encode: shape mismatch");
  std::vector<TaskMatrix> w = blocks;
  detail::hadamard_inplace(w);
  auto perm = bit_reversal_perm(config.workers);
  std::vector<TaskMatrix> x(config.workers);
  for (std::size_t i = 0; i < config.workers; ++i) x[i] = w[perm[i]];
  return x;
}

/// Raised when the provided worker returns cannot resolve every data block.
class UndecodableError : public std::runtime_error {
 public:
  explicit UndecodableError(std::vector<std::size_t> blocking)
      : std::runtime_error(message(blocking)),
        blocking_paths_(std::move(blocking)) {}

  const std::vector<std::size_t>& blocking_paths() const {
    return blocking_paths_;
  }

 private:
  static std::string message(const std::vector<std::size_t>& b) {
    std::string s = "sc_decode: undecodable virtual indices:";
    for (std::size_t i : b) s += " " + std::to_string(i);
    return s;
  }
  std::vector<std::size_t> blocking_paths_;
};

/// Output of successive-cancellation decoding.
struct DecodeOutput {
  /// Recovered f(A) blocks keyed by path index (data paths only).
  std::vector<std::optional<TaskMatrix>> blocks;
  /// Availability instant of each data path under in-order decoding.
  std::vector<double> available_at;
  double decode_time = 0.0;
};

namespace detail {

struct ScNode {
  std::optional<TaskMatrix> value;
  double time = std::numeric_limits<double>::infinity();
};

/// Decode the u-positions [base, base+len) from the length-len input list
/// ys (the relevant slice of H u). Returns per-position nodes; frozen
/// positions come back with the known matrix at time 0. gate is the instant
/// the caller's sibling data became fully known.
inline void sc_solve(std::vector<ScNode> ys, std::size_t base,
                     const CodeConfig& config,
                     const TaskMatrix& frozen_value, double gate,
                     std::vector<ScNode>& out) {
  std::size_t len = ys.size();
  if (len == 1) {
    std::size_t path = path_of_position(base, config.workers);
    ScNode node;
    if (config.frozen[path]) {
      node.value = frozen_value;
      node.time = 0.0;
    } else if (ys[0].value) {
      node.value = std::move(ys[0].value);
      node.time = std::max(ys[0].time, gate);
    }
    out[base] = std::move(node);
    return;
  }
  std::size_t half = len / 2;
  // sum side: s_j = (y_j + y_{j+half}) / 2, needs both inputs
  std::vector<ScNode> s(half);
  for (std::size_t j = 0; j < half; ++j) {
    if (ys[j].value && ys[j + half].value) {
      TaskMatrix v = *ys[j].value + *ys[j + half].value;
      v *= 0.5;
      s[j].value = std::move(v);
      s[j].time = std::max(ys[j].time, ys[j + half].time);
    }
  }
  sc_solve(std::move(s), base, config, frozen_value, gate, out);

  // the difference side needs the decoded sum side re-encoded
  bool top_known = true;
  double top_done = gate;
  for (std::size_t p = base; p < base + half; ++p) {
    if (!out[p].value) top_known = false;
    if (!config.frozen[path_of_position(p, config.workers)])
      top_done = std::max(top_done, out[p].time);
  }
  std::vector<ScNode> d(half);
  if (top_known) {
    std::vector<TaskMatrix> sval(half);
    for (std::size_t p = 0; p < half; ++p) sval[p] = *out[base + p].value;
    hadamard_inplace(sval);
    for (std::size_t j = 0; j < half; ++j) {
      if (ys[j].value) {
        d[j].value = *ys[j].value - sval[j];
        d[j].time = ys[j].time;
      } else if (ys[j + half].value) {
        d[j].value = sval[j] - *ys[j + half].value;
        d[j].time = ys[j + half].time;
      }
    }
  }
  sc_solve(std::move(d), base + half, config, frozen_value, top_done, out);
}

}  // namespace detail

/// Successive-cancellation decode: exact recovery of every non-frozen block
/// for linear tasks, near-linear work, log N depth. Throws UndecodableError
/// when the available returns cannot resolve some data path.
inline DecodeOutput sc_decode(const std::vector<WorkerReturn>& returns,
                              const CodeConfig& config,
                              const TaskMatrix& frozen_value = {}) {
  config.validate();
  detail::require(returns.size() == config.workers,
                  "sc_decode: expected N returns");
  std::size_t N = config.workers;
  // shape for synthesizing frozen blocks
  TaskMatrix fz = frozen_value;
  for (const auto& r : returns)
    if (r.result && fz.rows() == 0)
      fz = TaskMatrix(r.result->rows(), r.result->cols(), 0.0);
  auto perm = bit_reversal_perm(N);
  std::vector<detail::ScNode> ys(N);
  for (std::size_t j = 0; j < N; ++j) {
    const WorkerReturn& r = returns[perm[j]];
    detail::require(r.result.has_value() == std::isfinite(r.finish_time),
                    "sc_decode: result present iff finish_time finite");
    if (r.result) {
      ys[j].value = *r.result;
      ys[j].time = r.finish_time;
    }
  }
  std::vector<detail::ScNode> solved(N);
  detail::sc_solve(std::move(ys), 0, config, fz, 0.0, solved);

  DecodeOutput outp;
  outp.blocks.resize(N);
  outp.available_at.assign(N, 0.0);
  std::vector<std::size_t> blocking;
  for (std::size_t path = 0; path < N; ++path) {
    if (config.frozen[path]) continue;
    std::size_t pos = position_of_path(path, N);
    if (!solved[pos].value) {
      blocking.push_back(path);
      continue;
    }
    outp.blocks[path] = std::move(solved[pos].value);
    outp.available_at[path] = solved[pos].time;
    outp.decode_time = std::max(outp.decode_time, solved[pos].time);
  }
  if (!blocking.empty()) throw UndecodableError(std::move(blocking));
  return outp;
}

/// Min/max butterfly of physical finish times; entry i is the runtime of the
/// virtual worker with bit-path index i. The output is a permutation of the
/// input (a sorting-network relabeling).
inline std::vector<double> virtual_runtimes(
    const std::vector<double>& physical) {
  detail::require(is_power_of_two(physical.size()) && physical.size() >= 1,
                  "virtual_runtimes: N must be a power of two");
  std::size_t N = physical.size();
  auto perm = bit_reversal_perm(N);
  std::vector<double> a(N);
  for (std::size_t j = 0; j < N; ++j) a[j] = physical[perm[j]];
  for (std::size_t s = N / 2; s >= 1; s /= 2) {
    for (std::size_t b = 0; b < N; b += 2 * s) {
      for (std::size_t j = b; j < b + s; ++j) {
        double hi = std::max(a[j], a[j + s]);
        double lo = std::min(a[j], a[j + s]);
        a[j] = hi;
        a[j + s] = lo;
      }
    }
  }
  std::vector<double> vt(N);
  for (std::size_t path = 0; path < N; ++path)
    vt[path] = a[position_of_path(path, N)];
  return vt;
}

/// Earliest instant every non-frozen block is decodable: the max virtual
/// runtime over data paths.
inline double decode_time(const std::vector<double>& physical,
                          const std::vector<std::uint8_t>& frozen) {
  std::vector<double> vt = virtual_runtimes(physical);
  detail::require(frozen.size() == vt.size(), "decode_time: mask size");
  double t = 0.0;
  for (std::size_t i = 0; i < vt.size(); ++i)
    if (!frozen[i]) t = std::max(t, vt[i]);
  return t;
}

// --- matrix serialization ----------------------------------------------------

/// Row-major CSV without header (pure numeric payload).
inline std::string matrix_to_csv(const TaskMatrix& m) {
  std::string s;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) s += ",";
      s += detail::fmt17(m.at(r, c));
    }
    s += "\r\n";
  }
  return s;
}

/// Compact binary format: magic "PLMX", u32 rows, u32 cols, f64 entries LE.
inline void matrix_to_plmx(const TaskMatrix& m, std::ostream& os) {
  os.write("PLMX", 4);
  std::uint32_t rc[2] = {static_cast<std::uint32_t>(m.rows()),
                         static_cast<std::uint32_t>(m.cols())};
  os.write(reinterpret_cast<const char*>(rc), sizeof rc);
  os.write(reinterpret_cast<const char*>(m.data().data()),
           static_cast<std::streamsize>(m.data().size() * sizeof(double)));
}

inline TaskMatrix matrix_from_plmx(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  detail::require(is.good() && std::memcmp(magic, "PLMX", 4) == 0,
                  "plmx: bad magic");
  std::uint32_t rc[2];
  is.read(reinterpret_cast<char*>(rc), sizeof rc);
  TaskMatrix m(rc[0], rc[1]);
  is.read(reinterpret_cast<char*>(m.data().data()),
          static_cast<std::streamsize>(m.data().size() * sizeof(double)));
  detail::require(is.good(), "plmx: truncated payload");
  return m;
}

}  // namespace polarmix
