#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include "matpca/errors.hpp"

namespace matpca {

// splitmix64 step: advances the state and returns the next 64-bit word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Finalizer only (no state advance); used for key mixing.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over a byte buffer followed by a splitmix finalizer. Used to derive
// per-cell seeds from heterogeneous tuples in the benchmark runner.
inline std::uint64_t hash64_bytes(const void* data, std::size_t len,
                                  std::uint64_t seed = 0) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

double std_normal_quantile(double p);  // defined in robust_stats.cpp

// Counter-based splittable generator: the stream is fully determined by
// (seed, stream, index), so independent observations/starts can be filled in
// any order (or in parallel) with identical results.
class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
    state_ = mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
    state_ = mix64(state_ ^ (index + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform on the open interval (0, 1); never returns an exact endpoint, so
  // it is safe to feed through inverse CDFs.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via the inverse CDF. One uniform per deviate keeps the
  // stream position independent of the values drawn (no rejection).
  double normal() { return std_normal_quantile(uniform01()); }

  // k distinct indices from {0, ..., n-1} by partial Fisher-Yates.
  std::vector<int> sample_without_replacement(int n, int k) {
    if (k < 0 || k > n) throw ArgumentError("sample size out of range");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
      int j = i + static_cast<int>(next_u64() % static_cast<std::uint64_t>(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

 private:
  std::uint64_t state_;
};

// Stream identifiers: keep all consumers of one seed on disjoint streams.
enum RngStream : std::uint64_t {
  kStreamSample = 1,      // matrix-normal noise, keyed per observation
  kStreamSelect = 2,      // which observations get contaminated
  kStreamSpike = 3,       // outlier spike entries, keyed per observation
  kStreamStart = 4,       // MMCD candidate starting subsets, keyed per start
};

}  // namespace matpca
