#pragma once

#include <cmath>
#include <cstdint>

namespace floorgen {

// SplitMix64. Pinned generator for every randomized routine in the library so
// results are reproducible bit-for-bit across platforms and runs. Stream
// semantics: state advances by the 64-bit golden-ratio increment; each call to
// next_u64() consumes exactly one increment.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Modulo mapping; bias is irrelevant at the n << 2^64
  // sizes used here and keeps the stream definition trivial.
  std::uint64_t next_index(std::uint64_t n) { return n ? next_u64() % n : 0; }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Standard normal via Box-Muller (std::normal_distribution is
  // implementation-defined, so it cannot back the determinism contract).
  double next_gaussian() {
    double u1 = 0.0;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::uint64_t state_;
};

// Derives an independent child stream seed, e.g. one RANSAC stream per wall id.
inline std::uint64_t derive_stream(std::uint64_t global_seed, std::uint64_t stream_id) {
  SplitMix64 mix(global_seed ^ (stream_id * 0xD1342543DE82EF95ull));
  mix.next_u64();
  return mix.next_u64();
}

}  // namespace floorgen
