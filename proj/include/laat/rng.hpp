#pragma once

#include <cstdint>
#include <random>

namespace laat {

// splitmix64 step; used only to derive well-mixed engine seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic per-(a,b) substream seed from one root seed. Execution order
// never feeds back into the streams, so sequential and batched walkers see
// identical randomness.
inline std::uint64_t stream_seed(std::uint64_t root, std::uint64_t a,
                                 std::uint64_t b) {
  std::uint64_t s = root;
  std::uint64_t h = splitmix64(s);
  s ^= a;
  h ^= splitmix64(s);
  s ^= b;
  h ^= splitmix64(s);
  return h;
}

inline std::mt19937_64 make_stream(std::uint64_t root, std::uint64_t a,
                                   std::uint64_t b) {
  return std::mt19937_64(stream_seed(root, a, b));
}

// Uniform in [0,1). mt19937_64 output is fully specified by the standard and
// this conversion avoids the implementation-defined std distributions.
inline double next_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0,n), unbiased.
inline std::uint64_t next_below(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % n;
}

inline double next_uniform_in(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * next_uniform(gen);
}

}  // namespace laat
