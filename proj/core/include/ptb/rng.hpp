#pragma once

#include <cstdint>

namespace ptb {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic child seed; the same (seed, stream) pair always yields the same value.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Counter-based generator: draw k of row i depends only on (seed, i, k), so rows can be
// generated in any order or in parallel without changing the sample.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(splitmix64(seed)) {}

  std::uint64_t bits(std::uint64_t row, std::uint64_t k) const {
    return splitmix64(key_ ^ splitmix64(row * 0x9e3779b97f4a7c15ULL + k));
  }
  // Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t row, std::uint64_t k) const {
    return static_cast<double>(bits(row, k) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

}  // namespace ptb
