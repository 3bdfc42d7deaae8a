#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace lofdrf {

// splitmix64 finalizer. Cheap, well-mixed, and fully portable, which matters
// because model bytes and reports must be identical across platforms; the
// std:: distributions are implementation-defined so they are avoided here.
constexpr uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for the i-th independent consumer of a master seed: tree i of a
// forest, run r of an experiment, and so on.
constexpr uint64_t derive_seed(uint64_t master, uint64_t i) {
  return mix64(master + 0x9E3779B97F4A7C15ULL * (i + 1));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    return mix64(z);
  }

  // Unbiased draw from [0, n); n must be positive.
  uint64_t below(uint64_t n) {
    uint64_t reject = (0 - n) % n;  // 2^64 mod n
    uint64_t x = next();
    while (x < reject) x = next();
    return (x - reject) % n;
  }

  // Uniform in [0, 1) with 53 random bits.
  double unit() { return double(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[size_t(below(i))]);
    }
  }

 private:
  uint64_t state_;
};

}  // namespace lofdrf
