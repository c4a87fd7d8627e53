#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sbesumm {

// splitmix64 finalizer; stream seeds are derived with it so that distinct
// (seed, tag) pairs give statistically independent generators.
constexpr uint64_t mix64(uint64_t v) {
  v += 0x9e3779b97f4a7c15ull;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
  return v ^ (v >> 31);
}

constexpr uint64_t derive_seed(uint64_t seed, uint64_t tag) {
  return mix64(mix64(seed) ^ mix64(tag));
}

constexpr uint64_t derive_seed(uint64_t seed, uint64_t tag, uint64_t sub) {
  return derive_seed(derive_seed(seed, tag), sub);
}

// Deterministic stream: mt19937_64 plus explicit Box-Muller, so the byte
// sequence does not depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal; pairs generated by Box-Muller, second value cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n); n must be nonzero.
  uint64_t below(uint64_t n) {
    uint64_t threshold = -n % n;
    for (;;) {
      uint64_t v = eng_();
      if (v >= threshold) return v % n;
    }
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sbesumm
