#include "sbesumm/kernels.hpp"

#include <bit>
#include <cmath>

// Compiled with -ffp-contract=off: the multiply and add below must stay
// separate roundings so SIMD variants (explicit mul + add) match bit for bit.

namespace sbesumm::kernels::detail {

namespace {

inline uint8_t quantize_lanes(const float* acc, const float* dither,
                              float delta) {
  uint8_t byte = 0;
  for (int j = 0; j < 8; ++j) {
    float t = (acc[j] + dither[j]) / delta;
    float fl = std::floor(t * 0.5f);
    float frac = t - (fl + fl);  // t mod 2, in [0, 2)
    if (frac >= 1.0f) byte |= static_cast<uint8_t>(1u << j);
  }
  return byte;
}

}  // namespace

void hash_blocks_scalar(const float* a, const float* dither, float delta,
                        const float* x, size_t len, size_t n_blocks,
                        uint8_t* out) {
  for (size_t b = 0; b < n_blocks; ++b) {
    const float* ab = a + b * len * 8;
    float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    for (size_t l = 0; l < len; ++l) {
      const float xv = x[l];
      for (int j = 0; j < 8; ++j) {
        acc[j] += ab[l * 8 + j] * xv;
      }
    }
    out[b] = quantize_lanes(acc, dither + b * 8, delta);
  }
}

uint64_t hamming_words_scalar(const uint64_t* a, const uint64_t* b,
                              size_t n_words) {
  uint64_t sum = 0;
  for (size_t i = 0; i < n_words; ++i) {
    sum += static_cast<uint64_t>(std::popcount(a[i] ^ b[i]));
  }
  return sum;
}

}  // namespace sbesumm::kernels::detail

namespace sbesumm::kernels {

float dot_strided8(const float* a_lane, const float* x, size_t len) {
  float acc = 0.0f;
  for (size_t l = 0; l < len; ++l) {
    acc += a_lane[l * 8] * x[l];
  }
  return acc;
}

}  // namespace sbesumm::kernels
