#include "sbesumm/kernels.hpp"

#if defined(SBESUMM_KERNELS_NEON)

#include <arm_neon.h>

namespace sbesumm::kernels::detail {

void hash_blocks_neon(const float* a, const float* dither, float delta,
                      const float* x, size_t len, size_t n_blocks,
                      uint8_t* out) {
  const float32x4_t vdelta = vdupq_n_f32(delta);
  const float32x4_t vhalf = vdupq_n_f32(0.5f);
  const float32x4_t vone = vdupq_n_f32(1.0f);
  for (size_t b = 0; b < n_blocks; ++b) {
    const float* ab = a + b * len * 8;
    float32x4_t acc_lo = vdupq_n_f32(0.0f);
    float32x4_t acc_hi = vdupq_n_f32(0.0f);
    for (size_t l = 0; l < len; ++l) {
      const float32x4_t xv = vdupq_n_f32(x[l]);
      // explicit mul + add; vmlaq could fuse, which would break the
      // bit-exact contract with the scalar reference
      acc_lo = vaddq_f32(acc_lo, vmulq_f32(vld1q_f32(ab + l * 8), xv));
      acc_hi = vaddq_f32(acc_hi, vmulq_f32(vld1q_f32(ab + l * 8 + 4), xv));
    }
    const float32x4_t t_lo =
        vdivq_f32(vaddq_f32(acc_lo, vld1q_f32(dither + b * 8)), vdelta);
    const float32x4_t t_hi =
        vdivq_f32(vaddq_f32(acc_hi, vld1q_f32(dither + b * 8 + 4)), vdelta);
    const float32x4_t fl_lo = vrndmq_f32(vmulq_f32(t_lo, vhalf));
    const float32x4_t fl_hi = vrndmq_f32(vmulq_f32(t_hi, vhalf));
    const float32x4_t frac_lo = vsubq_f32(t_lo, vaddq_f32(fl_lo, fl_lo));
    const float32x4_t frac_hi = vsubq_f32(t_hi, vaddq_f32(fl_hi, fl_hi));
    const uint32x4_t ge_lo = vcgeq_f32(frac_lo, vone);
    const uint32x4_t ge_hi = vcgeq_f32(frac_hi, vone);
    uint32_t lanes[8];
    vst1q_u32(lanes, ge_lo);
    vst1q_u32(lanes + 4, ge_hi);
    uint8_t byte = 0;
    for (int j = 0; j < 8; ++j) {
      if (lanes[j]) byte |= static_cast<uint8_t>(1u << j);
    }
    out[b] = byte;
  }
}

uint64_t hamming_words_neon(const uint64_t* a, const uint64_t* b,
                            size_t n_words) {
  uint64_t sum = 0;
  size_t i = 0;
  for (; i + 2 <= n_words; i += 2) {
    const uint8x16_t va = vld1q_u8(reinterpret_cast<const uint8_t*>(a + i));
    const uint8x16_t vb = vld1q_u8(reinterpret_cast<const uint8_t*>(b + i));
    sum += vaddvq_u8(vcntq_u8(veorq_u8(va, vb)));
  }
  for (; i < n_words; ++i) {
    sum += static_cast<uint64_t>(__builtin_popcountll(a[i] ^ b[i]));
  }
  return sum;
}

}  // namespace sbesumm::kernels::detail

#endif  // SBESUMM_KERNELS_NEON
