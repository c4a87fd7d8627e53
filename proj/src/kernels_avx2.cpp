#include "sbesumm/kernels.hpp"

#if defined(SBESUMM_KERNELS_AVX2)

#include <immintrin.h>

namespace sbesumm::kernels::detail {

void hash_blocks_avx2(const float* a, const float* dither, float delta,
                      const float* x, size_t len, size_t n_blocks,
                      uint8_t* out) {
  const __m256 vdelta = _mm256_set1_ps(delta);
  const __m256 vhalf = _mm256_set1_ps(0.5f);
  const __m256 vone = _mm256_set1_ps(1.0f);
  for (size_t b = 0; b < n_blocks; ++b) {
    const float* ab = a + b * len * 8;
    __m256 acc = _mm256_setzero_ps();
    for (size_t l = 0; l < len; ++l) {
      const __m256 av = _mm256_loadu_ps(ab + l * 8);
      const __m256 xv = _mm256_set1_ps(x[l]);
      // mul + add kept separate; matches the scalar reference rounding
      acc = _mm256_add_ps(acc, _mm256_mul_ps(av, xv));
    }
    const __m256 w = _mm256_loadu_ps(dither + b * 8);
    const __m256 t = _mm256_div_ps(_mm256_add_ps(acc, w), vdelta);
    const __m256 fl = _mm256_floor_ps(_mm256_mul_ps(t, vhalf));
    const __m256 frac = _mm256_sub_ps(t, _mm256_add_ps(fl, fl));
    const __m256 ge = _mm256_cmp_ps(frac, vone, _CMP_GE_OQ);
    out[b] = static_cast<uint8_t>(_mm256_movemask_ps(ge));
  }
}

namespace {

// vpshufb nibble-LUT popcount over one 256-bit lane of xor'ed words.
inline __m256i popcount_bytes(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2,
                                       3, 3, 4, 0, 1, 1, 2, 1, 2, 2, 3, 1, 2,
                                       2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  return _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo),
                         _mm256_shuffle_epi8(lut, hi));
}

}  // namespace

uint64_t hamming_words_avx2(const uint64_t* a, const uint64_t* b,
                            size_t n_words) {
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 4 <= n_words; i += 4) {
    const __m256i va =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i counts = popcount_bytes(_mm256_xor_si256(va, vb));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(counts, _mm256_setzero_si256()));
  }
  alignas(32) uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  uint64_t sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n_words; ++i) {
    sum += static_cast<uint64_t>(__builtin_popcountll(a[i] ^ b[i]));
  }
  return sum;
}

}  // namespace sbesumm::kernels::detail

#endif  // SBESUMM_KERNELS_AVX2
