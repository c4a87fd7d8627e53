#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops: quantized random projection and packed-bit
// Hamming distance.  Scalar reference kernels plus SIMD variants selected at
// runtime; every variant is bit-identical to the scalar reference (the
// projection uses per-lane sequential accumulation with explicit
// multiply-then-add, so no reassociation or contraction is involved).

namespace sbesumm::kernels {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);

// Best ISA this CPU supports.
Isa best_supported();

// Currently selected ISA.  Initialized once from best_supported(), or from
// the SBESUMM_KERNELS environment variable (scalar|avx2|neon|auto) when set.
Isa active();

// Select an ISA explicitly; unsupported requests fall back to scalar.
// Returns the ISA actually selected.
Isa force(Isa isa);

// Projection matrix layout: measurements are grouped by 8 into blocks, and a
// block stores its 8 rows lane-interleaved:
//
//   a[(block*len + l)*8 + lane] = A[8*block + lane][l]
//
// hash_blocks computes, for every block b and lane j (measurement
// m = 8b + j):
//
//   t  = (sum_l A[m][l]*x[l] + dither[8b+j]) / delta
//   bit = floor(t mod 2), with mod taken into [0, 2)
//
// and packs bit into out[b] at position j (little-endian within the byte).
void hash_blocks(const float* a, const float* dither, float delta,
                 const float* x, size_t len, size_t n_blocks, uint8_t* out);

// Dot product of one lane-interleaved row (stride 8) against x, accumulated
// sequentially.  Single-measurement reference path; matches the per-lane
// arithmetic of hash_blocks exactly.
float dot_strided8(const float* a_lane, const float* x, size_t len);

// Number of set bits in (a XOR b) over n_words 64-bit words.
uint64_t hamming_words(const uint64_t* a, const uint64_t* b, size_t n_words);

namespace detail {

void hash_blocks_scalar(const float* a, const float* dither, float delta,
                        const float* x, size_t len, size_t n_blocks,
                        uint8_t* out);
uint64_t hamming_words_scalar(const uint64_t* a, const uint64_t* b,
                              size_t n_words);

#if defined(SBESUMM_KERNELS_AVX2)
void hash_blocks_avx2(const float* a, const float* dither, float delta,
                      const float* x, size_t len, size_t n_blocks,
                      uint8_t* out);
uint64_t hamming_words_avx2(const uint64_t* a, const uint64_t* b,
                            size_t n_words);
#endif

#if defined(SBESUMM_KERNELS_NEON)
void hash_blocks_neon(const float* a, const float* dither, float delta,
                      const float* x, size_t len, size_t n_blocks,
                      uint8_t* out);
uint64_t hamming_words_neon(const uint64_t* a, const uint64_t* b,
                            size_t n_words);
#endif

}  // namespace detail

}  // namespace sbesumm::kernels
