#include "sbesumm/kernels.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace sbesumm::kernels {

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

Isa best_supported() {
#if defined(SBESUMM_KERNELS_AVX2)
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
#if defined(SBESUMM_KERNELS_NEON)
  return Isa::neon;
#endif
  return Isa::scalar;
}

namespace {

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SBESUMM_KERNELS_AVX2)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Isa::neon:
#if defined(SBESUMM_KERNELS_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa from_env() {
  const char* v = std::getenv("SBESUMM_KERNELS");
  if (v == nullptr || std::strcmp(v, "auto") == 0) return best_supported();
  Isa want = Isa::scalar;
  if (std::strcmp(v, "scalar") == 0) {
    want = Isa::scalar;
  } else if (std::strcmp(v, "avx2") == 0) {
    want = Isa::avx2;
  } else if (std::strcmp(v, "neon") == 0) {
    want = Isa::neon;
  } else {
    std::fprintf(stderr, "sbesumm: unknown SBESUMM_KERNELS value '%s', using auto\n", v);
    return best_supported();
  }
  if (!supported(want)) {
    std::fprintf(stderr, "sbesumm: SBESUMM_KERNELS=%s not supported here, using scalar\n", v);
    return Isa::scalar;
  }
  return want;
}

std::atomic<Isa> g_active{from_env()};

}  // namespace

Isa active() { return g_active.load(std::memory_order_relaxed); }

Isa force(Isa isa) {
  Isa chosen = supported(isa) ? isa : Isa::scalar;
  g_active.store(chosen, std::memory_order_relaxed);
  return chosen;
}

void hash_blocks(const float* a, const float* dither, float delta,
                 const float* x, size_t len, size_t n_blocks, uint8_t* out) {
  switch (active()) {
#if defined(SBESUMM_KERNELS_AVX2)
    case Isa::avx2:
      detail::hash_blocks_avx2(a, dither, delta, x, len, n_blocks, out);
      return;
#endif
#if defined(SBESUMM_KERNELS_NEON)
    case Isa::neon:
      detail::hash_blocks_neon(a, dither, delta, x, len, n_blocks, out);
      return;
#endif
    default:
      detail::hash_blocks_scalar(a, dither, delta, x, len, n_blocks, out);
      return;
  }
}

uint64_t hamming_words(const uint64_t* a, const uint64_t* b, size_t n_words) {
  switch (active()) {
#if defined(SBESUMM_KERNELS_AVX2)
    case Isa::avx2:
      return detail::hamming_words_avx2(a, b, n_words);
#endif
#if defined(SBESUMM_KERNELS_NEON)
    case Isa::neon:
      return detail::hamming_words_neon(a, b, n_words);
#endif
    default:
      return detail::hamming_words_scalar(a, b, n_words);
  }
}

}  // namespace sbesumm::kernels
