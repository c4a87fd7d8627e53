#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sbesumm::sbe {

// Packed bit sequence.  Bit m lives in words[m/64] at position m%64
// (little-endian bit order within a word); bits past n_bits are zero.
struct BitHash {
  uint32_t n_bits = 0;
  std::vector<uint64_t> words;

  static BitHash zeros(uint32_t n) {
    return BitHash{n, std::vector<uint64_t>((n + 63) / 64, 0)};
  }

  bool bit(uint32_t m) const { return (words[m >> 6] >> (m & 63)) & 1u; }

  void set_bit(uint32_t m, bool v) {
    const uint64_t mask = uint64_t{1} << (m & 63);
    if (v) {
      words[m >> 6] |= mask;
    } else {
      words[m >> 6] &= ~mask;
    }
  }

  // Canonical byte image: byte k carries bits 8k..8k+7.
  std::vector<uint8_t> to_bytes() const {
    std::vector<uint8_t> bytes((n_bits + 7) / 8, 0);
    for (size_t k = 0; k < bytes.size(); ++k) {
      bytes[k] = static_cast<uint8_t>(words[k >> 3] >> ((k & 7) * 8));
    }
    return bytes;
  }

  static BitHash from_bytes(std::span<const uint8_t> bytes, uint32_t n_bits) {
    BitHash h = zeros(n_bits);
    const size_t n_bytes = (static_cast<size_t>(n_bits) + 7) / 8;
    for (size_t k = 0; k < n_bytes && k < bytes.size(); ++k) {
      h.words[k >> 3] |= uint64_t{bytes[k]} << ((k & 7) * 8);
    }
    // clear padding past n_bits
    if (n_bits % 64 != 0 && !h.words.empty()) {
      h.words.back() &= (uint64_t{1} << (n_bits % 64)) - 1;
    }
    return h;
  }

  friend bool operator==(const BitHash&, const BitHash&) = default;
};

}  // namespace sbesumm::sbe
