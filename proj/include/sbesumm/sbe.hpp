#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sbesumm/bitvec.hpp"

namespace sbesumm::sbe {

// Dithered Gaussian projection with universal 1-bit quantization.  The
// projection rows are stored lane-interleaved in blocks of 8 measurements
// (see kernels.hpp for the layout contract); rows past m_bits are zero, as is
// their dither, so padding lanes always quantize to 0.
struct SbeParams {
  uint64_t seed = 0;
  uint32_t l_dim = 0;   // input dimensionality
  uint32_t m_bits = 0;  // measurements = hash bits
  float delta = 0.0f;   // quantization precision, one scalar for all rows
  float sigma = 0.0f;   // std-dev of projection entries
  std::vector<float> a;       // n_blocks * l_dim * 8, blocked layout
  std::vector<float> dither;  // n_blocks * 8, uniform [0, delta), pads zero

  uint32_t n_blocks() const { return (m_bits + 7) / 8; }
};

// Deterministic for fixed arguments; rows draw from independent seed-derived
// streams so any prefix of rows is stable under changes to M.
SbeParams generate_params(uint64_t seed, uint32_t l_dim, uint32_t m_bits,
                          float delta, float sigma = 1.0f);

// Single measurement: floor(((a_m.x + w_m)/delta) mod 2), mod into [0,2).
// Matches hash() bit-for-bit.
bool quantize_bit(const SbeParams& params, std::span<const float> x, uint32_t m);

// All M measurements, packed.
BitHash hash(const SbeParams& params, std::span<const float> x);

// Hash every column of a column-major [l_dim x n_cols] buffer.
std::vector<BitHash> hash_columns(const SbeParams& params,
                                  std::span<const float> col_major,
                                  size_t n_cols);

// (# differing bits) / M.
double hamming_normalized(const BitHash& h1, const BitHash& h2);

// One point per sampled pair: true Euclidean distance against normalized
// Hamming distance of the hashes.  Pair i is placed at distance
// d_max * i/(n_pairs-1) with d_max = 5*delta/sigma, which spans the
// informative region and runs well past saturation.
struct CurvePoint {
  double euclidean = 0.0;
  double hamming = 0.0;
};
std::vector<CurvePoint> embedding_curve(uint32_t l_dim, uint32_t m_bits,
                                        float delta, float sigma,
                                        size_t n_pairs, uint64_t seed);

// Largest Euclidean distance at which hashes still track distance; beyond it
// the expected Hamming distance has flattened onto the 0.5 plateau.  The
// elbow constant is frozen from embedding-curve calibration (the binned mean
// crosses 0.45 at 0.6512 * delta/sigma; see tests/test_sbe.cpp).
double informative_radius(double delta, double sigma);

// Fraction of unordered column pairs closer than informative_radius.
// `col_major` holds n_cols columns of params.l_dim floats each.
double estimate_leakage(const SbeParams& params,
                        std::span<const float> col_major, size_t n_cols);

// Bisection on delta until the leakage of the sample is within `tolerance`
// of `target` (target in (0,1]).  Leakage is a step function of delta, so a
// target whose nearest step is out of tolerance raises CalibrationFailed.
double calibrate_delta(std::span<const float> col_major, size_t n_cols,
                       size_t dim, double target, double tolerance,
                       double sigma = 1.0);

// Tolerance-free variant: the delta whose leakage lands on the achievable
// step nearest to `target` (ties resolve toward more leakage).  Small
// samples have coarse steps, so this never fails; degenerate samples (one
// column, or all columns identical) get sigma as a neutral default.
double nearest_delta_for_leakage(std::span<const float> col_major,
                                 size_t n_cols, size_t dim, double target,
                                 double sigma = 1.0);

// Hash container file: magic "SBE1", then M and the column count as 32-bit
// big-endian integers, one role byte per column (1 = passage, 0 = key
// phrase), then each column's packed bits, ceil(M/8) bytes per column.  The
// owner's secrets (seed, delta, A, dither) never appear here.
struct HashFile {
  uint32_t m_bits = 0;
  std::vector<uint8_t> roles;
  std::vector<BitHash> hashes;
};

void write_hash_file(std::ostream& out, const HashFile& file);
HashFile read_hash_file(std::istream& in);
void write_hash_file(const std::string& path, const HashFile& file);
HashFile read_hash_file(const std::string& path);

}  // namespace sbesumm::sbe
