#include "sbesumm/sbe.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sbesumm/errors.hpp"
#include "sbesumm/kernels.hpp"
#include "sbesumm/rng.hpp"

namespace sbesumm::sbe {

namespace {

// Seed-stream tags.
constexpr uint64_t kTagProjectionRow = 1;
constexpr uint64_t kTagDither = 2;
constexpr uint64_t kTagCurveBase = 3;
constexpr uint64_t kTagCurveDirection = 4;

// Distance where the binned mean Hamming curve leaves the informative regime
// (crosses 0.45 on its way to the 0.5 plateau), expressed per the
// D* = delta/(sigma*sqrt(2/pi)) * c parameterization.  0.6512 * sqrt(2/pi).
constexpr double kElbowC = 0.5196;

constexpr double kSqrt2OverPi = 0.7978845608028654;

void check_positive_params(uint32_t l_dim, uint32_t m_bits, float delta,
                           float sigma) {
  if (l_dim < 1 || m_bits < 1) {
    throw BadParams("sbe: L and M must be positive");
  }
  if (!(delta > 0.0f) || !(sigma > 0.0f)) {
    throw BadParams("sbe: delta and sigma must be positive");
  }
}

// The float-exact quantization chain shared with the kernels; any change
// here must be mirrored in kernels_scalar.cpp and the SIMD variants.
inline bool quantize_value(float acc, float w, float delta) {
  const float t = (acc + w) / delta;
  const float fl = std::floor(t * 0.5f);
  const float frac = t - (fl + fl);
  return frac >= 1.0f;
}

}  // namespace

SbeParams generate_params(uint64_t seed, uint32_t l_dim, uint32_t m_bits,
                          float delta, float sigma) {
  check_positive_params(l_dim, m_bits, delta, sigma);
  SbeParams p;
  p.seed = seed;
  p.l_dim = l_dim;
  p.m_bits = m_bits;
  p.delta = delta;
  p.sigma = sigma;
  const uint32_t blocks = p.n_blocks();
  p.a.assign(static_cast<size_t>(blocks) * l_dim * 8, 0.0f);
  p.dither.assign(static_cast<size_t>(blocks) * 8, 0.0f);
  for (uint32_t m = 0; m < m_bits; ++m) {
    Rng row(derive_seed(seed, kTagProjectionRow, m));
    const size_t block = m >> 3;
    const size_t lane = m & 7;
    float* base = p.a.data() + block * l_dim * 8 + lane;
    for (uint32_t l = 0; l < l_dim; ++l) {
      base[static_cast<size_t>(l) * 8] = static_cast<float>(row.gaussian() * sigma);
    }
  }
  Rng dither(derive_seed(seed, kTagDither));
  for (uint32_t m = 0; m < m_bits; ++m) {
    p.dither[m] = static_cast<float>(dither.uniform() * delta);
  }
  return p;
}

bool quantize_bit(const SbeParams& params, std::span<const float> x, uint32_t m) {
  if (x.size() != params.l_dim) {
    throw DimensionMismatch("quantize_bit: |x| != L");
  }
  if (m >= params.m_bits) {
    throw BadParams("quantize_bit: measurement index out of range");
  }
  const size_t block = m >> 3;
  const size_t lane = m & 7;
  const float* a_lane = params.a.data() + block * params.l_dim * 8 + lane;
  const float acc = kernels::dot_strided8(a_lane, x.data(), params.l_dim);
  return quantize_value(acc, params.dither[m], params.delta);
}

BitHash hash(const SbeParams& params, std::span<const float> x) {
  if (x.size() != params.l_dim) {
    throw DimensionMismatch("hash: |x| != L");
  }
  const uint32_t blocks = params.n_blocks();
  std::vector<uint8_t> bytes(blocks);
  kernels::hash_blocks(params.a.data(), params.dither.data(), params.delta,
                       x.data(), params.l_dim, blocks, bytes.data());
  return BitHash::from_bytes(bytes, params.m_bits);
}

std::vector<BitHash> hash_columns(const SbeParams& params,
                                  std::span<const float> col_major,
                                  size_t n_cols) {
  if (col_major.size() != n_cols * static_cast<size_t>(params.l_dim)) {
    throw DimensionMismatch("hash_columns: buffer size != n_cols * L");
  }
  std::vector<BitHash> hashes;
  hashes.reserve(n_cols);
  for (size_t c = 0; c < n_cols; ++c) {
    hashes.push_back(hash(params, col_major.subspan(c * params.l_dim, params.l_dim)));
  }
  return hashes;
}

double hamming_normalized(const BitHash& h1, const BitHash& h2) {
  if (h1.n_bits != h2.n_bits) {
    throw DimensionMismatch("hamming_normalized: hash lengths differ");
  }
  if (h1.n_bits == 0) {
    throw BadParams("hamming_normalized: empty hashes");
  }
  const uint64_t diff =
      kernels::hamming_words(h1.words.data(), h2.words.data(), h1.words.size());
  return static_cast<double>(diff) / static_cast<double>(h1.n_bits);
}

std::vector<CurvePoint> embedding_curve(uint32_t l_dim, uint32_t m_bits,
                                        float delta, float sigma,
                                        size_t n_pairs, uint64_t seed) {
  check_positive_params(l_dim, m_bits, delta, sigma);
  if (n_pairs < 1) throw BadParams("embedding_curve: n_pairs must be >= 1");

  const SbeParams params = generate_params(seed, l_dim, m_bits, delta, sigma);
  const double d_max = 5.0 * static_cast<double>(delta) / sigma;
  std::vector<CurvePoint> points;
  points.reserve(n_pairs);
  std::vector<float> x(l_dim), y(l_dim);
  for (size_t i = 0; i < n_pairs; ++i) {
    Rng base(derive_seed(seed, kTagCurveBase, i));
    for (auto& v : x) v = static_cast<float>(base.gaussian());

    const double target = n_pairs == 1
                              ? 0.0
                              : d_max * static_cast<double>(i) /
                                    static_cast<double>(n_pairs - 1);
    if (target == 0.0) {
      y = x;
    } else {
      Rng dir(derive_seed(seed, kTagCurveDirection, i));
      std::vector<double> u(l_dim);
      double norm_sq = 0.0;
      for (auto& v : u) {
        v = dir.gaussian();
        norm_sq += v * v;
      }
      const double scale = target / std::sqrt(norm_sq);
      for (uint32_t l = 0; l < l_dim; ++l) {
        y[l] = static_cast<float>(x[l] + u[l] * scale);
      }
    }

    double d_sq = 0.0;
    for (uint32_t l = 0; l < l_dim; ++l) {
      const double diff = static_cast<double>(x[l]) - y[l];
      d_sq += diff * diff;
    }
    CurvePoint pt;
    pt.euclidean = std::sqrt(d_sq);
    pt.hamming = hamming_normalized(hash(params, x), hash(params, y));
    points.push_back(pt);
  }
  return points;
}

double informative_radius(double delta, double sigma) {
  return delta / (sigma * kSqrt2OverPi) * kElbowC;
}

namespace {

std::vector<double> pairwise_distances(std::span<const float> col_major,
                                       size_t n_cols, size_t dim) {
  if (n_cols < 2) {
    throw BadParams("leakage: need at least 2 vectors");
  }
  if (col_major.size() != n_cols * dim) {
    throw DimensionMismatch("leakage: buffer size != n_cols * dim");
  }
  std::vector<double> dists;
  dists.reserve(n_cols * (n_cols - 1) / 2);
  for (size_t i = 0; i < n_cols; ++i) {
    const float* a = col_major.data() + i * dim;
    for (size_t j = i + 1; j < n_cols; ++j) {
      const float* b = col_major.data() + j * dim;
      double s = 0.0;
      for (size_t l = 0; l < dim; ++l) {
        const double d = static_cast<double>(a[l]) - b[l];
        s += d * d;
      }
      dists.push_back(std::sqrt(s));
    }
  }
  return dists;
}

double leakage_at(const std::vector<double>& dists, double radius) {
  size_t below = 0;
  for (double d : dists) {
    if (d < radius) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(dists.size());
}

}  // namespace

double estimate_leakage(const SbeParams& params,
                        std::span<const float> col_major, size_t n_cols) {
  const auto dists = pairwise_distances(col_major, n_cols, params.l_dim);
  return leakage_at(dists, informative_radius(params.delta, params.sigma));
}

double calibrate_delta(std::span<const float> col_major, size_t n_cols,
                       size_t dim, double target, double tolerance,
                       double sigma) {
  if (!(target > 0.0) || target > 1.0) {
    throw BadParams("calibrate_delta: target must lie in (0, 1]");
  }
  if (tolerance < 0.0 || !(sigma > 0.0)) {
    throw BadParams("calibrate_delta: bad tolerance or sigma");
  }
  const auto dists = pairwise_distances(col_major, n_cols, dim);
  const double d_hi = *std::max_element(dists.begin(), dists.end());
  if (d_hi <= 0.0) {
    // all vectors identical; every pair distance is 0 and never < radius
    throw CalibrationFailed("calibrate_delta: all pairwise distances are zero");
  }
  // delta giving radius just past the largest distance, so leakage is 1
  const double to_delta = sigma * kSqrt2OverPi / kElbowC;
  const double delta_hi = d_hi * 1.000001 * to_delta;
  if (leakage_at(dists, informative_radius(delta_hi, sigma)) < 1.0) {
    throw CalibrationFailed("calibrate_delta: upper bracket failed");
  }
  if (target >= 1.0 - tolerance) return delta_hi;

  // leakage is a non-decreasing step function of delta; bisect, then accept
  // only if the step we land on is inside tolerance
  double lo = 0.0;
  double hi = delta_hi;
  double best = delta_hi;
  double best_err = std::abs(1.0 - target);
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double leak = leakage_at(dists, informative_radius(mid, sigma));
    const double err = std::abs(leak - target);
    if (err < best_err || (err == best_err && mid < best)) {
      best = mid;
      best_err = err;
    }
    if (leak > target) {
      hi = mid;
    } else if (leak < target) {
      lo = mid;
    } else {
      return mid;
    }
  }
  if (best_err <= tolerance) return best;
  std::ostringstream msg;
  msg << "calibrate_delta: nearest achievable leakage is " << best_err
      << " away from target " << target << " (tolerance " << tolerance << ")";
  throw CalibrationFailed(msg.str());
}

double nearest_delta_for_leakage(std::span<const float> col_major,
                                 size_t n_cols, size_t dim, double target,
                                 double sigma) {
  if (!(target > 0.0) || target > 1.0) {
    throw BadParams("nearest_delta_for_leakage: target must lie in (0, 1]");
  }
  if (!(sigma > 0.0)) {
    throw BadParams("nearest_delta_for_leakage: sigma must be positive");
  }
  if (n_cols < 2) return sigma;
  auto dists = pairwise_distances(col_major, n_cols, dim);
  std::sort(dists.begin(), dists.end());
  const size_t total = dists.size();
  if (dists.back() <= 0.0) return sigma;  // all columns identical

  // Candidate radii sit between distinct distance values; each candidate k
  // is the number of pairs it leaks.
  const double unit_radius = informative_radius(1.0, sigma);
  double best_delta = 0.0;
  double best_err = 2.0;
  // pairs at distance zero leak under every positive radius, so the floor
  // of achievable leakage sits above them
  size_t k = 0;
  while (dists[k] <= 0.0) ++k;
  while (k <= total) {
    double radius;
    if (k == 0) {
      radius = dists.front() * 0.5;
    } else if (k == total) {
      radius = dists.back() * 1.000001;
    } else {
      if (dists[k] == dists[k - 1]) {
        // tied distances make this k unreachable; skip past the tie run
        ++k;
        continue;
      }
      radius = 0.5 * (dists[k - 1] + dists[k]);
    }
    const double leak = static_cast<double>(k) / static_cast<double>(total);
    const double err = std::abs(leak - target);
    if (err < best_err || (err == best_err && leak > target)) {
      best_err = err;
      best_delta = radius / unit_radius;
    }
    ++k;
  }
  return best_delta;
}

namespace {

void put_u32_be(std::ostream& out, uint32_t v) {
  const uint8_t bytes[4] = {static_cast<uint8_t>(v >> 24),
                            static_cast<uint8_t>(v >> 16),
                            static_cast<uint8_t>(v >> 8),
                            static_cast<uint8_t>(v)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

uint32_t get_u32_be(std::istream& in) {
  uint8_t bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw InputFormatError("hash file: truncated integer");
  return (uint32_t{bytes[0]} << 24) | (uint32_t{bytes[1]} << 16) |
         (uint32_t{bytes[2]} << 8) | uint32_t{bytes[3]};
}

constexpr char kMagic[4] = {'S', 'B', 'E', '1'};

}  // namespace

void write_hash_file(std::ostream& out, const HashFile& file) {
  if (file.roles.size() != file.hashes.size()) {
    throw BadParams("hash file: roles/hashes size mismatch");
  }
  out.write(kMagic, 4);
  put_u32_be(out, file.m_bits);
  put_u32_be(out, static_cast<uint32_t>(file.roles.size()));
  for (uint8_t r : file.roles) {
    if (r > 1) throw BadParams("hash file: role must be 0 or 1");
    out.put(static_cast<char>(r));
  }
  for (const BitHash& h : file.hashes) {
    if (h.n_bits != file.m_bits) {
      throw BadParams("hash file: hash length != M");
    }
    const auto bytes = h.to_bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw TransportError("hash file: write failed");
}

HashFile read_hash_file(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw InputFormatError("hash file: bad magic");
  }
  HashFile file;
  file.m_bits = get_u32_be(in);
  const uint32_t n_cols = get_u32_be(in);
  if (file.m_bits == 0) throw InputFormatError("hash file: M is zero");
  file.roles.resize(n_cols);
  if (n_cols > 0) {
    in.read(reinterpret_cast<char*>(file.roles.data()), n_cols);
    if (!in) throw InputFormatError("hash file: truncated roles");
  }
  for (uint8_t r : file.roles) {
    if (r > 1) throw InputFormatError("hash file: role byte must be 0 or 1");
  }
  const size_t n_bytes = (static_cast<size_t>(file.m_bits) + 7) / 8;
  std::vector<uint8_t> buf(n_bytes);
  file.hashes.reserve(n_cols);
  for (uint32_t c = 0; c < n_cols; ++c) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(n_bytes));
    if (!in) throw InputFormatError("hash file: truncated hash data");
    file.hashes.push_back(BitHash::from_bytes(buf, file.m_bits));
  }
  return file;
}

void write_hash_file(const std::string& path, const HashFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TransportError("hash file: cannot open for write: " + path);
  write_hash_file(out, file);
}

HashFile read_hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputFormatError("hash file: cannot open: " + path);
  return read_hash_file(in);
}

}  // namespace sbesumm::sbe
