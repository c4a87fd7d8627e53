#include "sbesumm/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sbesumm/errors.hpp"
#include "sbesumm/sbe.hpp"

namespace sbesumm::centrality {

namespace {

double column_distance(std::span<const float> a, std::span<const float> b,
                       Metric metric) {
  if (metric == Metric::cosine) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t t = 0; t < a.size(); ++t) {
      dot += static_cast<double>(a[t]) * b[t];
      na += static_cast<double>(a[t]) * a[t];
      nb += static_cast<double>(b[t]) * b[t];
    }
    if (na == 0.0 || nb == 0.0) {
      throw DegenerateColumn("cosine distance: zero-norm column");
    }
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
  }
  double s = 0.0;
  for (size_t t = 0; t < a.size(); ++t) {
    const double d = static_cast<double>(a[t]) - b[t];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

std::vector<double> pairwise_distances(const text::CompactMatrix& m,
                                       Metric metric) {
  if (metric == Metric::hamming) {
    throw BadParams("pairwise_distances: hamming needs hashed columns");
  }
  const size_t n = m.n_columns();
  std::vector<double> d(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double v = column_distance(m.column(static_cast<uint32_t>(i)),
                                       m.column(static_cast<uint32_t>(j)), metric);
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return d;
}

std::vector<double> pairwise_hamming(const std::vector<sbe::BitHash>& hashes) {
  const size_t n = hashes.size();
  std::vector<double> d(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double v = sbe::hamming_normalized(hashes[i], hashes[j]);
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return d;
}

std::vector<SupportSet> compute_support_sets(std::span<const double> distances,
                                             size_t n, EpsilonPolicy policy) {
  if (policy != EpsilonPolicy::mean_distance) {
    throw BadParams("compute_support_sets: unknown policy");
  }
  if (distances.size() != n * n) {
    throw DimensionMismatch("compute_support_sets: matrix size != n*n");
  }
  std::vector<SupportSet> sets(n);
  for (size_t i = 0; i < n; ++i) {
    sets[i].owner = static_cast<uint32_t>(i);
    if (n < 2) continue;
    double sum = 0.0;
    for (size_t s = 0; s < n; ++s) {
      if (s != i) sum += distances[i * n + s];
    }
    const double eps = sum / static_cast<double>(n - 1);
    for (size_t s = 0; s < n; ++s) {
      if (s != i && distances[i * n + s] < eps) {
        sets[i].members.push_back(static_cast<uint32_t>(s));
      }
    }
  }
  return sets;
}

Ranking rank_columns(const std::vector<SupportSet>& sets,
                     const std::vector<bool>& is_passage,
                     MembershipScope scope) {
  const size_t n = is_passage.size();
  std::vector<uint32_t> score(n, 0);
  for (const SupportSet& set : sets) {
    if (scope == MembershipScope::passages_only &&
        (set.owner >= n || !is_passage[set.owner])) {
      continue;
    }
    for (uint32_t s : set.members) {
      if (s < n) ++score[s];
    }
  }
  Ranking r;
  for (uint32_t c = 0; c < n; ++c) {
    if (is_passage[c]) r.order.push_back(c);
  }
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](uint32_t a, uint32_t b) { return score[a] > score[b]; });
  r.counts.reserve(r.order.size());
  for (uint32_t c : r.order) r.counts.push_back(score[c]);
  return r;
}

Ranking rank_passages(const std::vector<SupportSet>& sets, uint32_t n_passages,
                      uint32_t n_keyphrases, MembershipScope scope) {
  std::vector<bool> is_passage(static_cast<size_t>(n_passages) + n_keyphrases, false);
  for (uint32_t c = 0; c < n_passages; ++c) is_passage[c] = true;
  return rank_columns(sets, is_passage, scope);
}

std::vector<uint32_t> select_by_budget(const Ranking& ranking,
                                       std::span<const std::string> passage_texts,
                                       size_t size_budget) {
  std::vector<uint32_t> chosen;
  size_t words = 0;
  for (uint32_t idx : ranking.order) {
    const size_t w = text::word_count(passage_texts[idx]);
    if (!chosen.empty() && words + w > size_budget) break;
    chosen.push_back(idx);
    words += w;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

Ranking rank_plaintext(const text::CompactMatrix& m, Metric metric,
                       MembershipScope scope) {
  const auto distances = pairwise_distances(m, metric);
  const auto sets = compute_support_sets(distances, m.n_columns());
  return rank_passages(sets, m.n_passages, m.n_keyphrases, scope);
}

Ranking rank_hashes(const std::vector<sbe::BitHash>& hashes,
                    std::span<const uint8_t> roles, MembershipScope scope) {
  if (hashes.size() != roles.size()) {
    throw DimensionMismatch("rank_hashes: roles/hashes size mismatch");
  }
  const auto distances = pairwise_hamming(hashes);
  const auto sets = compute_support_sets(distances, hashes.size());
  std::vector<bool> is_passage(roles.size());
  for (size_t c = 0; c < roles.size(); ++c) is_passage[c] = roles[c] != 0;
  return rank_columns(sets, is_passage, scope);
}

Summary summarize_single(const text::CompactMatrix& m, Metric metric,
                         size_t size_budget) {
  if (m.n_passages == 0) {
    throw EmptyInput("summarize_single: no passages");
  }
  const Ranking ranking = rank_plaintext(m, metric);
  const std::span<const std::string> texts(m.column_texts.data(), m.n_passages);
  Summary summary;
  summary.indices = select_by_budget(ranking, texts, size_budget);
  for (uint32_t idx : summary.indices) {
    summary.texts.push_back(m.column_texts[idx]);
    summary.word_total += text::word_count(m.column_texts[idx]);
  }
  return summary;
}

}  // namespace sbesumm::centrality
