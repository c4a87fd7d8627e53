#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbesumm/bitvec.hpp"
#include "sbesumm/textmodel.hpp"

namespace sbesumm::centrality {

enum class Metric { cosine, euclidean, hamming };

// Support-set membership can be counted over every column's support set or
// only over sets owned by real passages; the former is the default.
enum class MembershipScope { all_columns, passages_only };

// Threshold policy for support-set construction.  Only the mean-distance
// rule is defined; the enum leaves room for alternatives.
enum class EpsilonPolicy { mean_distance };

// Dense symmetric distance matrix, row-major n x n.  Cosine distance is
// 1 - a.b/(|a||b|); a zero-norm column under cosine is DegenerateColumn.
std::vector<double> pairwise_distances(const text::CompactMatrix& m,
                                       Metric metric);

// Same layout over packed hashes (normalized Hamming distance).
std::vector<double> pairwise_hamming(const std::vector<sbe::BitHash>& hashes);

struct SupportSet {
  uint32_t owner = 0;
  std::vector<uint32_t> members;  // ascending, never contains owner
};

// S_i = { s != i : d(s, i) < eps_i } with eps_i the mean distance from i to
// every other column.  Strict inequality, so equidistant columns yield empty
// sets; a single column yields one empty set.
std::vector<SupportSet> compute_support_sets(
    std::span<const double> distances, size_t n,
    EpsilonPolicy policy = EpsilonPolicy::mean_distance);

struct Ranking {
  std::vector<uint32_t> order;   // passage column indices, most central first
  std::vector<uint32_t> counts;  // support-set membership count, aligned with order
};

// Scores column s by |{ i : s in S_i }| and ranks the passage columns only
// (key-phrase columns are artificial and never appear in the output).  Ties
// break toward the lower passage index.
Ranking rank_passages(const std::vector<SupportSet>& sets, uint32_t n_passages,
                      uint32_t n_keyphrases,
                      MembershipScope scope = MembershipScope::all_columns);

// General form over an arbitrary passage mask (true = rankable passage);
// used by the hash path where roles arrive as a per-column flag array.
Ranking rank_columns(const std::vector<SupportSet>& sets,
                     const std::vector<bool>& is_passage,
                     MembershipScope scope = MembershipScope::all_columns);

// Walks the ranking and keeps passages until the next one would push the
// total word count past `size_budget`; the top passage is always kept.
// Returns the kept indices in ascending order.
std::vector<uint32_t> select_by_budget(const Ranking& ranking,
                                       std::span<const std::string> passage_texts,
                                       size_t size_budget);

struct Summary {
  std::vector<uint32_t> indices;   // ascending original passage positions
  std::vector<std::string> texts;  // aligned with indices
  size_t word_total = 0;
};

// Full single-input pipeline over a prepared matrix: distances, support
// sets, ranking, budgeted selection.  Plaintext metrics only.
Summary summarize_single(const text::CompactMatrix& m, Metric metric,
                         size_t size_budget);

// Ranking halves of summarize_single, shared with the two-party paths.
Ranking rank_plaintext(const text::CompactMatrix& m, Metric metric,
                       MembershipScope scope = MembershipScope::all_columns);
// Role byte per column: 1 = passage (rankable), 0 = key phrase.
Ranking rank_hashes(const std::vector<sbe::BitHash>& hashes,
                    std::span<const uint8_t> roles,
                    MembershipScope scope = MembershipScope::all_columns);

}  // namespace sbesumm::centrality
