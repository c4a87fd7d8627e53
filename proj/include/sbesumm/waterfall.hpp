#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sbesumm/centrality.hpp"
#include "sbesumm/textmodel.hpp"

namespace sbesumm::waterfall {

// Synthetic document produced by merging two intermediate summaries; the
// passage list is authoritative (re-splitting doc.text is not guaranteed to
// reproduce it, since source passages may lack terminators).
struct MergedDoc {
  text::Document doc;  // text = passages joined by newline
  std::vector<text::Passage> passages;
};

// a's passages first, then b's, de-duplicated on exact text (first
// occurrence kept).  Both empty is EmptyInput.
MergedDoc merge_intermediate(std::span<const std::string> a,
                             std::span<const std::string> b);

// Produces the ranking for one summarization step.  `round` counts steps
// across the whole cascade (per-document summaries first, then merges), so a
// secure ranker can derive fresh per-round secrets from it.
using Ranker =
    std::function<centrality::Ranking(const text::CompactMatrix&, uint32_t round)>;

// A ranker evaluating the given plaintext metric locally.
Ranker plaintext_ranker(centrality::Metric metric);

// Chronological cascade: per-document intermediate summaries (each capped at
// size_budget), then left-fold merge-and-resummarize in order_key order.
// The key-phrase pool is filtered per step to phrases occurring in that
// step's input.  Throws EmptyCorpus on an empty document list.
centrality::Summary run_cascade(const std::vector<text::Document>& docs,
                                const std::vector<text::KeyPhrase>& pool,
                                size_t size_budget, const Ranker& ranker);

// Full multi-document pipeline: corpus-wide key-phrase extraction, then the
// cascade with a plaintext ranker.
centrality::Summary summarize_multi(const std::vector<text::Document>& docs,
                                    size_t kp_budget, size_t size_budget,
                                    centrality::Metric metric);

// Number of ranking rounds a cascade over n_docs performs: one per document
// plus one per merge step.
constexpr uint32_t cascade_rounds(uint32_t n_docs) {
  return n_docs == 0 ? 0 : 2 * n_docs - 1;
}

}  // namespace sbesumm::waterfall
