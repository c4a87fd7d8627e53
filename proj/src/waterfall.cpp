#include "sbesumm/waterfall.hpp"

#include <algorithm>
#include <unordered_set>

#include "sbesumm/errors.hpp"

namespace sbesumm::waterfall {

MergedDoc merge_intermediate(std::span<const std::string> a,
                             std::span<const std::string> b) {
  if (a.empty() && b.empty()) {
    throw EmptyInput("merge_intermediate: both summaries empty");
  }
  MergedDoc merged;
  merged.doc.id = "merged";
  std::unordered_set<std::string> seen;
  auto push = [&](const std::string& text) {
    if (!seen.insert(text).second) return;
    text::Passage p;
    p.index = static_cast<uint32_t>(merged.passages.size());
    p.text = text;
    p.tokens = text::tokenize(text);
    if (!merged.doc.text.empty()) merged.doc.text += '\n';
    merged.doc.text += text;
    merged.passages.push_back(std::move(p));
  };
  for (const std::string& t : a) push(t);
  for (const std::string& t : b) push(t);
  return merged;
}

namespace {

// One summarization step: filter the phrase pool to this input, build the
// matrix, rank, select.  Passages with no tokens are dropped by the matrix
// build; indices in the result refer to positions in `passages`.
centrality::Summary summarize_step(const std::vector<text::Passage>& passages,
                                   const std::vector<text::KeyPhrase>& pool,
                                   size_t size_budget, const Ranker& ranker,
                                   uint32_t round) {
  std::vector<std::string> input_tokens;
  for (const text::Passage& p : passages) {
    input_tokens.insert(input_tokens.end(), p.tokens.begin(), p.tokens.end());
  }
  const auto phrases = text::filter_key_phrases_for_input(pool, input_tokens);
  const auto matrix = text::build_compact_matrix(passages, phrases);
  const auto ranking = ranker(matrix, round);
  const std::span<const std::string> texts(matrix.column_texts.data(),
                                           matrix.n_passages);
  centrality::Summary summary;
  summary.indices = centrality::select_by_budget(ranking, texts, size_budget);
  for (uint32_t idx : summary.indices) {
    summary.texts.push_back(matrix.column_texts[idx]);
    summary.word_total += text::word_count(matrix.column_texts[idx]);
  }
  return summary;
}

}  // namespace

Ranker plaintext_ranker(centrality::Metric metric) {
  return [metric](const text::CompactMatrix& m, uint32_t) {
    return centrality::rank_plaintext(m, metric);
  };
}

centrality::Summary run_cascade(const std::vector<text::Document>& docs,
                                const std::vector<text::KeyPhrase>& pool,
                                size_t size_budget, const Ranker& ranker) {
  if (docs.empty()) {
    throw EmptyCorpus("run_cascade: no documents");
  }
  std::vector<const text::Document*> ordered;
  ordered.reserve(docs.size());
  for (const auto& d : docs) ordered.push_back(&d);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const text::Document* x, const text::Document* y) {
                     return x->order_key < y->order_key;
                   });

  uint32_t round = 0;
  std::vector<std::vector<std::string>> intermediates;
  intermediates.reserve(ordered.size());
  for (const text::Document* d : ordered) {
    if (ordered.size() > 1) {
      // a token-free document contributes nothing; the cascade absorbs it
      try {
        intermediates.push_back(
            summarize_step(text::split_passages(*d), pool, size_budget, ranker, round)
                .texts);
      } catch (const EmptyInput&) {
        intermediates.emplace_back();
      }
    } else {
      intermediates.push_back(
          summarize_step(text::split_passages(*d), pool, size_budget, ranker, round)
              .texts);
    }
    ++round;
  }

  std::vector<std::string> current = std::move(intermediates[0]);
  centrality::Summary result;
  if (ordered.size() == 1) {
    // degenerate cascade: the single intermediate is the answer
    result.texts = std::move(current);
    result.indices.resize(result.texts.size());
    for (uint32_t i = 0; i < result.indices.size(); ++i) result.indices[i] = i;
    for (const std::string& t : result.texts) {
      result.word_total += text::word_count(t);
    }
    return result;
  }
  for (size_t k = 1; k < intermediates.size(); ++k) {
    if (current.empty() && intermediates[k].empty()) {
      // nothing to merge yet; keep the round schedule aligned
      ++round;
      continue;
    }
    const MergedDoc merged = merge_intermediate(current, intermediates[k]);
    centrality::Summary step =
        summarize_step(merged.passages, pool, size_budget, ranker, round);
    ++round;
    current = step.texts;
    result = std::move(step);
  }
  if (result.texts.empty()) {
    throw EmptyInput("run_cascade: no document produced any passage");
  }
  return result;
}

centrality::Summary summarize_multi(const std::vector<text::Document>& docs,
                                    size_t kp_budget, size_t size_budget,
                                    centrality::Metric metric) {
  if (docs.empty()) {
    throw EmptyCorpus("summarize_multi: no documents");
  }
  const auto pool = text::extract_key_phrases(docs, kp_budget);
  return run_cascade(docs, pool, size_budget, plaintext_ranker(metric));
}

}  // namespace sbesumm::waterfall
