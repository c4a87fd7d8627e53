#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sbesumm::text {

struct Document {
  std::string id;
  int64_t order_key = 0;  // chronological position, lower = earlier
  std::string text;
};

struct Passage {
  uint32_t index = 0;  // dense, 0-based within its document
  std::string text;
  std::vector<std::string> tokens;
};

struct KeyPhrase {
  std::string surface;  // 1-3 token n-gram, lowercased, space-joined
  double score = 0.0;   // corpus frequency
  std::vector<std::string> tokens;
};

// Insertion-ordered term -> dense column index association.
class Vocabulary {
 public:
  // Returns the index of `term`, inserting it if new.
  uint32_t add(const std::string& term) {
    auto [it, inserted] = index_.try_emplace(term, static_cast<uint32_t>(terms_.size()));
    if (inserted) terms_.push_back(term);
    return it->second;
  }

  std::optional<uint32_t> find(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  uint32_t size() const { return static_cast<uint32_t>(terms_.size()); }
  const std::string& term(uint32_t i) const { return terms_[i]; }

 private:
  std::unordered_map<std::string, uint32_t> index_;
  std::vector<std::string> terms_;
};

enum class WeightScheme { term_frequency, tf_idf };

// Term x (passage + key phrase) weight matrix; key phrases act as artificial
// passages and occupy the trailing columns.
struct CompactMatrix {
  uint32_t n_terms = 0;
  uint32_t n_passages = 0;
  uint32_t n_keyphrases = 0;
  std::vector<float> weights;  // column-major, n_terms entries per column
  Vocabulary vocab;
  std::vector<std::string> column_texts;  // passage texts then phrase surfaces

  uint32_t n_columns() const { return n_passages + n_keyphrases; }

  std::span<const float> column(uint32_t c) const {
    return {weights.data() + static_cast<size_t>(c) * n_terms, n_terms};
  }
};

using StopwordSet = std::unordered_set<std::string>;

// Built-in English stopword list (~150 words); the same list ships as
// data/stopwords_en.txt.
const StopwordSet& default_stopwords();
std::span<const std::string_view> default_stopword_list();

// Lowercased, punctuation-stripped, whitespace-split tokens.  Deterministic;
// empty input gives an empty list.
std::vector<std::string> tokenize(std::string_view text);

// Sentence-like spans split on [.!?] runs followed by whitespace; trimmed,
// empty spans dropped, whole text as fallback when no terminator occurs.
std::vector<Passage> split_passages(const Document& doc);

// Top-`budget` 1..3-gram candidates ranked by corpus frequency.  Candidates
// may not start or end with a stopword.  Ties break toward fewer tokens,
// then lexicographically smaller surface.
std::vector<KeyPhrase> extract_key_phrases(const std::vector<Document>& docs,
                                           size_t budget,
                                           const StopwordSet& stopwords = default_stopwords());

// Keeps phrases whose token sequence occurs contiguously in input_tokens.
std::vector<KeyPhrase> filter_key_phrases_for_input(
    const std::vector<KeyPhrase>& phrases,
    const std::vector<std::string>& input_tokens);

// Builds the compact matrix; passages with no tokens are dropped first.
// Throws EmptyInput when nothing remains.
CompactMatrix build_compact_matrix(const std::vector<Passage>& passages,
                                   const std::vector<KeyPhrase>& phrases,
                                   WeightScheme scheme = WeightScheme::term_frequency);

// Whitespace token count of a raw passage text (used for word budgets).
size_t word_count(std::string_view text);

}  // namespace sbesumm::text
