#include "sbesumm/textmodel.hpp"

namespace sbesumm::text {

namespace {

// Keep in sync with data/stopwords_en.txt (tests enforce this).
constexpr std::string_view kStopwords[] = {
    "a",       "about",   "above",  "after",   "again",   "against", "all",
    "am",      "an",      "and",    "any",     "are",     "as",      "at",
    "be",      "because", "been",   "before",  "being",   "below",   "between",
    "both",    "but",     "by",     "can",     "cannot",  "could",   "did",
    "do",      "does",    "doing",  "down",    "during",  "each",    "few",
    "for",     "from",    "further","had",     "has",     "have",    "having",
    "he",      "her",     "here",   "hers",    "herself", "him",     "himself",
    "his",     "how",     "i",      "if",      "in",      "into",    "is",
    "it",      "its",     "itself", "just",    "me",      "more",    "most",
    "my",      "myself",  "no",     "nor",     "not",     "now",     "of",
    "off",     "on",      "once",   "only",    "or",      "other",   "our",
    "ours",    "ourselves","out",   "over",    "own",     "said",    "same",
    "she",     "should",  "so",     "some",    "such",    "than",    "that",
    "the",     "their",   "theirs", "them",    "themselves","then",  "there",
    "these",   "they",    "this",   "those",   "through", "to",      "too",
    "under",   "until",   "up",     "upon",    "us",      "very",    "was",
    "we",      "were",    "what",   "when",    "where",   "which",   "while",
    "who",     "whom",    "why",    "will",    "with",    "within",  "without",
    "would",   "you",     "your",   "yours",   "yourself","yourselves",
};

}  // namespace

std::span<const std::string_view> default_stopword_list() {
  return {kStopwords, std::size(kStopwords)};
}

const StopwordSet& default_stopwords() {
  static const StopwordSet set = [] {
    StopwordSet s;
    for (std::string_view w : kStopwords) s.emplace(w);
    return s;
  }();
  return set;
}

}  // namespace sbesumm::text
