#include "sbesumm/stem.hpp"

#include <array>
#include <cstddef>

namespace sbesumm::eval {

namespace {

// Working state for one word.  The rule conditions (measure, vowel presence,
// double consonant, cvc shape) always refer to the stem that would remain
// after removing the suffix under consideration, so they take an explicit
// end position.
struct Stemmer {
  std::string word;

  bool is_consonant(size_t i) const {
    switch (word[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        // y is a vowel exactly when a consonant precedes it
        return i == 0 || !is_consonant(i - 1);
      default:
        return true;
    }
  }

  // Number of vowel->consonant transitions in word[0, end): the m of the
  // [C](VC)^m[V] decomposition.
  size_t measure(size_t end) const {
    size_t m = 0;
    bool in_vowel_run = false;
    for (size_t i = 0; i < end; ++i) {
      if (is_consonant(i)) {
        if (in_vowel_run) {
          ++m;
          in_vowel_run = false;
        }
      } else {
        in_vowel_run = true;
      }
    }
    return m;
  }

  bool has_vowel(size_t end) const {
    for (size_t i = 0; i < end; ++i) {
      if (!is_consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(size_t end) const {
    return end >= 2 && word[end - 1] == word[end - 2] && is_consonant(end - 1);
  }

  // consonant-vowel-consonant at the end, last consonant not w, x, or y
  bool ends_cvc(size_t end) const {
    if (end < 3) return false;
    if (!is_consonant(end - 3) || is_consonant(end - 2) ||
        !is_consonant(end - 1)) {
      return false;
    }
    const char last = word[end - 1];
    return last != 'w' && last != 'x' && last != 'y';
  }

  bool ends_with(std::string_view suffix) const {
    return word.size() >= suffix.size() &&
           word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0;
  }

  // Replaces `suffix` by `replacement` when the remaining stem has measure
  // greater than `min_measure`.  Returns true when the suffix matched,
  // whether or not the condition allowed the rewrite (per-step scanning
  // stops at the first — i.e. longest listed — match).
  bool replace(std::string_view suffix, std::string_view replacement,
               size_t min_measure) {
    if (!ends_with(suffix)) return false;
    const size_t stem = word.size() - suffix.size();
    if (measure(stem) > min_measure) {
      word.replace(stem, suffix.size(), replacement);
    }
    return true;
  }

  void step_1a() {
    if (ends_with("sses")) {
      word.erase(word.size() - 2);
    } else if (ends_with("ies")) {
      word.erase(word.size() - 2);
    } else if (!ends_with("ss") && ends_with("s")) {
      word.pop_back();
    }
  }

  void step_1b() {
    if (ends_with("eed")) {
      if (measure(word.size() - 3) > 0) word.pop_back();
      return;
    }
    bool stripped = false;
    if (ends_with("ed") && has_vowel(word.size() - 2)) {
      word.erase(word.size() - 2);
      stripped = true;
    } else if (ends_with("ing") && has_vowel(word.size() - 3)) {
      word.erase(word.size() - 3);
      stripped = true;
    }
    if (!stripped) return;
    if (ends_with("at") || ends_with("bl") || ends_with("iz")) {
      word += 'e';
    } else if (double_consonant(word.size())) {
      const char last = word.back();
      if (last != 'l' && last != 's' && last != 'z') word.pop_back();
    } else if (measure(word.size()) == 1 && ends_cvc(word.size())) {
      word += 'e';
    }
  }

  void step_1c() {
    if (ends_with("y") && has_vowel(word.size() - 1)) {
      word.back() = 'i';
    }
  }

  void step_2() {
    static constexpr std::array<std::array<std::string_view, 2>, 20> rules = {{
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
        {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
        {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
        {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
        {"iviti", "ive"},   {"biliti", "ble"},
    }};
    for (const auto& [suffix, replacement] : rules) {
      if (replace(suffix, replacement, 0)) return;
    }
  }

  void step_3() {
    static constexpr std::array<std::array<std::string_view, 2>, 7> rules = {{
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    }};
    for (const auto& [suffix, replacement] : rules) {
      if (replace(suffix, replacement, 0)) return;
    }
  }

  void step_4() {
    static constexpr std::array<std::string_view, 18> suffixes = {
        "ement", "ance", "ence", "able", "ible", "ment", "ent", "ant",
        "ism",   "ate",  "iti",  "ous",  "ive",  "ize",  "ion", "al",
        "er",    "ic",
    };
    for (std::string_view suffix : suffixes) {
      if (!ends_with(suffix)) continue;
      const size_t stem = word.size() - suffix.size();
      if (suffix == "ion" && !(stem >= 1 &&
                               (word[stem - 1] == 's' || word[stem - 1] == 't'))) {
        return;  // matched but the s/t guard fails; the step is done
      }
      if (measure(stem) > 1) word.erase(stem);
      return;
    }
    // "ou" sits apart: it only matters when no longer suffix matched
    if (ends_with("ou") && measure(word.size() - 2) > 1) {
      word.erase(word.size() - 2);
    }
  }

  void step_5a() {
    if (!ends_with("e")) return;
    const size_t stem = word.size() - 1;
    const size_t m = measure(stem);
    if (m > 1 || (m == 1 && !ends_cvc(stem))) {
      word.pop_back();
    }
  }

  void step_5b() {
    if (word.size() >= 2 && word.back() == 'l' &&
        double_consonant(word.size()) && measure(word.size()) > 1) {
      word.pop_back();
    }
  }
};

}  // namespace

std::string porter_stem(std::string_view input) {
  if (input.size() < 3) return std::string(input);
  for (char c : input) {
    if (c < 'a' || c > 'z') return std::string(input);
  }
  Stemmer s{std::string(input)};
  s.step_1a();
  s.step_1b();
  s.step_1c();
  s.step_2();
  s.step_3();
  s.step_4();
  s.step_5a();
  s.step_5b();
  return s.word;
}

}  // namespace sbesumm::eval
