#include "sbesumm/textmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sbesumm/errors.hpp"

namespace sbesumm::text {

namespace {

// Minimal UTF-8 decode; invalid sequences fall back to byte-as-codepoint so
// tokenization stays total and deterministic.
uint32_t decode_utf8(std::string_view s, size_t& i) {
  const auto byte = [&](size_t k) { return static_cast<uint8_t>(s[k]); };
  const uint8_t b0 = byte(i);
  if (b0 < 0x80) {
    i += 1;
    return b0;
  }
  auto cont = [&](size_t k) {
    return k < s.size() && (byte(k) & 0xc0) == 0x80;
  };
  if ((b0 & 0xe0) == 0xc0 && cont(i + 1)) {
    uint32_t cp = (uint32_t(b0 & 0x1f) << 6) | (byte(i + 1) & 0x3f);
    i += 2;
    return cp;
  }
  if ((b0 & 0xf0) == 0xe0 && cont(i + 1) && cont(i + 2)) {
    uint32_t cp = (uint32_t(b0 & 0x0f) << 12) | (uint32_t(byte(i + 1) & 0x3f) << 6) |
                  (byte(i + 2) & 0x3f);
    i += 3;
    return cp;
  }
  if ((b0 & 0xf8) == 0xf0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
    uint32_t cp = (uint32_t(b0 & 0x07) << 18) | (uint32_t(byte(i + 1) & 0x3f) << 12) |
                  (uint32_t(byte(i + 2) & 0x3f) << 6) | (byte(i + 3) & 0x3f);
    i += 4;
    return cp;
  }
  i += 1;
  return b0;
}

void encode_utf8(uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

bool is_space_cp(uint32_t cp) {
  switch (cp) {
    case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
    case 0x85: case 0xa0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202f: case 0x205f: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200a;
  }
}

bool is_punct_cp(uint32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2f) || (cp >= 0x3a && cp <= 0x40) ||
           (cp >= 0x5b && cp <= 0x60) || (cp >= 0x7b && cp <= 0x7e);
  }
  if (cp >= 0xa1 && cp <= 0xbf) return true;  // Latin-1 marks and symbols
  if (cp == 0xd7 || cp == 0xf7) return true;
  if (cp >= 0x2010 && cp <= 0x2027) return true;  // dashes, quotes, daggers
  if (cp >= 0x2030 && cp <= 0x205e) return true;
  if (cp >= 0x3001 && cp <= 0x303f) return true;  // CJK punctuation
  if (cp >= 0xff01 && cp <= 0xff0f) return true;  // fullwidth forms
  if (cp >= 0xff1a && cp <= 0xff20) return true;
  if (cp >= 0xff3b && cp <= 0xff40) return true;
  if (cp >= 0xff5b && cp <= 0xff65) return true;
  return false;
}

uint32_t fold_case_cp(uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  // Latin-1 letters, excluding the multiplication sign handled as punctuation
  if (cp >= 0xc0 && cp <= 0xde && cp != 0xd7) return cp + 32;
  return cp;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  size_t i = 0;
  while (i < text.size()) {
    const uint32_t cp = decode_utf8(text, i);
    if (is_space_cp(cp)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
      continue;
    }
    if (is_punct_cp(cp)) continue;
    encode_utf8(fold_case_cp(cp), current);
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

size_t word_count(std::string_view text) {
  size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                    c == '\f' || c == '\v';
    if (ws) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

namespace {

std::string_view trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (b < e && ws(s[b])) ++b;
  while (e > b && ws(s[e - 1])) --e;
  return s.substr(b, e - b);
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

std::vector<Passage> split_passages(const Document& doc) {
  std::vector<Passage> passages;
  const std::string_view text = doc.text;
  auto emit = [&](std::string_view span) {
    const std::string_view trimmed = trim(span);
    if (trimmed.empty()) return;
    Passage p;
    p.index = static_cast<uint32_t>(passages.size());
    p.text = std::string(trimmed);
    p.tokens = tokenize(trimmed);
    passages.push_back(std::move(p));
  };
  size_t start = 0;
  size_t i = 0;
  while (i < text.size()) {
    if (is_terminator(text[i])) {
      size_t end = i + 1;
      while (end < text.size() && is_terminator(text[end])) ++end;
      const bool boundary =
          end >= text.size() || text[end] == ' ' || text[end] == '\t' ||
          text[end] == '\n' || text[end] == '\r' || text[end] == '\f' ||
          text[end] == '\v';
      if (boundary) {
        emit(text.substr(start, end - start));
        start = end;
      }
      i = end;
    } else {
      ++i;
    }
  }
  if (start < text.size()) emit(text.substr(start));
  return passages;
}

std::vector<KeyPhrase> extract_key_phrases(const std::vector<Document>& docs,
                                           size_t budget,
                                           const StopwordSet& stopwords) {
  if (budget < 1) throw BadParams("extract_key_phrases: budget must be >= 1");
  // Candidate n-grams (n <= 3) counted within passages, summed corpus-wide.
  // std::map keeps the tie scan deterministic without a separate sort key.
  std::map<std::string, uint64_t> counts;
  std::unordered_map<std::string, uint32_t> lengths;
  for (const Document& doc : docs) {
    for (const Passage& p : split_passages(doc)) {
      const auto& toks = p.tokens;
      for (size_t i = 0; i < toks.size(); ++i) {
        if (stopwords.contains(toks[i])) continue;  // no stopword at the head
        std::string surface = toks[i];
        for (size_t n = 1; n <= 3 && i + n <= toks.size(); ++n) {
          const std::string& last = toks[i + n - 1];
          if (n > 1) {
            surface += ' ';
            surface += last;
          }
          if (stopwords.contains(last)) continue;  // no stopword at the tail
          auto [it, inserted] = counts.try_emplace(surface, 0);
          ++it->second;
          if (inserted) lengths.emplace(surface, static_cast<uint32_t>(n));
        }
      }
    }
  }
  std::vector<const std::pair<const std::string, uint64_t>*> ranked;
  ranked.reserve(counts.size());
  for (const auto& kv : counts) ranked.push_back(&kv);
  std::stable_sort(ranked.begin(), ranked.end(), [&](const auto* a, const auto* b) {
    if (a->second != b->second) return a->second > b->second;
    const uint32_t la = lengths.at(a->first);
    const uint32_t lb = lengths.at(b->first);
    if (la != lb) return la < lb;
    return a->first < b->first;
  });
  std::vector<KeyPhrase> out;
  out.reserve(std::min(budget, ranked.size()));
  for (const auto* kv : ranked) {
    if (out.size() >= budget) break;
    KeyPhrase kp;
    kp.surface = kv->first;
    kp.score = static_cast<double>(kv->second);
    kp.tokens = tokenize(kp.surface);
    out.push_back(std::move(kp));
  }
  return out;
}

std::vector<KeyPhrase> filter_key_phrases_for_input(
    const std::vector<KeyPhrase>& phrases,
    const std::vector<std::string>& input_tokens) {
  std::vector<KeyPhrase> out;
  for (const KeyPhrase& kp : phrases) {
    if (kp.tokens.empty()) continue;
    const auto it = std::search(input_tokens.begin(), input_tokens.end(),
                                kp.tokens.begin(), kp.tokens.end());
    if (it != input_tokens.end()) out.push_back(kp);
  }
  return out;
}

CompactMatrix build_compact_matrix(const std::vector<Passage>& passages,
                                   const std::vector<KeyPhrase>& phrases,
                                   WeightScheme scheme) {
  std::vector<const Passage*> kept;
  for (const Passage& p : passages) {
    if (!p.tokens.empty()) kept.push_back(&p);
  }
  if (kept.empty()) {
    throw EmptyInput("build_compact_matrix: no passage with tokens");
  }

  CompactMatrix m;
  m.n_passages = static_cast<uint32_t>(kept.size());
  m.n_keyphrases = static_cast<uint32_t>(phrases.size());
  for (const Passage* p : kept) {
    for (const std::string& t : p->tokens) m.vocab.add(t);
  }
  for (const KeyPhrase& kp : phrases) {
    for (const std::string& t : kp.tokens) m.vocab.add(t);
  }
  m.n_terms = m.vocab.size();

  const size_t n_cols = m.n_passages + static_cast<size_t>(m.n_keyphrases);
  m.weights.assign(n_cols * m.n_terms, 0.0f);
  m.column_texts.reserve(n_cols);
  auto add_column = [&](size_t col, const std::vector<std::string>& tokens) {
    float* w = m.weights.data() + col * m.n_terms;
    for (const std::string& t : tokens) {
      w[*m.vocab.find(t)] += 1.0f;
    }
  };
  size_t col = 0;
  for (const Passage* p : kept) {
    add_column(col++, p->tokens);
    m.column_texts.push_back(p->text);
  }
  for (const KeyPhrase& kp : phrases) {
    add_column(col++, kp.tokens);
    m.column_texts.push_back(kp.surface);
  }

  if (scheme == WeightScheme::tf_idf) {
    // smooth idf; keeps weights positive so no column degenerates
    for (uint32_t t = 0; t < m.n_terms; ++t) {
      size_t df = 0;
      for (size_t c = 0; c < n_cols; ++c) {
        if (m.weights[c * m.n_terms + t] > 0.0f) ++df;
      }
      const float idf = std::log((1.0f + static_cast<float>(n_cols)) /
                                 (1.0f + static_cast<float>(df))) + 1.0f;
      for (size_t c = 0; c < n_cols; ++c) {
        m.weights[c * m.n_terms + t] *= idf;
      }
    }
  }
  return m;
}

}  // namespace sbesumm::text
