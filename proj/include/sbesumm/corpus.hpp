#pragma once

#include <string>
#include <vector>

#include "sbesumm/textmodel.hpp"

namespace sbesumm::corpus {

// JSONL corpus: one JSON object per line with fields
//   text  (string, required)
//   id    (string, optional; defaults to "doc<record-index>")
//   order (integer, optional; defaults to the record index)
// Blank lines are skipped and do not advance the record index.  Anything
// else is InputFormatError with the offending line number.
std::vector<text::Document> load_corpus_jsonl(const std::string& path);
std::vector<text::Document> parse_corpus_jsonl(const std::string& content,
                                               const std::string& origin);
void save_corpus_jsonl(const std::string& path,
                       const std::vector<text::Document>& docs);

// One evaluation unit: a document cluster plus its reference summaries.
struct Topic {
  std::string name;
  std::vector<text::Document> docs;
  std::vector<std::string> references;  // raw reference summary texts
};

// Dataset layout: <dir>/docs/<topic>.jsonl and <dir>/refs/<topic>/<ref>.txt.
// Topics are ordered by name; every topic must have at least one reference.
// Missing directories or reference sets raise InputFormatError.
std::vector<Topic> load_dataset(const std::string& dir);

// Converts a user-supplied document collection of the shape the classic
// multi-document benchmarks use — one subdirectory per topic holding SGML or
// plain-text articles, plus a flat directory of model summaries whose file
// names begin with the topic identifier — into the dataset layout above.
// Matching is case-insensitive on alphanumerics: a model file belongs to the
// topic whose normalized name it prefixes.  Returns the number of topics
// written.
size_t import_dataset(const std::string& docs_dir, const std::string& models_dir,
                      const std::string& out_dir);

// Tag-stripping used by the importer (exposed for tests): keeps the text
// inside <TEXT> blocks when present (otherwise the whole input), removes all
// remaining tags, decodes the five basic entities, collapses whitespace.
std::string extract_sgml_text(const std::string& raw);

}  // namespace sbesumm::corpus
