#include "sbesumm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sbesumm/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sbesumm::corpus {

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputFormatError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

[[noreturn]] void bad_line(const std::string& origin, size_t line,
                           const std::string& why) {
  throw InputFormatError(origin + ":" + std::to_string(line) + ": " + why);
}

}  // namespace

std::vector<text::Document> parse_corpus_jsonl(const std::string& content,
                                               const std::string& origin) {
  std::vector<text::Document> docs;
  std::istringstream in(content);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) {
      bad_line(origin, line_no, "not a JSON object");
    }
    text::Document d;
    const auto text_it = obj.find("text");
    if (text_it == obj.end() || !text_it->is_string()) {
      bad_line(origin, line_no, "missing string field \"text\"");
    }
    d.text = text_it->get<std::string>();
    if (const auto id_it = obj.find("id"); id_it != obj.end()) {
      if (!id_it->is_string()) bad_line(origin, line_no, "\"id\" must be a string");
      d.id = id_it->get<std::string>();
    } else {
      d.id = "doc" + std::to_string(docs.size());
    }
    if (const auto order_it = obj.find("order"); order_it != obj.end()) {
      if (!order_it->is_number_integer()) {
        bad_line(origin, line_no, "\"order\" must be an integer");
      }
      d.order_key = order_it->get<int64_t>();
    } else {
      d.order_key = static_cast<int64_t>(docs.size());
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<text::Document> load_corpus_jsonl(const std::string& path) {
  return parse_corpus_jsonl(read_file(path), path);
}

void save_corpus_jsonl(const std::string& path,
                       const std::vector<text::Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputFormatError("cannot write " + path);
  }
  for (const text::Document& d : docs) {
    json obj;
    obj["id"] = d.id;
    obj["order"] = d.order_key;
    obj["text"] = d.text;
    out << obj.dump() << '\n';
  }
}

std::vector<Topic> load_dataset(const std::string& dir) {
  const fs::path root(dir);
  const fs::path docs_dir = root / "docs";
  if (!fs::is_directory(docs_dir)) {
    throw InputFormatError(dir + ": missing docs/ directory");
  }
  std::vector<fs::path> topic_files;
  for (const auto& entry : fs::directory_iterator(docs_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      topic_files.push_back(entry.path());
    }
  }
  if (topic_files.empty()) {
    throw InputFormatError(dir + ": docs/ holds no .jsonl topics");
  }
  std::sort(topic_files.begin(), topic_files.end());

  std::vector<Topic> topics;
  for (const fs::path& file : topic_files) {
    Topic t;
    t.name = file.stem().string();
    t.docs = load_corpus_jsonl(file.string());
    const fs::path ref_dir = root / "refs" / t.name;
    if (fs::is_directory(ref_dir)) {
      std::vector<fs::path> ref_files;
      for (const auto& entry : fs::directory_iterator(ref_dir)) {
        if (entry.is_regular_file()) ref_files.push_back(entry.path());
      }
      std::sort(ref_files.begin(), ref_files.end());
      for (const fs::path& rf : ref_files) {
        t.references.push_back(read_file(rf));
      }
    }
    if (t.references.empty()) {
      throw InputFormatError(dir + ": topic " + t.name + " has no references");
    }
    topics.push_back(std::move(t));
  }
  return topics;
}

namespace {

std::string decode_entities(const std::string& in) {
  static constexpr std::pair<std::string_view, char> kEntities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'},
      {"&quot;", '"'}, {"&apos;", '\''},
  };
  std::string out;
  out.reserve(in.size());
  size_t i = 0;
  while (i < in.size()) {
    bool matched = false;
    if (in[i] == '&') {
      for (const auto& [name, ch] : kEntities) {
        if (in.compare(i, name.size(), name) == 0) {
          out += ch;
          i += name.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out += in[i++];
  }
  return out;
}

// Normalized topic key: alphanumerics only, uppercased.
std::string normalize_key(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      key += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
  }
  return key;
}

// Sort key for chronological ordering: the longest digit run in the file
// name (dates in archive identifiers), then the name itself.
std::string date_key(const std::string& name) {
  std::string best;
  std::string cur;
  for (char c : name) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      cur += c;
    } else {
      if (cur.size() > best.size()) best = cur;
      cur.clear();
    }
  }
  if (cur.size() > best.size()) best = cur;
  return best;
}

}  // namespace

std::string extract_sgml_text(const std::string& raw) {
  // collect <TEXT>...</TEXT> blocks; fall back to the whole document
  std::string body;
  size_t pos = 0;
  while (true) {
    const size_t open = raw.find("<TEXT>", pos);
    if (open == std::string::npos) break;
    const size_t start = open + 6;
    size_t close = raw.find("</TEXT>", start);
    if (close == std::string::npos) close = raw.size();
    body.append(raw, start, close - start);
    body += ' ';
    pos = close;
  }
  if (body.empty()) body = raw;

  // strip every remaining tag
  std::string untagged;
  untagged.reserve(body.size());
  bool in_tag = false;
  for (char c : body) {
    if (c == '<') {
      in_tag = true;
      untagged += ' ';
    } else if (c == '>') {
      in_tag = false;
    } else if (!in_tag) {
      untagged += c;
    }
  }

  const std::string decoded = decode_entities(untagged);

  // collapse whitespace runs
  std::string out;
  out.reserve(decoded.size());
  bool pending_space = false;
  for (char c : decoded) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

size_t import_dataset(const std::string& docs_dir, const std::string& models_dir,
                      const std::string& out_dir) {
  const fs::path docs_root(docs_dir);
  if (!fs::is_directory(docs_root)) {
    throw InputFormatError(docs_dir + ": not a directory");
  }
  std::vector<fs::path> topic_dirs;
  for (const auto& entry : fs::directory_iterator(docs_root)) {
    if (entry.is_directory()) topic_dirs.push_back(entry.path());
  }
  if (topic_dirs.empty()) {
    throw InputFormatError(docs_dir + ": no topic subdirectories");
  }
  std::sort(topic_dirs.begin(), topic_dirs.end());

  // model files grouped by longest matching topic prefix
  std::vector<fs::path> model_files;
  if (!models_dir.empty()) {
    const fs::path models_root(models_dir);
    if (!fs::is_directory(models_root)) {
      throw InputFormatError(models_dir + ": not a directory");
    }
    for (const auto& entry : fs::directory_iterator(models_root)) {
      if (entry.is_regular_file()) model_files.push_back(entry.path());
    }
    std::sort(model_files.begin(), model_files.end());
  }

  fs::create_directories(fs::path(out_dir) / "docs");

  size_t written = 0;
  for (const fs::path& topic_dir : topic_dirs) {
    const std::string topic = topic_dir.filename().string();
    const std::string topic_key = normalize_key(topic);

    // gather and order the topic's articles
    std::vector<fs::path> articles;
    for (const auto& entry : fs::recursive_directory_iterator(topic_dir)) {
      if (entry.is_regular_file()) articles.push_back(entry.path());
    }
    std::sort(articles.begin(), articles.end(),
              [](const fs::path& a, const fs::path& b) {
                const std::string ka = date_key(a.filename().string());
                const std::string kb = date_key(b.filename().string());
                // shorter digit runs first only lexicographically padded:
                // compare by (length, digits, name) so numeric order holds
                const auto ta = std::make_tuple(ka.size(), ka, a.filename().string());
                const auto tb = std::make_tuple(kb.size(), kb, b.filename().string());
                return ta < tb;
              });
    if (articles.empty()) continue;

    std::vector<text::Document> docs;
    for (const fs::path& article : articles) {
      text::Document d;
      d.id = article.filename().string();
      d.order_key = static_cast<int64_t>(docs.size());
      d.text = extract_sgml_text(read_file(article));
      docs.push_back(std::move(d));
    }

    // references: model files whose normalized name starts with the topic
    // key or vice versa (benchmark model names drop trailing group letters)
    std::vector<fs::path> refs;
    for (const fs::path& model : model_files) {
      const std::string model_key =
          normalize_key(model.filename().string().substr(
              0, model.filename().string().find('.')));
      if (model_key.empty()) continue;
      if (topic_key.rfind(model_key, 0) == 0 ||
          model_key.rfind(topic_key, 0) == 0) {
        refs.push_back(model);
      }
    }

    save_corpus_jsonl(((fs::path(out_dir) / "docs") / (topic + ".jsonl")).string(),
                      docs);
    if (!refs.empty()) {
      const fs::path ref_dir = fs::path(out_dir) / "refs" / topic;
      fs::create_directories(ref_dir);
      for (const fs::path& model : refs) {
        std::string name = model.filename().string();
        if (name.size() < 4 || name.compare(name.size() - 4, 4, ".txt") != 0) {
          name += ".txt";  // benchmark model files usually carry no extension
        }
        std::ofstream out(ref_dir / name, std::ios::binary);
        out << read_file(model);
      }
    }
    ++written;
  }
  return written;
}

}  // namespace sbesumm::corpus
