#include "doctest.h"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "sbesumm/corpus.hpp"
#include "sbesumm/errors.hpp"
#include "sbesumm/eval.hpp"
#include "sbesumm/sbe.hpp"
#include "sbesumm/stem.hpp"
#include "sbesumm/textmodel.hpp"

using namespace sbesumm;
using namespace sbesumm::eval;
namespace fs = std::filesystem;

namespace {

using Tokens = std::vector<std::string>;
using RefSet = std::vector<Tokens>;

// Scratch directory removed on scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("sbesumm_eval_" + std::to_string(counter++) + "_" +
            std::to_string(static_cast<unsigned>(::getpid())));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

corpus::Topic tiny_topic() {
  corpus::Topic t;
  t.name = "reactor";
  t.docs = {
      {"d0", 0,
       "The cooling system failed during the night shift. Engineers replaced "
       "the coolant pump before morning."},
      {"d1", 1,
       "Inspectors praised the rapid coolant pump replacement. The cooling "
       "system returned to service quickly."},
      {"d2", 2,
       "A report credits the engineers with preventing damage. The night "
       "shift followed the emergency checklist."},
  };
  t.references = {
      "Engineers replaced the failed coolant pump overnight and the cooling "
      "system returned to service."};
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// rouge1

TEST_CASE("rouge1 matches the hand-counted overlap examples") {
  // two of three candidate unigrams occur in the reference
  RougeScore s = rouge1({"the", "cat", "sat"}, {{"the", "cat", "ate"}});
  CHECK(s.recall == doctest::Approx(2.0 / 3.0));
  CHECK(s.precision == doctest::Approx(2.0 / 3.0));
  CHECK(s.f1 == doctest::Approx(2.0 / 3.0));

  // identical texts are a perfect score
  s = rouge1({"the", "cat", "sat"}, {{"the", "cat", "sat"}});
  CHECK(s.recall == doctest::Approx(1.0));
  CHECK(s.precision == doctest::Approx(1.0));
  CHECK(s.f1 == doctest::Approx(1.0));

  // clipping: "a" matches only once despite three candidate copies
  s = rouge1({"a", "a", "a"}, {{"a", "b"}});
  CHECK(s.recall == doctest::Approx(0.5));
  CHECK(s.precision == doctest::Approx(1.0 / 3.0));
  CHECK(s.f1 == doctest::Approx(0.4));
}

TEST_CASE("rouge1 aggregates references fieldwise and ignores their order") {
  const Tokens cand = {"a", "b"};
  const Tokens r1 = {"a", "x"};        // recall 1/2, precision 1/2, f1 1/2
  const Tokens r2 = {"b", "b", "b"};   // recall 1/3, precision 1/2, f1 2/5

  const RougeScore mean = rouge1(cand, {r1, r2});
  CHECK(mean.recall == doctest::Approx((0.5 + 1.0 / 3.0) / 2.0));
  CHECK(mean.precision == doctest::Approx(0.5));
  CHECK(mean.f1 == doctest::Approx((0.5 + 0.4) / 2.0));

  const RougeScore swapped = rouge1(cand, {r2, r1});
  CHECK(swapped.recall == doctest::Approx(mean.recall));
  CHECK(swapped.precision == doctest::Approx(mean.precision));
  CHECK(swapped.f1 == doctest::Approx(mean.f1));
}

TEST_CASE("rouge1 max aggregation returns the best-f1 reference's triple") {
  const Tokens cand = {"a", "b"};
  const RougeScore best =
      rouge1(cand, {{"b", "b", "b"}, {"a", "x"}}, false, RefAggregation::max);
  CHECK(best.recall == doctest::Approx(0.5));
  CHECK(best.precision == doctest::Approx(0.5));
  CHECK(best.f1 == doctest::Approx(0.5));
}

TEST_CASE("rouge1 rejects missing or empty references") {
  CHECK_THROWS_AS(rouge1({"a"}, {}), BadReference);
  CHECK_THROWS_AS(rouge1({"a"}, {Tokens{}}), BadReference);
  CHECK_THROWS_AS(rouge1({"a"}, {Tokens{"a"}, Tokens{}}), BadReference);
}

TEST_CASE("rouge1 scores an empty candidate as zero without erroring") {
  const RougeScore s = rouge1({}, {{"a", "b"}});
  CHECK(s.recall == 0.0);
  CHECK(s.precision == 0.0);
  CHECK(s.f1 == 0.0);
}

TEST_CASE("rouge1 components always stay within the unit interval") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> word(0, 4);
  std::uniform_int_distribution<size_t> len(0, 12);
  const char* vocab[] = {"a", "b", "c", "d", "e"};
  for (int iter = 0; iter < 300; ++iter) {
    Tokens cand;
    for (size_t i = len(gen); i > 0; --i) cand.push_back(vocab[word(gen)]);
    RefSet refs;
    const size_t n_refs = 1 + len(gen) % 3;
    for (size_t r = 0; r < n_refs; ++r) {
      Tokens ref;
      for (size_t i = 1 + len(gen); i > 0; --i) ref.push_back(vocab[word(gen)]);
      refs.push_back(std::move(ref));
    }
    for (const auto agg : {RefAggregation::mean, RefAggregation::max}) {
      const RougeScore s = rouge1(cand, refs, false, agg);
      CHECK(s.recall >= 0.0);
      CHECK(s.recall <= 1.0);
      CHECK(s.precision >= 0.0);
      CHECK(s.precision <= 1.0);
      CHECK(s.f1 >= 0.0);
      CHECK(s.f1 <= 1.0);
    }
  }
}

TEST_CASE("rouge1_text tokenizes and lowercases before scoring") {
  const RougeScore s = rouge1_text("The cat sat.", {"the cat ate"});
  CHECK(s.recall == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("stemming folds inflected forms onto a shared stem") {
  const RougeScore plain = rouge1({"hopping"}, {{"hopped"}});
  CHECK(plain.recall == 0.0);
  const RougeScore stemmed = rouge1({"hopping"}, {{"hopped"}}, true);
  CHECK(stemmed.recall == doctest::Approx(1.0));
  CHECK(stemmed.f1 == doctest::Approx(1.0));
}

// ---------------------------------------------------------------------------
// porter_stem

TEST_CASE("porter_stem reproduces the classic rule-table outcomes") {
  // plurals and -ed/-ing
  CHECK(porter_stem("caresses") == "caress");
  CHECK(porter_stem("ponies") == "poni");
  CHECK(porter_stem("cats") == "cat");
  CHECK(porter_stem("agreed") == "agre");  // step 5a also drops the final e
  CHECK(porter_stem("feed") == "feed");
  CHECK(porter_stem("hopping") == "hop");
  CHECK(porter_stem("falling") == "fall");
  CHECK(porter_stem("filing") == "file");
  // y -> i
  CHECK(porter_stem("happy") == "happi");
  CHECK(porter_stem("sky") == "sky");
  // derivational suffixes run through the whole cascade
  CHECK(porter_stem("relational") == "relat");
  CHECK(porter_stem("conditional") == "condit");
  CHECK(porter_stem("rational") == "ration");
  CHECK(porter_stem("digitizer") == "digit");
  CHECK(porter_stem("dependent") == "depend");
  CHECK(porter_stem("hopeful") == "hope");
  CHECK(porter_stem("goodness") == "good");
  CHECK(porter_stem("adjustment") == "adjust");
  CHECK(porter_stem("adoption") == "adopt");
  CHECK(porter_stem("activate") == "activ");
  // final-e and double-l cleanup
  CHECK(porter_stem("rate") == "rate");
  CHECK(porter_stem("cease") == "ceas");
  CHECK(porter_stem("controll") == "control");
  CHECK(porter_stem("roll") == "roll");
  // the textbook cascade
  CHECK(porter_stem("generalizations") == "gener");
}

TEST_CASE("porter_stem passes short or non-alphabetic tokens through") {
  CHECK(porter_stem("is") == "is");
  CHECK(porter_stem("a") == "a");
  CHECK(porter_stem("cat3") == "cat3");
  CHECK(porter_stem("") == "");
}

// ---------------------------------------------------------------------------
// corpus JSONL

TEST_CASE("parse_corpus_jsonl fills defaults and honors explicit fields") {
  const std::string content =
      "{\"text\": \"First doc.\"}\n"
      "\n"
      "{\"id\": \"alpha\", \"order\": 7, \"text\": \"Second doc.\"}\r\n";
  const auto docs = corpus::parse_corpus_jsonl(content, "mem");
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == "doc0");
  CHECK(docs[0].order_key == 0);
  CHECK(docs[0].text == "First doc.");
  CHECK(docs[1].id == "alpha");
  CHECK(docs[1].order_key == 7);
  CHECK(docs[1].text == "Second doc.");
}

TEST_CASE("parse_corpus_jsonl reports the offending line") {
  const auto check_line = [](const std::string& content, const char* line_tag) {
    try {
      corpus::parse_corpus_jsonl(content, "mem");
      FAIL("expected InputFormatError");
    } catch (const InputFormatError& e) {
      CHECK(std::string(e.what()).find(line_tag) != std::string::npos);
    }
  };
  check_line("not json\n", "mem:1");
  check_line("{\"text\": \"ok\"}\n{\"no_text\": 1}\n", "mem:2");
  check_line("{\"text\": 5}\n", "mem:1");
  check_line("{\"text\": \"x\", \"id\": 3}\n", "mem:1");
  check_line("{\"text\": \"x\", \"order\": \"soon\"}\n", "mem:1");
  check_line("[1, 2]\n", "mem:1");
}

TEST_CASE("corpus JSONL save/load round-trips documents") {
  TempDir tmp;
  const std::string path = (tmp.path / "corpus.jsonl").string();
  const std::vector<text::Document> docs = {
      {"a", 3, "Quotes \" and \\ backslashes \n survive."},
      {"b", 1, "Second."},
  };
  corpus::save_corpus_jsonl(path, docs);
  const auto loaded = corpus::load_corpus_jsonl(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].id == "a");
  CHECK(loaded[0].order_key == 3);
  CHECK(loaded[0].text == docs[0].text);
  CHECK(loaded[1].id == "b");
  CHECK(loaded[1].order_key == 1);
}

TEST_CASE("load_corpus_jsonl rejects a missing file") {
  CHECK_THROWS_AS(corpus::load_corpus_jsonl("/nonexistent/corpus.jsonl"),
                  InputFormatError);
}

TEST_CASE("load_dataset walks docs and refs by topic name") {
  TempDir tmp;
  write_file(tmp.path / "docs" / "beta.jsonl", "{\"text\": \"Beta doc.\"}\n");
  write_file(tmp.path / "docs" / "alpha.jsonl",
             "{\"text\": \"Alpha one.\"}\n{\"text\": \"Alpha two.\"}\n");
  write_file(tmp.path / "refs" / "alpha" / "r1.txt", "Alpha summary.");
  write_file(tmp.path / "refs" / "alpha" / "r2.txt", "Another alpha summary.");
  write_file(tmp.path / "refs" / "beta" / "r1.txt", "Beta summary.");

  const auto topics = corpus::load_dataset(tmp.path.string());
  REQUIRE(topics.size() == 2);
  CHECK(topics[0].name == "alpha");  // ordered by name
  CHECK(topics[0].docs.size() == 2);
  CHECK(topics[0].references.size() == 2);
  CHECK(topics[1].name == "beta");
  CHECK(topics[1].references == std::vector<std::string>{"Beta summary."});
}

TEST_CASE("load_dataset requires docs and at least one reference per topic") {
  TempDir tmp;
  CHECK_THROWS_AS(corpus::load_dataset(tmp.path.string()), InputFormatError);

  write_file(tmp.path / "docs" / "alpha.jsonl", "{\"text\": \"Doc.\"}\n");
  CHECK_THROWS_AS(corpus::load_dataset(tmp.path.string()), InputFormatError);
}

// ---------------------------------------------------------------------------
// SGML extraction and dataset import

TEST_CASE("extract_sgml_text keeps TEXT blocks and strips markup") {
  const std::string raw =
      "<DOC>\n<DOCNO> XYZ19990101.0001 </DOCNO>\n"
      "<HEADLINE>Ignored headline</HEADLINE>\n"
      "<TEXT>\n<P>Hello &amp; goodbye.</P>\n</TEXT>\n"
      "<TEXT>Second   block&lt;here&gt;.</TEXT>\n</DOC>\n";
  CHECK(corpus::extract_sgml_text(raw) ==
        "Hello & goodbye. Second block<here>.");
}

TEST_CASE("extract_sgml_text falls back to the whole input without TEXT tags") {
  CHECK(corpus::extract_sgml_text("<p>Plain  \n article.</p>") ==
        "Plain article.");
  CHECK(corpus::extract_sgml_text("No tags at all.") == "No tags at all.");
  CHECK(corpus::extract_sgml_text("") == "");
}

TEST_CASE("import_dataset converts topic directories and matches models") {
  TempDir tmp;
  const fs::path docs = tmp.path / "orig_docs";
  const fs::path models = tmp.path / "orig_models";
  const fs::path out = tmp.path / "converted";

  // two articles, named so the later date sorts second
  write_file(docs / "D0701A" / "XYZ19990202.0010",
             "<DOC><TEXT>Later article body.</TEXT></DOC>");
  write_file(docs / "D0701A" / "XYZ19990101.0001",
             "<DOC><TEXT>Earlier article body.</TEXT></DOC>");
  write_file(docs / "D0702B" / "XYZ19990301.0001",
             "<DOC><TEXT>Other topic body.</TEXT></DOC>");
  // models: two for D0701, one for D0702, one unrelated
  write_file(models / "D0701.M.250.A.A", "First model.");
  write_file(models / "D0701.M.250.A.B", "Second model.");
  write_file(models / "D0702.M.250.B.A", "Other model.");
  write_file(models / "D0899.M.250.C.A", "Unrelated model.");

  const size_t n = corpus::import_dataset(docs.string(), models.string(),
                                          out.string());
  CHECK(n == 2);

  const auto topics = corpus::load_dataset(out.string());
  REQUIRE(topics.size() == 2);
  CHECK(topics[0].name == "D0701A");
  REQUIRE(topics[0].docs.size() == 2);
  CHECK(topics[0].docs[0].text == "Earlier article body.");
  CHECK(topics[0].docs[0].order_key < topics[0].docs[1].order_key);
  CHECK(topics[0].docs[1].text == "Later article body.");
  CHECK(topics[0].references.size() == 2);
  CHECK(topics[1].name == "D0702B");
  CHECK(topics[1].references == std::vector<std::string>{"Other model."});
}

TEST_CASE("import_dataset handles hyphenated topic and model names") {
  TempDir tmp;
  const fs::path docs = tmp.path / "docs";
  const fs::path models = tmp.path / "models";
  const fs::path out = tmp.path / "out";
  write_file(docs / "D0901A-A" / "XIN19980101.0012",
             "<DOC><TEXT>Body text.</TEXT></DOC>");
  write_file(models / "D0901-A.M.100.A.A", "Model text.");

  CHECK(corpus::import_dataset(docs.string(), models.string(), out.string()) == 1);
  const auto topics = corpus::load_dataset(out.string());
  REQUIRE(topics.size() == 1);
  CHECK(topics[0].references == std::vector<std::string>{"Model text."});
}

TEST_CASE("import_dataset validates its directories") {
  TempDir tmp;
  CHECK_THROWS_AS(corpus::import_dataset((tmp.path / "nope").string(), "",
                                         (tmp.path / "out").string()),
                  InputFormatError);
  fs::create_directories(tmp.path / "empty");
  CHECK_THROWS_AS(corpus::import_dataset((tmp.path / "empty").string(), "",
                                         (tmp.path / "out").string()),
                  InputFormatError);
}

// ---------------------------------------------------------------------------
// baselines and grids

TEST_CASE("run_baseline scores the plaintext pipeline against references") {
  const corpus::Topic topic = tiny_topic();
  const RougeScore cosine =
      run_baseline(topic, centrality::Metric::cosine);
  const RougeScore euclid =
      run_baseline(topic, centrality::Metric::euclidean);
  for (const RougeScore& s : {cosine, euclid}) {
    CHECK(s.recall > 0.0);
    CHECK(s.recall <= 1.0);
    CHECK(s.f1 > 0.0);
    CHECK(s.f1 <= 1.0);
  }
  // deterministic: same call, same numbers
  const RougeScore again = run_baseline(topic, centrality::Metric::cosine);
  CHECK(again.recall == cosine.recall);
  CHECK(again.precision == cosine.precision);
  CHECK(again.f1 == cosine.f1);
}

TEST_CASE("run_baseline over topics averages fieldwise") {
  const corpus::Topic topic = tiny_topic();
  const RougeScore one = run_baseline(topic, centrality::Metric::euclidean);
  const RougeScore two =
      run_baseline(std::vector<corpus::Topic>{topic, topic},
                   centrality::Metric::euclidean);
  CHECK(two.recall == doctest::Approx(one.recall));
  CHECK(two.f1 == doctest::Approx(one.f1));
  CHECK_THROWS_AS(run_baseline(std::vector<corpus::Topic>{},
                               centrality::Metric::cosine),
                  EmptyCorpus);
}

TEST_CASE("run_grid fills every cell and reports valid scores") {
  const std::vector<corpus::Topic> topics = {tiny_topic()};
  const ExperimentGrid grid =
      run_grid(topics, {4, 8}, {0.25, 0.95}, {11, 12});
  REQUIRE(grid.cells.size() == 4);
  for (const GridCell& cell : grid.cells) {
    CHECK(cell.valid);
    CHECK(cell.mean_rouge1 >= 0.0);
    CHECK(cell.mean_rouge1 <= 1.0);
  }

  // deterministic across runs
  const ExperimentGrid again =
      run_grid(topics, {4, 8}, {0.25, 0.95}, {11, 12});
  for (size_t i = 0; i < grid.cells.size(); ++i) {
    CHECK(again.cells[i].mean_rouge1 ==
          doctest::Approx(grid.cells[i].mean_rouge1));
  }
}

TEST_CASE("run_grid marks failing cells invalid instead of throwing") {
  corpus::Topic broken;
  broken.name = "broken";
  broken.docs = {{"d0", 0, "!!! ..."}};  // tokenizes to nothing
  broken.references = {"reference"};
  const ExperimentGrid grid =
      run_grid({broken}, {8}, {0.95}, {1});
  REQUIRE(grid.cells.size() == 1);
  CHECK_FALSE(grid.cells[0].valid);
  CHECK_FALSE(grid.cells[0].note.empty());
  CHECK(format_grid_table(grid).find("n/a") != std::string::npos);
}

TEST_CASE("run_grid validates its parameter lists") {
  const std::vector<corpus::Topic> topics = {tiny_topic()};
  CHECK_THROWS_AS(run_grid({}, {8}, {0.95}, {1}), EmptyCorpus);
  CHECK_THROWS_AS(run_grid(topics, {}, {0.95}, {1}), BadParams);
  CHECK_THROWS_AS(run_grid(topics, {8}, {}, {1}), BadParams);
  CHECK_THROWS_AS(run_grid(topics, {8}, {0.95}, {}), BadParams);
}

TEST_CASE("grid reports render as an aligned table and as JSON") {
  ExperimentGrid grid;
  grid.bpc_values = {4, 16};
  grid.leakage_targets = {0.05, 0.95};
  grid.cells = {{0.111, true, ""},
                {0.222, true, ""},
                {0.0, false, "calibration failed"},
                {0.444, true, ""}};

  const std::string table = format_grid_table(grid);
  CHECK(table.find("bpc \\ leakage") != std::string::npos);
  CHECK(table.find("5%") != std::string::npos);
  CHECK(table.find("95%") != std::string::npos);
  CHECK(table.find("0.111") != std::string::npos);
  CHECK(table.find("n/a") != std::string::npos);
  // two label rows + header
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);

  const auto parsed = nlohmann::json::parse(grid_to_json(grid));
  CHECK(parsed["bpc_values"] == nlohmann::json({4, 16}));
  REQUIRE(parsed["cells"].size() == 4);
  CHECK(parsed["cells"][0]["mean_rouge1"] == doctest::Approx(0.111));
  CHECK(parsed["cells"][2]["valid"] == false);
  CHECK(parsed["cells"][2]["note"] == "calibration failed");
}

TEST_CASE("baseline reports render one row per metric") {
  const std::vector<BaselineRow> rows = {
      {"demo", centrality::Metric::cosine, {0.514, 0.5, 0.507}},
      {"demo", centrality::Metric::euclidean, {0.489, 0.47, 0.479}},
  };
  const std::string table = format_baseline_table(rows);
  CHECK(table.find("cosine") != std::string::npos);
  CHECK(table.find("euclidean") != std::string::npos);
  CHECK(table.find("0.514") != std::string::npos);

  const auto parsed = nlohmann::json::parse(baseline_to_json(rows));
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0]["metric"] == "cosine");
  CHECK(parsed[1]["recall"] == doctest::Approx(0.489));
}

// ---------------------------------------------------------------------------
// curve emission

TEST_CASE("emit_curve writes deterministic CSV with the contract header") {
  std::ostringstream a, b;
  emit_curve(a, 32, {0.5, 1.0}, {4}, 20, 99);
  emit_curve(b, 32, {0.5, 1.0}, {4}, 20, 99);
  const std::string csv = a.str();
  CHECK(csv == b.str());
  CHECK(csv.rfind("delta,m_bits,euclidean,hamming\n", 0) == 0);
  // header + 2 deltas x 1 bpc x 20 pairs
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 20);
}

TEST_CASE("emit_curve starts every block at the identical pair") {
  std::ostringstream out;
  emit_curve(out, 16, {1.0}, {4, 8}, 10, 3);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);  // header
  size_t block_starts = 0;
  size_t row = 0;
  while (std::getline(in, line)) {
    if (row % 10 == 0) {  // first pair of each (delta, bpc) block
      ++block_starts;
      CHECK(line.find(",0.000000,0.000000") != std::string::npos);
    }
    ++row;
  }
  CHECK(block_starts == 2);
}

TEST_CASE("emit_curve saturates onto the half plateau at large distances") {
  std::ostringstream out;
  emit_curve(out, 32, {1.0}, {8}, 60, 5);  // M = 256 bits
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);  // header
  const double radius = sbe::informative_radius(1.0, 1.0);
  double sum = 0.0;
  size_t n = 0;
  while (std::getline(in, line)) {
    double delta, euclid, hamming;
    unsigned m_bits;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%u,%lf,%lf", &delta, &m_bits,
                        &euclid, &hamming) == 4);
    CHECK(m_bits == 256u);
    if (euclid > 2.0 * radius) {
      sum += hamming;
      ++n;
    }
  }
  REQUIRE(n >= 10);
  CHECK(sum / static_cast<double>(n) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("emit_curve validates its parameters") {
  std::ostringstream out;
  CHECK_THROWS_AS(emit_curve(out, 0, {1.0}, {4}, 10, 1), BadParams);
  CHECK_THROWS_AS(emit_curve(out, 16, {}, {4}, 10, 1), BadParams);
  CHECK_THROWS_AS(emit_curve(out, 16, {1.0}, {}, 10, 1), BadParams);
  CHECK_THROWS_AS(emit_curve(out, 16, {1.0}, {4}, 1, 1), BadParams);
}
