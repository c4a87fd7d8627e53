// Command-line surface for the summarization toolkit: plaintext and secure
// two-party runs, the compute-party server, calibration, curve emission,
// evaluation reports, and benchmark-layout import.
//
// Exit codes: 0 ok, 2 usage, 3 input format, 4 transport, 5 protocol,
// 6 calibration.  Results go to stdout, diagnostics to stderr.  Flags beat
// environment variables (prefix SBESUMM_), which beat built-in defaults.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sbesumm/centrality.hpp"
#include "sbesumm/corpus.hpp"
#include "sbesumm/errors.hpp"
#include "sbesumm/eval.hpp"
#include "sbesumm/protocol.hpp"
#include "sbesumm/sbe.hpp"
#include "sbesumm/textmodel.hpp"
#include "sbesumm/transport.hpp"
#include "sbesumm/waterfall.hpp"

namespace {

using namespace sbesumm;

centrality::Metric parse_metric(const std::string& name) {
  if (name == "cosine") return centrality::Metric::cosine;
  if (name == "euclidean") return centrality::Metric::euclidean;
  throw BadParams("unknown metric: " + name);
}

// "host:port" with a numeric port; the last colon splits, so bare IPv4
// addresses and hostnames both work.  Anything unparseable is a usage error.
std::pair<std::string, uint16_t> parse_endpoint(const std::string& endpoint) {
  const size_t colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size()) {
    throw BadParams("endpoint must look like host:port, got: " + endpoint);
  }
  const std::string host = endpoint.substr(0, colon);
  unsigned long port = 0;
  try {
    size_t used = 0;
    port = std::stoul(endpoint.substr(colon + 1), &used);
    if (used != endpoint.size() - colon - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw BadParams("endpoint port is not a number: " + endpoint);
  }
  if (port > 65535) throw BadParams("endpoint port out of range: " + endpoint);
  return {host, static_cast<uint16_t>(port)};
}

void print_summary(const centrality::Summary& summary) {
  for (const std::string& text : summary.texts) {
    std::cout << text << '\n';
  }
}

// Shared option plumbing for the two pipeline commands.
struct PipelineOpts {
  std::string corpus_path;
  size_t kp_budget = 40;
  size_t size_budget = 250;

  void attach(CLI::App* sub) {
    sub->add_option("--corpus", corpus_path, "JSONL corpus path")
        ->required()
        ->envname("SBESUMM_CORPUS");
    sub->add_option("--kp-budget", kp_budget,
                    "key phrases extracted corpus-wide")
        ->capture_default_str()
        ->envname("SBESUMM_KP_BUDGET");
    sub->add_option("--size-budget", size_budget, "summary word budget")
        ->capture_default_str()
        ->envname("SBESUMM_SIZE_BUDGET");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Privacy-preserving extractive multi-document summarization toolkit"};
  app.require_subcommand(1);

  // ---- summarize -----------------------------------------------------------
  auto* p_summarize =
      app.add_subcommand("summarize", "Plaintext multi-document summarization");
  PipelineOpts sum_opts;
  sum_opts.attach(p_summarize);
  std::string sum_metric = "cosine";
  p_summarize
      ->add_option("--metric", sum_metric, "distance metric for centrality")
      ->check(CLI::IsMember({"cosine", "euclidean"}))
      ->capture_default_str()
      ->envname("SBESUMM_METRIC");
  p_summarize->callback([&] {
    const auto docs = corpus::load_corpus_jsonl(sum_opts.corpus_path);
    print_summary(waterfall::summarize_multi(docs, sum_opts.kp_budget,
                                             sum_opts.size_budget,
                                             parse_metric(sum_metric)));
  });

  // ---- secure-summarize ----------------------------------------------------
  auto* p_secure = app.add_subcommand(
      "secure-summarize",
      "Two-party run: this side owns the text, the peer ranks hashes");
  PipelineOpts sec_opts;
  sec_opts.attach(p_secure);
  std::string connect_endpoint;
  bool loopback = false;
  uint64_t seed = 0;
  uint32_t bpc = 8;
  double leakage = 0.95;
  double fixed_delta = 0.0;
  auto* connect_opt = p_secure->add_option(
      "--connect", connect_endpoint, "compute party endpoint host:port");
  connect_opt->envname("SBESUMM_CONNECT");
  auto* loopback_opt = p_secure->add_flag(
      "--loopback", loopback, "serve the compute party on a local thread");
  connect_opt->excludes(loopback_opt);
  p_secure->add_option("--seed", seed, "master seed for the owner's secrets")
      ->capture_default_str()
      ->envname("SBESUMM_SEED");
  p_secure->add_option("--bpc", bpc, "hash bits per vocabulary term")
      ->capture_default_str()
      ->envname("SBESUMM_BPC");
  auto* leakage_opt =
      p_secure->add_option("--leakage", leakage,
                           "target fraction of distance-revealing pairs")
          ->capture_default_str()
          ->envname("SBESUMM_LEAKAGE");
  auto* delta_opt = p_secure->add_option(
      "--delta", fixed_delta, "fixed quantization step (overrides --leakage)");
  delta_opt->envname("SBESUMM_DELTA");
  leakage_opt->excludes(delta_opt);
  p_secure->callback([&] {
    if (connect_endpoint.empty() && !loopback) {
      throw BadParams("secure-summarize needs --connect host:port or --loopback");
    }
    proto::OwnerConfig cfg;
    cfg.master_seed = seed;
    cfg.kp_budget = sec_opts.kp_budget;
    cfg.size_budget = sec_opts.size_budget;
    cfg.bits_per_component = bpc;
    if (delta_opt->count() > 0) {
      cfg.fixed_delta = fixed_delta;
    } else {
      cfg.target_leakage = leakage;
    }
    const auto docs = corpus::load_corpus_jsonl(sec_opts.corpus_path);
    if (loopback) {
      print_summary(proto::run_secure_loopback(docs, cfg));
    } else {
      const auto [host, port] = parse_endpoint(connect_endpoint);
      const auto stream = net::tcp_connect(host, port);
      print_summary(proto::run_secure_summarization(docs, cfg, *stream));
    }
  });

  // ---- serve ---------------------------------------------------------------
  auto* p_serve =
      app.add_subcommand("serve", "Run the compute party until terminated");
  std::string bind_endpoint = "127.0.0.1:7461";
  p_serve->add_option("--bind", bind_endpoint, "listen address host:port")
      ->capture_default_str()
      ->envname("SBESUMM_BIND");
  p_serve->callback([&] {
    const auto [host, port] = parse_endpoint(bind_endpoint);
    proto::ComputeServer server(host, port);
    std::fprintf(stderr, "listening on %s:%u\n", host.c_str(), server.port());
    server.serve_forever();
  });

  // ---- curve ---------------------------------------------------------------
  auto* p_curve = app.add_subcommand(
      "curve", "Emit hash-vs-Euclidean distance curve data as CSV");
  uint32_t l_dim = 1024;
  std::vector<uint32_t> curve_bpc = {4};
  std::vector<double> curve_deltas = {0.5, 1.0, 2.0, 4.0};
  size_t n_pairs = 2000;
  uint64_t curve_seed = 0;
  double curve_sigma = 1.0;
  std::string out_path;
  p_curve->add_option("--L,--l-dim", l_dim, "input dimensionality")
      ->capture_default_str()
      ->envname("SBESUMM_L_DIM");
  p_curve->add_option("--bpc", curve_bpc, "bits per coefficient (M = bpc * L)")
      ->delimiter(',')
      ->capture_default_str()
      ->envname("SBESUMM_BPC");
  p_curve->add_option("--delta", curve_deltas, "quantization steps to sweep")
      ->delimiter(',')
      ->capture_default_str()
      ->envname("SBESUMM_DELTA");
  p_curve->add_option("--pairs", n_pairs, "sampled pairs per curve")
      ->capture_default_str()
      ->envname("SBESUMM_PAIRS");
  p_curve->add_option("--seed", curve_seed, "sampling seed")
      ->capture_default_str()
      ->envname("SBESUMM_SEED");
  p_curve->add_option("--sigma", curve_sigma, "projection std-dev")
      ->capture_default_str()
      ->envname("SBESUMM_SIGMA");
  p_curve->add_option("--out", out_path, "write CSV here instead of stdout");
  p_curve->callback([&] {
    if (out_path.empty()) {
      eval::emit_curve(std::cout, l_dim, curve_deltas, curve_bpc, n_pairs,
                       curve_seed, curve_sigma);
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw InputFormatError("cannot write " + out_path);
      eval::emit_curve(out, l_dim, curve_deltas, curve_bpc, n_pairs, curve_seed,
                       curve_sigma);
    }
  });

  // ---- calibrate -----------------------------------------------------------
  auto* p_calibrate = app.add_subcommand(
      "calibrate", "Choose a quantization step for a target leakage");
  PipelineOpts cal_opts;
  cal_opts.attach(p_calibrate);
  double cal_target = 0.95;
  double cal_tolerance = 0.02;
  double cal_sigma = 1.0;
  p_calibrate->add_option("--target", cal_target, "target leakage in (0, 1]")
      ->capture_default_str()
      ->envname("SBESUMM_TARGET");
  p_calibrate
      ->add_option("--tolerance", cal_tolerance, "acceptable leakage error")
      ->capture_default_str()
      ->envname("SBESUMM_TOLERANCE");
  p_calibrate->add_option("--sigma", cal_sigma, "projection std-dev")
      ->capture_default_str()
      ->envname("SBESUMM_SIGMA");
  p_calibrate->callback([&] {
    const auto docs = corpus::load_corpus_jsonl(cal_opts.corpus_path);
    std::vector<text::Passage> passages;
    for (const auto& doc : docs) {
      for (auto& p : text::split_passages(doc)) passages.push_back(std::move(p));
    }
    const auto phrases = text::extract_key_phrases(docs, cal_opts.kp_budget);
    const auto m = text::build_compact_matrix(passages, phrases);
    const double delta = sbe::calibrate_delta(m.weights, m.n_columns(),
                                              m.n_terms, cal_target,
                                              cal_tolerance, cal_sigma);
    const auto params =
        sbe::generate_params(0, m.n_terms, 64, static_cast<float>(delta),
                             static_cast<float>(cal_sigma));
    const double achieved = sbe::estimate_leakage(params, m.weights,
                                                  m.n_columns());
    std::printf("delta %.6g\n", delta);
    std::printf("achieved_leakage %.6g\n", achieved);
  });

  // ---- eval ----------------------------------------------------------------
  auto* p_eval = app.add_subcommand(
      "eval", "Score pipelines against reference summaries");
  std::string data_dir;
  bool do_baseline = false;
  bool do_grid = false;
  bool as_json = false;
  bool stemming = false;
  std::string agg = "mean";
  std::vector<uint32_t> grid_bpc = {4, 8, 16};
  std::vector<double> grid_leakage = {0.05, 0.25, 0.50, 0.75, 0.95};
  std::vector<uint64_t> grid_seeds = {1, 2, 3, 4, 5};
  size_t eval_kp = 40;
  size_t eval_size = 250;
  p_eval->add_option("--data", data_dir,
                     "dataset directory (docs/*.jsonl + refs/<topic>/)")
      ->required()
      ->envname("SBESUMM_DATA");
  p_eval->add_flag("--baseline", do_baseline,
                   "plaintext cosine and euclidean reference scores");
  p_eval->add_flag("--grid", do_grid, "secure bpc x leakage grid");
  p_eval->add_flag("--json", as_json, "machine-readable output");
  p_eval->add_flag("--stemming", stemming, "fold tokens with a Porter stemmer");
  p_eval->add_option("--agg", agg, "multi-reference aggregation")
      ->check(CLI::IsMember({"mean", "max"}))
      ->capture_default_str();
  p_eval->add_option("--bpc", grid_bpc, "grid rows")
      ->delimiter(',')
      ->capture_default_str();
  p_eval->add_option("--leakage", grid_leakage, "grid columns")
      ->delimiter(',')
      ->capture_default_str();
  p_eval->add_option("--seeds", grid_seeds, "master seeds averaged per cell")
      ->delimiter(',')
      ->capture_default_str();
  p_eval->add_option("--kp-budget", eval_kp, "key phrases per run")
      ->capture_default_str()
      ->envname("SBESUMM_KP_BUDGET");
  p_eval->add_option("--size-budget", eval_size, "summary word budget")
      ->capture_default_str()
      ->envname("SBESUMM_SIZE_BUDGET");
  p_eval->callback([&] {
    if (!do_baseline && !do_grid) {
      throw BadParams("eval needs --baseline, --grid, or both");
    }
    const auto topics = corpus::load_dataset(data_dir);
    eval::EvalOptions opts;
    opts.kp_budget = eval_kp;
    opts.size_budget = eval_size;
    opts.use_stemming = stemming;
    opts.agg = agg == "max" ? eval::RefAggregation::max
                            : eval::RefAggregation::mean;
    if (do_baseline) {
      std::vector<eval::BaselineRow> rows;
      for (const auto metric :
           {centrality::Metric::cosine, centrality::Metric::euclidean}) {
        rows.push_back({data_dir, metric, eval::run_baseline(topics, metric, opts)});
      }
      std::cout << (as_json ? eval::baseline_to_json(rows)
                            : eval::format_baseline_table(rows));
      if (as_json) std::cout << '\n';
    }
    if (do_grid) {
      const auto grid =
          eval::run_grid(topics, grid_bpc, grid_leakage, grid_seeds, opts);
      std::cout << (as_json ? eval::grid_to_json(grid)
                            : eval::format_grid_table(grid));
      if (as_json) std::cout << '\n';
    }
  });

  // ---- import --------------------------------------------------------------
  auto* p_import = app.add_subcommand(
      "import", "Convert a benchmark document/model layout to the dataset "
                "layout used by eval");
  std::string import_docs, import_models, import_out;
  p_import->add_option("--docs", import_docs, "topic subdirectories of articles")
      ->required();
  p_import->add_option("--models", import_models, "flat model-summary files");
  p_import->add_option("--out", import_out, "destination dataset directory")
      ->required();
  p_import->callback([&] {
    const size_t n =
        corpus::import_dataset(import_docs, import_models, import_out);
    std::printf("imported %zu topics\n", n);
  });

  // ---- dispatch and exit-code mapping -------------------------------------
  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? 0 : 2;
  } catch (const InputFormatError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 3;
  } catch (const EmptyCorpus& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 3;
  } catch (const EmptyInput& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 3;
  } catch (const BadReference& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 3;
  } catch (const DegenerateColumn& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 3;
  } catch (const TransportError& e) {
    std::fprintf(stderr, "transport error: %s\n", e.what());
    return 4;
  } catch (const ProtocolMismatch& e) {
    std::fprintf(stderr, "protocol error: %s\n", e.what());
    return 5;
  } catch (const ProtocolViolation& e) {
    std::fprintf(stderr, "protocol error: %s\n", e.what());
    return 5;
  } catch (const CalibrationFailed& e) {
    std::fprintf(stderr, "calibration error: %s\n", e.what());
    return 6;
  } catch (const BadParams& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const DimensionMismatch& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
