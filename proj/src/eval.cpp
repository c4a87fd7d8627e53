#include "sbesumm/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "sbesumm/errors.hpp"
#include "sbesumm/protocol.hpp"
#include "sbesumm/sbe.hpp"
#include "sbesumm/stem.hpp"
#include "sbesumm/textmodel.hpp"
#include "sbesumm/waterfall.hpp"

namespace sbesumm::eval {

namespace {

std::vector<std::string> fold_tokens(const std::vector<std::string>& tokens,
                                     bool use_stemming) {
  if (!use_stemming) return tokens;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.push_back(porter_stem(t));
  return out;
}

RougeScore score_against(const std::vector<std::string>& candidate,
                         const std::vector<std::string>& reference) {
  std::unordered_map<std::string, size_t> ref_counts;
  for (const std::string& t : reference) ++ref_counts[t];

  // clipped overlap: each candidate unigram matches at most its reference count
  size_t overlap = 0;
  std::unordered_map<std::string, size_t> used;
  for (const std::string& t : candidate) {
    const auto it = ref_counts.find(t);
    if (it != ref_counts.end() && used[t] < it->second) {
      ++used[t];
      ++overlap;
    }
  }

  RougeScore s;
  s.recall = static_cast<double>(overlap) / static_cast<double>(reference.size());
  s.precision = candidate.empty()
                    ? 0.0
                    : static_cast<double>(overlap) / static_cast<double>(candidate.size());
  const double rp = s.recall + s.precision;
  s.f1 = rp == 0.0 ? 0.0 : 2.0 * s.recall * s.precision / rp;
  return s;
}

std::string metric_name(centrality::Metric metric) {
  switch (metric) {
    case centrality::Metric::cosine: return "cosine";
    case centrality::Metric::euclidean: return "euclidean";
    case centrality::Metric::hamming: return "hamming";
  }
  return "?";
}

std::string summary_text(const centrality::Summary& summary) {
  std::string joined;
  for (const std::string& t : summary.texts) {
    if (!joined.empty()) joined += ' ';
    joined += t;
  }
  return joined;
}

RougeScore score_topic(const corpus::Topic& topic,
                       const centrality::Summary& summary,
                       const EvalOptions& opts) {
  return rouge1_text(summary_text(summary), topic.references, opts.use_stemming,
                     opts.agg);
}

std::string format_cell(const GridCell& cell) {
  if (!cell.valid) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", cell.mean_rouge1);
  return buf;
}

std::string format_percent(double leakage) {
  char buf[32];
  const double pct = leakage * 100.0;
  if (pct == static_cast<double>(static_cast<long long>(pct))) {
    std::snprintf(buf, sizeof(buf), "%lld%%", static_cast<long long>(pct));
  } else {
    std::snprintf(buf, sizeof(buf), "%.1f%%", pct);
  }
  return buf;
}

}  // namespace

RougeScore rouge1(const std::vector<std::string>& candidate,
                  const std::vector<std::vector<std::string>>& references,
                  bool use_stemming, RefAggregation agg) {
  if (references.empty()) {
    throw BadReference("rouge1: at least one reference is required");
  }
  for (const auto& ref : references) {
    if (ref.empty()) throw BadReference("rouge1: empty reference");
  }
  const std::vector<std::string> cand = fold_tokens(candidate, use_stemming);

  std::vector<RougeScore> per_ref;
  per_ref.reserve(references.size());
  for (const auto& ref : references) {
    per_ref.push_back(score_against(cand, fold_tokens(ref, use_stemming)));
  }

  if (agg == RefAggregation::max) {
    return *std::max_element(per_ref.begin(), per_ref.end(),
                             [](const RougeScore& a, const RougeScore& b) {
                               return a.f1 < b.f1;
                             });
  }
  RougeScore mean;
  for (const RougeScore& s : per_ref) {
    mean.recall += s.recall;
    mean.precision += s.precision;
    mean.f1 += s.f1;
  }
  const double n = static_cast<double>(per_ref.size());
  mean.recall /= n;
  mean.precision /= n;
  mean.f1 /= n;
  return mean;
}

RougeScore rouge1_text(const std::string& candidate,
                       const std::vector<std::string>& references,
                       bool use_stemming, RefAggregation agg) {
  std::vector<std::vector<std::string>> ref_tokens;
  ref_tokens.reserve(references.size());
  for (const std::string& r : references) {
    ref_tokens.push_back(text::tokenize(r));
  }
  return rouge1(text::tokenize(candidate), ref_tokens, use_stemming, agg);
}

RougeScore run_baseline(const corpus::Topic& topic, centrality::Metric metric,
                        const EvalOptions& opts) {
  const centrality::Summary summary = waterfall::summarize_multi(
      topic.docs, opts.kp_budget, opts.size_budget, metric);
  return score_topic(topic, summary, opts);
}

RougeScore run_baseline(const std::vector<corpus::Topic>& topics,
                        centrality::Metric metric, const EvalOptions& opts) {
  if (topics.empty()) throw EmptyCorpus("run_baseline: no topics");
  RougeScore mean;
  for (const corpus::Topic& topic : topics) {
    const RougeScore s = run_baseline(topic, metric, opts);
    mean.recall += s.recall;
    mean.precision += s.precision;
    mean.f1 += s.f1;
  }
  const double n = static_cast<double>(topics.size());
  mean.recall /= n;
  mean.precision /= n;
  mean.f1 /= n;
  return mean;
}

ExperimentGrid run_grid(const std::vector<corpus::Topic>& topics,
                        const std::vector<uint32_t>& bpc_values,
                        const std::vector<double>& leakage_targets,
                        const std::vector<uint64_t>& seeds,
                        const EvalOptions& opts) {
  if (topics.empty()) throw EmptyCorpus("run_grid: no topics");
  if (bpc_values.empty() || leakage_targets.empty() || seeds.empty()) {
    throw BadParams("run_grid: bpc, leakage and seed lists must be non-empty");
  }

  ExperimentGrid grid;
  grid.bpc_values = bpc_values;
  grid.leakage_targets = leakage_targets;
  grid.cells.resize(bpc_values.size() * leakage_targets.size());

  const auto run_cell = [&](uint32_t bpc, double leakage) -> GridCell {
    GridCell cell;
    try {
      double total = 0.0;
      size_t n_runs = 0;
      for (const corpus::Topic& topic : topics) {
        for (uint64_t seed : seeds) {
          proto::OwnerConfig cfg;
          cfg.master_seed = seed;
          cfg.kp_budget = opts.kp_budget;
          cfg.size_budget = opts.size_budget;
          cfg.bits_per_component = bpc;
          cfg.target_leakage = leakage;
          const centrality::Summary summary =
              proto::run_secure_loopback(topic.docs, cfg);
          total += score_topic(topic, summary, opts).recall;
          ++n_runs;
        }
      }
      cell.mean_rouge1 = total / static_cast<double>(n_runs);
      cell.valid = true;
    } catch (const Error& e) {
      cell.valid = false;
      cell.note = e.what();
    }
    return cell;
  };

  // independent cells, parallel execution, deterministic assembly
  std::vector<std::future<GridCell>> futures;
  futures.reserve(grid.cells.size());
  for (uint32_t bpc : bpc_values) {
    for (double leakage : leakage_targets) {
      futures.push_back(
          std::async(std::launch::async, run_cell, bpc, leakage));
    }
  }
  for (size_t i = 0; i < futures.size(); ++i) {
    grid.cells[i] = futures[i].get();
  }
  return grid;
}

std::string format_grid_table(const ExperimentGrid& grid) {
  constexpr int kColWidth = 9;
  std::ostringstream out;
  out << "bpc \\ leakage";
  for (double leakage : grid.leakage_targets) {
    const std::string label = format_percent(leakage);
    out << std::string(kColWidth - label.size(), ' ') << label;
  }
  out << '\n';
  for (size_t row = 0; row < grid.bpc_values.size(); ++row) {
    const std::string bpc = std::to_string(grid.bpc_values[row]);
    out << bpc << std::string(13 - bpc.size(), ' ');
    for (size_t col = 0; col < grid.leakage_targets.size(); ++col) {
      const std::string value = format_cell(grid.cell(row, col));
      out << std::string(kColWidth - value.size(), ' ') << value;
    }
    out << '\n';
  }
  return out.str();
}

std::string grid_to_json(const ExperimentGrid& grid) {
  nlohmann::json j;
  j["bpc_values"] = grid.bpc_values;
  j["leakage_targets"] = grid.leakage_targets;
  j["cells"] = nlohmann::json::array();
  for (size_t row = 0; row < grid.bpc_values.size(); ++row) {
    for (size_t col = 0; col < grid.leakage_targets.size(); ++col) {
      const GridCell& cell = grid.cell(row, col);
      nlohmann::json c;
      c["bpc"] = grid.bpc_values[row];
      c["leakage_target"] = grid.leakage_targets[col];
      c["valid"] = cell.valid;
      if (cell.valid) {
        c["mean_rouge1"] = cell.mean_rouge1;
      } else {
        c["note"] = cell.note;
      }
      j["cells"].push_back(std::move(c));
    }
  }
  return j.dump(2);
}

std::string format_baseline_table(const std::vector<BaselineRow>& rows) {
  size_t label_width = 5;  // "label"
  for (const BaselineRow& row : rows) {
    label_width = std::max(label_width, row.label.size());
  }
  std::ostringstream out;
  out << "label" << std::string(label_width - 5, ' ')
      << "  metric     recall  precision  f1\n";
  for (const BaselineRow& row : rows) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "  %-9s  %.3f   %.3f      %.3f",
                  metric_name(row.metric).c_str(), row.score.recall,
                  row.score.precision, row.score.f1);
    out << row.label << std::string(label_width - row.label.size(), ' ') << buf
        << '\n';
  }
  return out.str();
}

std::string baseline_to_json(const std::vector<BaselineRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const BaselineRow& row : rows) {
    nlohmann::json r;
    r["label"] = row.label;
    r["metric"] = metric_name(row.metric);
    r["recall"] = row.score.recall;
    r["precision"] = row.score.precision;
    r["f1"] = row.score.f1;
    j.push_back(std::move(r));
  }
  return j.dump(2);
}

void emit_curve(std::ostream& out, uint32_t l_dim,
                const std::vector<double>& deltas,
                const std::vector<uint32_t>& bpc_values, size_t n_pairs,
                uint64_t seed, double sigma) {
  if (l_dim == 0 || deltas.empty() || bpc_values.empty() || n_pairs < 2) {
    throw BadParams("emit_curve: need l_dim > 0, deltas, bpc values and >= 2 pairs");
  }
  out << "delta,m_bits,euclidean,hamming\n";
  for (double delta : deltas) {
    for (uint32_t bpc : bpc_values) {
      const uint32_t m_bits = bpc * l_dim;
      const auto points = sbe::embedding_curve(
          l_dim, m_bits, static_cast<float>(delta), static_cast<float>(sigma),
          n_pairs, seed);
      for (const sbe::CurvePoint& p : points) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%g,%u,%.6f,%.6f\n", delta, m_bits,
                      p.euclidean, p.hamming);
        out << buf;
      }
    }
  }
}

}  // namespace sbesumm::eval
