#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sbesumm/centrality.hpp"
#include "sbesumm/corpus.hpp"

namespace sbesumm::eval {

// Unigram-overlap score.  f1 is the harmonic mean of recall and precision,
// defined as 0 when both are 0.
struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

// Multi-reference aggregation: fieldwise arithmetic mean over references
// (order-invariant), or the single reference with the best f1.
enum class RefAggregation { mean, max };

// ROUGE-1 over pre-tokenized word lists.  Overlap counts are clipped at the
// reference count per unigram; per-reference recall divides by the reference
// length and precision by the candidate length.  Tokens are compared
// lowercase; `use_stemming` folds them through porter_stem first.  An empty
// candidate scores zero (not an error); no references, or any empty
// reference, is BadReference.
RougeScore rouge1(const std::vector<std::string>& candidate,
                  const std::vector<std::vector<std::string>>& references,
                  bool use_stemming = false,
                  RefAggregation agg = RefAggregation::mean);

// Convenience over raw text: tokenizes candidate and references first.
RougeScore rouge1_text(const std::string& candidate,
                       const std::vector<std::string>& references,
                       bool use_stemming = false,
                       RefAggregation agg = RefAggregation::mean);

struct EvalOptions {
  size_t kp_budget = 40;
  size_t size_budget = 250;
  bool use_stemming = false;
  RefAggregation agg = RefAggregation::mean;
};

// Plaintext pipeline scored against a topic's references.  The multi-topic
// overload averages the per-topic triples fieldwise.
RougeScore run_baseline(const corpus::Topic& topic, centrality::Metric metric,
                        const EvalOptions& opts = {});
RougeScore run_baseline(const std::vector<corpus::Topic>& topics,
                        centrality::Metric metric,
                        const EvalOptions& opts = {});

// One (bpc, leakage) grid cell: mean ROUGE-1 recall over every (topic, seed)
// pair — recall is the customary headline score for word-capped summaries.
// A cell whose runs fail (calibration or input errors) is marked invalid and
// carries the reason in `note`.
struct GridCell {
  double mean_rouge1 = 0.0;
  bool valid = false;
  std::string note;
};

// bpc rows x leakage-target columns, cells row-major.
struct ExperimentGrid {
  std::vector<uint32_t> bpc_values;
  std::vector<double> leakage_targets;
  std::vector<GridCell> cells;

  const GridCell& cell(size_t row, size_t col) const {
    return cells[row * leakage_targets.size() + col];
  }
};

// Runs the secure loopback pipeline for every (bpc, leakage, topic, seed)
// combination.  Cells are independent and run in parallel; assembly order is
// deterministic.
ExperimentGrid run_grid(const std::vector<corpus::Topic>& topics,
                        const std::vector<uint32_t>& bpc_values,
                        const std::vector<double>& leakage_targets,
                        const std::vector<uint64_t>& seeds,
                        const EvalOptions& opts = {});

// Aligned plain-text table, one bpc row per line; invalid cells print "n/a".
std::string format_grid_table(const ExperimentGrid& grid);
// Machine-readable mirror of the same grid.
std::string grid_to_json(const ExperimentGrid& grid);

// One plaintext-baseline report line.
struct BaselineRow {
  std::string label;
  centrality::Metric metric;
  RougeScore score;
};
std::string format_baseline_table(const std::vector<BaselineRow>& rows);
std::string baseline_to_json(const std::vector<BaselineRow>& rows);

// Embedding-curve CSV: header "delta,m_bits,euclidean,hamming", then
// n_pairs rows for every (delta, bpc) combination with m_bits = bpc * l_dim.
// The same base seed drives every combination, so the sampled pair geometry
// is paired across curves and the bytes are identical for a fixed seed.
void emit_curve(std::ostream& out, uint32_t l_dim,
                const std::vector<double>& deltas,
                const std::vector<uint32_t>& bpc_values, size_t n_pairs,
                uint64_t seed, double sigma = 1.0);

}  // namespace sbesumm::eval
