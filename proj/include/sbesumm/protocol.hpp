#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbesumm/centrality.hpp"
#include "sbesumm/sbe.hpp"
#include "sbesumm/textmodel.hpp"
#include "sbesumm/transport.hpp"
#include "sbesumm/waterfall.hpp"
#include "sbesumm/wire.hpp"

namespace sbesumm::proto {

// Everything the data owner decides up front.  The projection matrices and
// dither vectors derived from master_seed never leave the owner's process.
struct OwnerConfig {
  uint64_t master_seed = 0;
  size_t kp_budget = 40;          // key phrases extracted corpus-wide
  size_t size_budget = 250;       // summary length in words
  uint32_t bits_per_component = 8;  // hash width per full-vocabulary term
  double target_leakage = 0.95;   // per-round nearest achievable leakage
  double fixed_delta = 0.0;       // > 0 overrides target_leakage with a fixed step
  double sigma = 1.0;
};

// Session hash width: bits_per_component for every distinct token in the
// corpus.  Fixed once per session so message sizes reveal nothing about how
// the vocabulary is distributed across rounds.  Throws EmptyInput when the
// corpus has no tokens at all.
uint32_t session_hash_bits(const std::vector<text::Document>& docs,
                           uint32_t bits_per_component);

// Advisory passage count for a round: the largest k such that the k shortest
// passages fit the word budget (at least 1 — selection always keeps the top
// passage).  Deliberate, documented leakage: reveals a coarse relation
// between passage lengths and the budget, never the lengths themselves.
uint32_t budget_hint(const text::CompactMatrix& m, size_t size_budget);

// One round of owner-side preparation: fresh SbeParams seeded from
// (master_seed, round), per-round delta chosen against target_leakage via
// the nearest achievable step, every column hashed at the session width.
wire::HashBatch owner_prepare_round(const text::CompactMatrix& m,
                                    const OwnerConfig& cfg, uint32_t m_bits,
                                    uint32_t round);

// Compute-party ranking for one batch: support sets + membership counts
// under the normalized Hamming distance, full passage ranking returned.
// Throws ProtocolViolation when the batch has no passage columns.
wire::RankResult compute_rank_round(const wire::HashBatch& batch);

// Serves exactly one session on an open stream: HELLO handshake, then
// HASH_BATCH -> RANK_RESULT rounds until BYE.  Never throws: any violation
// or transport failure is answered with a best-effort ERROR frame and the
// stream is closed.
void serve_session(net::ByteStream& stream);

// Runs the waterfall cascade with every ranking round delegated through the
// wire protocol on `stream`.  Throws ProtocolMismatch when the HELLO versions
// disagree, ProtocolViolation on any malformed or out-of-contract reply (the
// session is aborted, no summary is produced), TransportError on stream
// failure.
centrality::Summary run_secure_summarization(
    const std::vector<text::Document>& docs, const OwnerConfig& cfg,
    net::ByteStream& stream);

// Same exchange over an in-process pipe with the serving side on a local
// thread; convenience for tests and offline use.
centrality::Summary run_secure_loopback(const std::vector<text::Document>& docs,
                                        const OwnerConfig& cfg);

// The identical computation without any wire layer: same per-round seeds,
// same delta policy, same Hamming ranking.  The protocol paths must agree
// with this byte for byte (transport transparency).
centrality::Summary run_sbe_local(const std::vector<text::Document>& docs,
                                  const OwnerConfig& cfg);

// TCP front for serve_session: accepts connections until stop() and serves
// each on its own thread with fully isolated session state.
class ComputeServer {
 public:
  explicit ComputeServer(const std::string& host = "127.0.0.1",
                         uint16_t port = 0);
  ~ComputeServer();
  ComputeServer(const ComputeServer&) = delete;
  ComputeServer& operator=(const ComputeServer&) = delete;

  uint16_t port() const;

  // Blocks until the listener closes; run this on a dedicated thread or use
  // start()/stop().
  void serve_forever();

  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sbesumm::proto
