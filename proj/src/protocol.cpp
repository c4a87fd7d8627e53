#include "sbesumm/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "sbesumm/errors.hpp"
#include "sbesumm/rng.hpp"

namespace sbesumm::proto {

namespace {

// Seed-stream tag for per-round parameter derivation.  Tags 1-4 belong to
// the hashing internals (projection rows, dither, curve streams); the round
// tag must stay distinct from them.
constexpr uint64_t kTagRound = 5;

void validate_config(const OwnerConfig& cfg) {
  if (cfg.bits_per_component < 1) {
    throw BadParams("bits_per_component must be at least 1");
  }
  if (!(cfg.target_leakage > 0.0) || cfg.target_leakage > 1.0) {
    throw BadParams("target_leakage must lie in (0, 1]");
  }
  if (cfg.fixed_delta < 0.0 || !std::isfinite(cfg.fixed_delta)) {
    throw BadParams("fixed_delta must be zero (unset) or a positive step");
  }
  if (!(cfg.sigma > 0.0)) {
    throw BadParams("sigma must be positive");
  }
}

sbe::SbeParams round_params(const text::CompactMatrix& m, const OwnerConfig& cfg,
                            uint32_t m_bits, uint32_t round) {
  const double delta =
      cfg.fixed_delta > 0.0
          ? cfg.fixed_delta
          : sbe::nearest_delta_for_leakage(m.weights, m.n_columns(), m.n_terms,
                                           cfg.target_leakage, cfg.sigma);
  const uint64_t seed = derive_seed(cfg.master_seed, kTagRound, round);
  return sbe::generate_params(seed, m.n_terms, m_bits,
                              static_cast<float>(delta),
                              static_cast<float>(cfg.sigma));
}

// Shared by the wire and local paths: the compute party's counts stay on its
// side, so the owner's view of a ranking is the order alone.
centrality::Ranking ranking_from_indices(const std::vector<uint32_t>& indices) {
  centrality::Ranking r;
  r.order = indices;
  r.counts.assign(indices.size(), 0);
  return r;
}

}  // namespace

uint32_t session_hash_bits(const std::vector<text::Document>& docs,
                           uint32_t bits_per_component) {
  if (bits_per_component < 1) {
    throw BadParams("bits_per_component must be at least 1");
  }
  std::unordered_set<std::string> vocabulary;
  for (const text::Document& d : docs) {
    for (std::string& token : text::tokenize(d.text)) {
      vocabulary.insert(std::move(token));
    }
  }
  if (vocabulary.empty()) {
    throw EmptyInput("session_hash_bits: corpus has no tokens");
  }
  const uint64_t m_bits = uint64_t{bits_per_component} * vocabulary.size();
  // a single hash must fit a frame with room to spare
  if (m_bits > (uint64_t{1} << 27)) {
    throw BadParams("session hash width exceeds the frame budget");
  }
  return static_cast<uint32_t>(m_bits);
}

uint32_t budget_hint(const text::CompactMatrix& m, size_t size_budget) {
  std::vector<size_t> counts;
  counts.reserve(m.n_passages);
  for (uint32_t c = 0; c < m.n_passages; ++c) {
    counts.push_back(text::word_count(m.column_texts[c]));
  }
  std::sort(counts.begin(), counts.end());
  uint32_t k = 0;
  size_t words = 0;
  for (size_t w : counts) {
    if (words + w > size_budget) break;
    words += w;
    ++k;
  }
  return std::max<uint32_t>(k, 1);
}

wire::HashBatch owner_prepare_round(const text::CompactMatrix& m,
                                    const OwnerConfig& cfg, uint32_t m_bits,
                                    uint32_t round) {
  validate_config(cfg);
  const sbe::SbeParams params = round_params(m, cfg, m_bits, round);
  wire::HashBatch batch;
  batch.round = round;
  batch.budget_hint = budget_hint(m, cfg.size_budget);
  batch.roles.assign(m.n_columns(), 0);
  std::fill_n(batch.roles.begin(), m.n_passages, uint8_t{1});
  batch.hashes = sbe::hash_columns(params, m.weights, m.n_columns());
  return batch;
}

wire::RankResult compute_rank_round(const wire::HashBatch& batch) {
  const bool any_passage =
      std::find(batch.roles.begin(), batch.roles.end(), uint8_t{1}) !=
      batch.roles.end();
  if (!any_passage) {
    throw ProtocolViolation("HASH_BATCH carries no passage columns");
  }
  const centrality::Ranking ranking =
      centrality::rank_hashes(batch.hashes, batch.roles);
  wire::RankResult result;
  result.round = batch.round;
  result.indices = ranking.order;
  return result;
}

void serve_session(net::ByteStream& stream) {
  uint32_t m_bits = 0;
  const auto fail = [&stream](wire::ErrorCode code, const std::string& text) {
    try {
      wire::send_message(stream, wire::ErrorMsg{code, text});
    } catch (...) {
      // the peer may already be gone; closing is all that is left
    }
    stream.close();
  };
  try {
    while (true) {
      const wire::Message msg = wire::read_message(stream, m_bits);
      if (const auto* hello = std::get_if<wire::Hello>(&msg)) {
        if (m_bits != 0) {
          fail(wire::ErrorCode::malformed, "duplicate HELLO");
          return;
        }
        if (hello->version != wire::kProtocolVersion) {
          fail(wire::ErrorCode::version_mismatch,
               "unsupported protocol version");
          return;
        }
        if (hello->m_bits == 0) {
          fail(wire::ErrorCode::malformed, "HELLO hash width must be positive");
          return;
        }
        m_bits = hello->m_bits;
        wire::send_message(stream, wire::Hello{wire::kProtocolVersion, m_bits});
      } else if (const auto* batch = std::get_if<wire::HashBatch>(&msg)) {
        const bool any_passage =
            std::find(batch->roles.begin(), batch->roles.end(), uint8_t{1}) !=
            batch->roles.end();
        if (!any_passage) {
          fail(wire::ErrorCode::no_passages, "batch has no passage columns");
          return;
        }
        wire::send_message(stream, compute_rank_round(*batch));
      } else if (std::holds_alternative<wire::Bye>(msg)) {
        try {
          wire::send_message(stream, wire::Bye{});
        } catch (...) {
        }
        stream.close();
        return;
      } else if (std::holds_alternative<wire::ErrorMsg>(msg)) {
        // the owner aborted; nothing to answer
        stream.close();
        return;
      } else {
        fail(wire::ErrorCode::malformed, "unexpected frame for this state");
        return;
      }
    }
  } catch (const ProtocolViolation& e) {
    fail(wire::ErrorCode::malformed, e.what());
  } catch (const TransportError&) {
    stream.close();
  } catch (const std::exception& e) {
    fail(wire::ErrorCode::internal, e.what());
  }
}

centrality::Summary run_secure_summarization(
    const std::vector<text::Document>& docs, const OwnerConfig& cfg,
    net::ByteStream& stream) {
  validate_config(cfg);
  if (docs.empty()) {
    throw EmptyCorpus("run_secure_summarization: no documents");
  }
  const uint32_t m_bits = session_hash_bits(docs, cfg.bits_per_component);
  const auto pool = text::extract_key_phrases(docs, cfg.kp_budget);

  // aborts of either flavor: best-effort ERROR frame, close, throw
  const auto abort_violation = [&stream](wire::ErrorCode code,
                                         const std::string& text)
      -> ProtocolViolation {
    try {
      wire::send_message(stream, wire::ErrorMsg{code, text});
    } catch (...) {
    }
    stream.close();
    return ProtocolViolation(text);
  };

  wire::send_message(stream, wire::Hello{wire::kProtocolVersion, m_bits});
  {
    const wire::Message reply = wire::read_message(stream, 0);
    if (const auto* err = std::get_if<wire::ErrorMsg>(&reply)) {
      stream.close();
      if (err->code == wire::ErrorCode::version_mismatch) {
        throw ProtocolMismatch("compute party: " + err->text);
      }
      throw ProtocolViolation("compute party: " + err->text);
    }
    const auto* hello = std::get_if<wire::Hello>(&reply);
    if (hello == nullptr) {
      throw abort_violation(wire::ErrorCode::malformed,
                            "expected HELLO echo");
    }
    if (hello->version != wire::kProtocolVersion) {
      try {
        wire::send_message(stream,
                           wire::ErrorMsg{wire::ErrorCode::version_mismatch,
                                          "unsupported protocol version"});
      } catch (...) {
      }
      stream.close();
      throw ProtocolMismatch("compute party runs protocol version " +
                             std::to_string(hello->version));
    }
    if (hello->m_bits != m_bits) {
      throw abort_violation(wire::ErrorCode::malformed,
                            "HELLO hash width echo mismatch");
    }
  }

  const waterfall::Ranker ranker = [&](const text::CompactMatrix& m,
                                       uint32_t round) {
    wire::send_message(stream, owner_prepare_round(m, cfg, m_bits, round));
    const wire::Message msg = wire::read_message(stream, m_bits);
    if (const auto* err = std::get_if<wire::ErrorMsg>(&msg)) {
      stream.close();
      throw ProtocolViolation("compute party: " + err->text);
    }
    const auto* rank = std::get_if<wire::RankResult>(&msg);
    if (rank == nullptr) {
      throw abort_violation(wire::ErrorCode::malformed,
                            "expected RANK_RESULT");
    }
    if (rank->round != round) {
      throw abort_violation(wire::ErrorCode::malformed,
                            "RANK_RESULT round echo mismatch");
    }
    // the reply must rank every passage column exactly once; passages
    // occupy the leading columns of the batch
    if (rank->indices.size() != m.n_passages) {
      throw abort_violation(wire::ErrorCode::bad_index,
                            "RANK_RESULT does not cover the passage columns");
    }
    std::vector<bool> seen(m.n_passages, false);
    for (uint32_t idx : rank->indices) {
      if (idx >= m.n_passages || seen[idx]) {
        throw abort_violation(wire::ErrorCode::bad_index,
                              "RANK_RESULT index out of contract: " +
                                  std::to_string(idx));
      }
      seen[idx] = true;
    }
    return ranking_from_indices(rank->indices);
  };

  centrality::Summary summary =
      waterfall::run_cascade(docs, pool, cfg.size_budget, ranker);

  wire::send_message(stream, wire::Bye{});
  const wire::Message bye = wire::read_message(stream, m_bits);
  if (!std::holds_alternative<wire::Bye>(bye)) {
    throw abort_violation(wire::ErrorCode::malformed, "expected BYE echo");
  }
  stream.close();
  return summary;
}

centrality::Summary run_secure_loopback(const std::vector<text::Document>& docs,
                                        const OwnerConfig& cfg) {
  auto [owner_end, compute_end] = net::make_pipe();
  std::thread server(
      [s = std::move(compute_end)]() mutable { serve_session(*s); });
  try {
    centrality::Summary summary =
        run_secure_summarization(docs, cfg, *owner_end);
    server.join();
    return summary;
  } catch (...) {
    owner_end->close();
    server.join();
    throw;
  }
}

centrality::Summary run_sbe_local(const std::vector<text::Document>& docs,
                                  const OwnerConfig& cfg) {
  validate_config(cfg);
  if (docs.empty()) {
    throw EmptyCorpus("run_sbe_local: no documents");
  }
  const uint32_t m_bits = session_hash_bits(docs, cfg.bits_per_component);
  const auto pool = text::extract_key_phrases(docs, cfg.kp_budget);
  const waterfall::Ranker ranker = [&](const text::CompactMatrix& m,
                                       uint32_t round) {
    const wire::HashBatch batch = owner_prepare_round(m, cfg, m_bits, round);
    return ranking_from_indices(compute_rank_round(batch).indices);
  };
  return waterfall::run_cascade(docs, pool, cfg.size_budget, ranker);
}

struct ComputeServer::Impl {
  net::TcpListener listener;
  std::thread acceptor;
  std::mutex mu;
  std::vector<std::thread> sessions;
  bool stopped = false;

  Impl(const std::string& host, uint16_t port) : listener(host, port) {}
};

ComputeServer::ComputeServer(const std::string& host, uint16_t port)
    : impl_(std::make_unique<Impl>(host, port)) {}

ComputeServer::~ComputeServer() { stop(); }

uint16_t ComputeServer::port() const { return impl_->listener.port(); }

void ComputeServer::serve_forever() {
  while (auto client = impl_->listener.accept()) {
    std::lock_guard<std::mutex> lock(impl_->mu);
    impl_->sessions.emplace_back(
        [s = std::shared_ptr<net::ByteStream>(std::move(client))] {
          serve_session(*s);
        });
  }
}

void ComputeServer::start() {
  impl_->acceptor = std::thread([this] { serve_forever(); });
}

void ComputeServer::stop() {
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    if (impl_->stopped) return;
    impl_->stopped = true;
  }
  impl_->listener.close();
  if (impl_->acceptor.joinable()) impl_->acceptor.join();
  std::vector<std::thread> sessions;
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    sessions.swap(impl_->sessions);
  }
  for (std::thread& t : sessions) t.join();
}

}  // namespace sbesumm::proto
