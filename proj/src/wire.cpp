#include "sbesumm/wire.hpp"

#include <cstring>

#include "sbesumm/errors.hpp"

namespace sbesumm::wire {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

// Cursor over a received payload; every getter enforces remaining length.
class Reader {
 public:
  explicit Reader(const std::vector<uint8_t>& buf) : buf_(buf) {}

  uint32_t u32() {
    need(4);
    const uint32_t v = (uint32_t{buf_[pos_]} << 24) |
                       (uint32_t{buf_[pos_ + 1]} << 16) |
                       (uint32_t{buf_[pos_ + 2]} << 8) | uint32_t{buf_[pos_ + 3]};
    pos_ += 4;
    return v;
  }

  const uint8_t* bytes(size_t n) {
    need(n);
    const uint8_t* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }

  size_t remaining() const { return buf_.size() - pos_; }

  void expect_consumed() const {
    if (pos_ != buf_.size()) {
      throw ProtocolViolation("frame payload longer than its content");
    }
  }

 private:
  void need(size_t n) const {
    if (buf_.size() - pos_ < n) {
      throw ProtocolViolation("frame payload shorter than its content");
    }
  }

  const std::vector<uint8_t>& buf_;
  size_t pos_ = 0;
};

std::vector<uint8_t> encode_payload(const Message& msg) {
  std::vector<uint8_t> p;
  if (const auto* hello = std::get_if<Hello>(&msg)) {
    put_u32(p, hello->version);
    put_u32(p, hello->m_bits);
  } else if (const auto* batch = std::get_if<HashBatch>(&msg)) {
    if (batch->roles.size() != batch->hashes.size()) {
      throw ProtocolViolation("HASH_BATCH role count != hash count");
    }
    put_u32(p, batch->round);
    put_u32(p, batch->budget_hint);
    put_u32(p, static_cast<uint32_t>(batch->roles.size()));
    for (uint8_t role : batch->roles) {
      if (role > 1) {
        throw ProtocolViolation("HASH_BATCH role byte outside {0,1}");
      }
      p.push_back(role);
    }
    const uint32_t width = batch->hashes.empty() ? 0 : batch->hashes[0].n_bits;
    for (const sbe::BitHash& h : batch->hashes) {
      if (h.n_bits != width) {
        throw ProtocolViolation("HASH_BATCH hash widths differ");
      }
      const auto bytes = h.to_bytes();
      p.insert(p.end(), bytes.begin(), bytes.end());
    }
  } else if (const auto* rank = std::get_if<RankResult>(&msg)) {
    put_u32(p, rank->round);
    put_u32(p, static_cast<uint32_t>(rank->indices.size()));
    for (uint32_t idx : rank->indices) put_u32(p, idx);
  } else if (std::get_if<Bye>(&msg)) {
    // empty payload
  } else {
    const auto& err = std::get<ErrorMsg>(msg);
    put_u32(p, static_cast<uint32_t>(err.code));
    p.insert(p.end(), err.text.begin(), err.text.end());
  }
  return p;
}

}  // namespace

MsgType message_type(const Message& msg) {
  switch (msg.index()) {
    case 0: return MsgType::hello;
    case 1: return MsgType::hash_batch;
    case 2: return MsgType::rank_result;
    case 3: return MsgType::bye;
    default: return MsgType::error;
  }
}

void send_message(net::ByteStream& stream, const Message& msg) {
  const std::vector<uint8_t> payload = encode_payload(msg);
  if (payload.size() > kMaxPayloadBytes) {
    throw ProtocolViolation("frame payload exceeds the 16 MiB limit");
  }
  std::vector<uint8_t> frame;
  frame.reserve(5 + payload.size());
  put_u32(frame, static_cast<uint32_t>(payload.size()));
  frame.push_back(static_cast<uint8_t>(message_type(msg)));
  frame.insert(frame.end(), payload.begin(), payload.end());
  stream.write_all(frame.data(), frame.size());
}

Message read_message(net::ByteStream& stream, uint32_t m_bits) {
  uint8_t head[5];
  stream.read_all(head, sizeof(head));
  const uint32_t length = (uint32_t{head[0]} << 24) | (uint32_t{head[1]} << 16) |
                          (uint32_t{head[2]} << 8) | uint32_t{head[3]};
  if (length > kMaxPayloadBytes) {
    throw ProtocolViolation("frame payload exceeds the 16 MiB limit");
  }
  std::vector<uint8_t> payload(length);
  if (length > 0) {
    stream.read_all(payload.data(), payload.size());
  }
  Reader r(payload);

  switch (head[4]) {
    case static_cast<uint8_t>(MsgType::hello): {
      Hello hello;
      hello.version = r.u32();
      hello.m_bits = r.u32();
      r.expect_consumed();
      return hello;
    }
    case static_cast<uint8_t>(MsgType::hash_batch): {
      if (m_bits == 0) {
        throw ProtocolViolation("HASH_BATCH before HELLO");
      }
      HashBatch batch;
      batch.round = r.u32();
      batch.budget_hint = r.u32();
      const uint32_t n_columns = r.u32();
      const size_t hash_bytes = (static_cast<size_t>(m_bits) + 7) / 8;
      const size_t expected = 12 + static_cast<size_t>(n_columns) * (1 + hash_bytes);
      if (payload.size() != expected) {
        throw ProtocolViolation("HASH_BATCH length does not match its column count");
      }
      const uint8_t* roles = r.bytes(n_columns);
      batch.roles.assign(roles, roles + n_columns);
      for (uint8_t role : batch.roles) {
        if (role > 1) {
          throw ProtocolViolation("HASH_BATCH role byte outside {0,1}");
        }
      }
      batch.hashes.reserve(n_columns);
      for (uint32_t c = 0; c < n_columns; ++c) {
        const uint8_t* bits = r.bytes(hash_bytes);
        batch.hashes.push_back(sbe::BitHash::from_bytes({bits, hash_bytes}, m_bits));
      }
      r.expect_consumed();
      return batch;
    }
    case static_cast<uint8_t>(MsgType::rank_result): {
      RankResult rank;
      rank.round = r.u32();
      const uint32_t count = r.u32();
      if (r.remaining() != static_cast<size_t>(count) * 4) {
        throw ProtocolViolation("RANK_RESULT length does not match its count");
      }
      rank.indices.reserve(count);
      for (uint32_t i = 0; i < count; ++i) rank.indices.push_back(r.u32());
      return rank;
    }
    case static_cast<uint8_t>(MsgType::bye): {
      r.expect_consumed();
      return Bye{};
    }
    case static_cast<uint8_t>(MsgType::error): {
      ErrorMsg err;
      const uint32_t code = r.u32();
      if (code < 1 || code > 5) {
        throw ProtocolViolation("ERROR frame carries an unknown code");
      }
      err.code = static_cast<ErrorCode>(code);
      const size_t text_len = r.remaining();
      const uint8_t* text = r.bytes(text_len);
      err.text.assign(reinterpret_cast<const char*>(text), text_len);
      return err;
    }
    default:
      throw ProtocolViolation("unknown frame type tag");
  }
}

}  // namespace sbesumm::wire
