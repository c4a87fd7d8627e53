#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sbesumm/bitvec.hpp"
#include "sbesumm/transport.hpp"

namespace sbesumm::wire {

inline constexpr uint32_t kProtocolVersion = 1;

// Hard ceiling on a frame's payload; anything larger is rejected before
// allocation.
inline constexpr uint32_t kMaxPayloadBytes = 16u * 1024u * 1024u;

// Frame layout: payload length (u32, big-endian) | type tag (1 byte) |
// payload.  The length covers the payload only.  All wire integers are
// big-endian.
enum class MsgType : uint8_t {
  hello = 1,
  hash_batch = 2,
  rank_result = 3,
  bye = 4,
  error = 5,
};

enum class ErrorCode : uint32_t {
  version_mismatch = 1,
  malformed = 2,
  no_passages = 3,
  bad_index = 4,
  internal = 5,
};

// Session opener, sent by the owner and echoed back on acceptance.  m_bits
// fixes the hash width for every batch of the session.
struct Hello {
  uint32_t version = kProtocolVersion;
  uint32_t m_bits = 0;
};

// One round's hashed columns.  Payload: round (u32) | budget_hint (u32) |
// n_columns (u32) | roles (n_columns bytes, 1 = passage) | hashes
// (n_columns x ceil(m_bits/8) bytes, bit m at byte m/8 position m%8).
// budget_hint is an advisory passage count; the ranking side may ignore it.
struct HashBatch {
  uint32_t round = 0;
  uint32_t budget_hint = 0;
  std::vector<uint8_t> roles;
  std::vector<sbe::BitHash> hashes;
};

// Full passage ranking for one round, most central first.  Payload: round
// (u32) | count (u32) | count x u32 column indices.
struct RankResult {
  uint32_t round = 0;
  std::vector<uint32_t> indices;
};

// Orderly end of session; echoed by the serving side before closing.
struct Bye {};

// Fatal condition; the sender closes after transmitting.  Payload: code
// (u32) | UTF-8 text (rest of payload).
struct ErrorMsg {
  ErrorCode code = ErrorCode::internal;
  std::string text;
};

using Message = std::variant<Hello, HashBatch, RankResult, Bye, ErrorMsg>;

MsgType message_type(const Message& msg);

// Serializes and writes one frame.  Throws ProtocolViolation if the message
// cannot be represented (payload too large, hash width mismatch within a
// batch); TransportError bubbles up from the stream.
void send_message(net::ByteStream& stream, const Message& msg);

// Reads one frame.  `m_bits` is the session hash width needed to slice a
// HASH_BATCH; a batch arriving while it is still 0 (no HELLO yet) is a
// violation.  Malformed frames — unknown type, length mismatch, oversized
// payload, role bytes outside {0,1} — throw ProtocolViolation.
Message read_message(net::ByteStream& stream, uint32_t m_bits);

}  // namespace sbesumm::wire
