#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>

namespace sbesumm::net {

// Blocking, reliable, ordered byte stream.  All failures — including a peer
// closing mid-read — surface as TransportError so protocol code never sees
// short reads.
class ByteStream {
 public:
  virtual ~ByteStream() = default;

  // Writes exactly n bytes or throws TransportError.
  virtual void write_all(const uint8_t* data, size_t n) = 0;

  // Reads exactly n bytes or throws TransportError (EOF included).
  virtual void read_all(uint8_t* data, size_t n) = 0;

  // Idempotent; unblocks the peer's pending reads with EOF.
  virtual void close() = 0;
};

// Connects to host:port (numeric or resolvable name); TransportError when no
// candidate address accepts the connection.
std::unique_ptr<ByteStream> tcp_connect(const std::string& host, uint16_t port);

// Listening socket bound to `host`; port 0 picks an ephemeral port, readable
// afterwards via port().  close() unblocks a pending accept().
class TcpListener {
 public:
  TcpListener(const std::string& host, uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  uint16_t port() const { return port_; }

  // Next client connection, or nullptr once close() was called.
  std::unique_ptr<ByteStream> accept();

  void close();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

// Pair of connected in-memory endpoints: bytes written to one side are read
// from the other.  Blocking semantics mirror a socket, including EOF after
// the peer closes; useful for loopback sessions and deterministic tests.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe();

}  // namespace sbesumm::net
