#include "sbesumm/transport.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "sbesumm/errors.hpp"

namespace sbesumm::net {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw TransportError(what + ": " + std::strerror(errno));
}

// Socket-backed stream.  SIGPIPE is suppressed per send; reads treat an
// orderly shutdown (recv == 0) as TransportError since the protocol always
// knows how many bytes it expects.
class TcpStream final : public ByteStream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {}
  ~TcpStream() override { close(); }

  void write_all(const uint8_t* data, size_t n) override {
    while (n > 0) {
      const ssize_t sent = ::send(fd_, data, n, MSG_NOSIGNAL);
      if (sent < 0) {
        if (errno == EINTR) continue;
        throw_errno("send");
      }
      data += sent;
      n -= static_cast<size_t>(sent);
    }
  }

  void read_all(uint8_t* data, size_t n) override {
    while (n > 0) {
      const ssize_t got = ::recv(fd_, data, n, 0);
      if (got < 0) {
        if (errno == EINTR) continue;
        throw_errno("recv");
      }
      if (got == 0) {
        throw TransportError("recv: connection closed by peer");
      }
      data += got;
      n -= static_cast<size_t>(got);
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
};

// One direction of an in-memory duplex channel.
struct PipeChannel {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<uint8_t> bytes;
  bool closed = false;  // set by either endpoint; no further traffic

  void push(const uint8_t* data, size_t n) {
    {
      std::lock_guard<std::mutex> lock(mu);
      if (closed) {
        throw TransportError("pipe: peer closed");
      }
      bytes.insert(bytes.end(), data, data + n);
    }
    cv.notify_all();
  }

  void pull(uint8_t* data, size_t n) {
    std::unique_lock<std::mutex> lock(mu);
    size_t done = 0;
    while (done < n) {
      cv.wait(lock, [&] { return !bytes.empty() || closed; });
      if (bytes.empty()) {
        throw TransportError("pipe: connection closed by peer");
      }
      const size_t take = std::min(n - done, bytes.size());
      std::copy_n(bytes.begin(), take, data + done);
      bytes.erase(bytes.begin(), bytes.begin() + static_cast<ptrdiff_t>(take));
      done += take;
    }
  }

  void shut() {
    {
      std::lock_guard<std::mutex> lock(mu);
      closed = true;
    }
    cv.notify_all();
  }
};

class PipeStream final : public ByteStream {
 public:
  PipeStream(std::shared_ptr<PipeChannel> out, std::shared_ptr<PipeChannel> in)
      : out_(std::move(out)), in_(std::move(in)) {}
  ~PipeStream() override { close(); }

  void write_all(const uint8_t* data, size_t n) override { out_->push(data, n); }
  void read_all(uint8_t* data, size_t n) override { in_->pull(data, n); }

  void close() override {
    // closing tears down both directions, like a socket close
    out_->shut();
    in_->shut();
  }

 private:
  std::shared_ptr<PipeChannel> out_;
  std::shared_ptr<PipeChannel> in_;
};

}  // namespace

std::unique_ptr<ByteStream> tcp_connect(const std::string& host, uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* list = nullptr;
  const std::string service = std::to_string(port);
  const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &list);
  if (rc != 0) {
    throw TransportError("getaddrinfo " + host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  int saved_errno = 0;
  for (addrinfo* ai = list; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) {
      saved_errno = errno;
      continue;
    }
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    saved_errno = errno;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(list);
  if (fd < 0) {
    errno = saved_errno;
    throw_errno("connect " + host + ":" + service);
  }
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return std::make_unique<TcpStream>(fd);
}

TcpListener::TcpListener(const std::string& host, uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* list = nullptr;
  const std::string service = std::to_string(port);
  const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &list);
  if (rc != 0) {
    throw TransportError("getaddrinfo " + host + ": " + ::gai_strerror(rc));
  }
  for (addrinfo* ai = list; ai != nullptr; ai = ai->ai_next) {
    fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd_ < 0) continue;
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd_, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd_, 16) == 0) {
      break;
    }
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(list);
  if (fd_ < 0) {
    throw_errno("bind " + host + ":" + service);
  }
  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    throw_errno("getsockname");
  }
  if (addr.ss_family == AF_INET) {
    port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  } else {
    port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  }
}

TcpListener::~TcpListener() { close(); }

std::unique_ptr<ByteStream> TcpListener::accept() {
  while (true) {
    const int client = ::accept(fd_, nullptr, nullptr);
    if (client >= 0) {
      const int one = 1;
      ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return std::make_unique<TcpStream>(client);
    }
    if (errno == EINTR) continue;
    // close() shut the listening socket down; report end-of-listener
    return nullptr;
  }
}

void TcpListener::close() {
  if (fd_ >= 0) {
    // shutdown first so a blocked accept() wakes up before the fd vanishes
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe() {
  auto forward = std::make_shared<PipeChannel>();
  auto backward = std::make_shared<PipeChannel>();
  return {std::make_unique<PipeStream>(forward, backward),
          std::make_unique<PipeStream>(backward, forward)};
}

}  // namespace sbesumm::net
