#include "ppdeal/tcp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "ppdeal/errors.hpp"

namespace ppdeal {

namespace {

class TcpChannel : public Channel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {
    int one = 1;
    setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }

  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(const wire::WireMessage& msg) override {
    Bytes raw = wire::frame(msg);
    size_t sent = 0;
    while (sent < raw.size()) {
      ssize_t n = ::send(fd_, raw.data() + sent, raw.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) {
        if (n < 0 && errno == EINTR) continue;
        throw NetworkError("tcp send failed: " + std::string(strerror(errno)));
      }
      sent += static_cast<size_t>(n);
    }
  }

  wire::WireMessage recv() override {
    for (;;) {
      if (auto msg = reader_.next()) return *msg;
      struct pollfd pfd = {fd_, POLLIN, 0};
      int rc = ::poll(&pfd, 1, timeout_ms_);
      if (rc == 0)
        throw ProtocolAbort(AbortCause::timeout, "tcp receive timed out");
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw NetworkError("poll failed: " + std::string(strerror(errno)));
      }
      uint8_t buf[4096];
      ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
      if (n == 0) throw NetworkError("peer closed connection");
      if (n < 0) {
        if (errno == EINTR) continue;
        throw NetworkError("tcp recv failed: " + std::string(strerror(errno)));
      }
      reader_.feed({buf, static_cast<size_t>(n)});
    }
  }

  void set_timeout_ms(int ms) override { timeout_ms_ = ms; }

 private:
  int fd_;
  wire::FrameReader reader_;
  int timeout_ms_ = 10000;
};

}  // namespace

std::pair<std::string, uint16_t> parse_addr(const std::string& addr) {
  size_t colon = addr.rfind(':');
  if (colon == std::string::npos || colon + 1 >= addr.size())
    throw ConfigError("address must be host:port, got: " + addr);
  int port = std::stoi(addr.substr(colon + 1));
  if (port < 1 || port > 65535) throw ConfigError("bad port in address: " + addr);
  return {addr.substr(0, colon), static_cast<uint16_t>(port)};
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, uint16_t port,
                                     int deadline_ms) {
  auto deadline =
      std::chrono::steady_clock::now() + std::chrono::milliseconds(deadline_ms);
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1)
    throw NetworkError("bad IPv4 address: " + host);

  for (;;) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw NetworkError("socket() failed");
    if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) == 0)
      return std::make_unique<TcpChannel>(fd);
    ::close(fd);
    if (std::chrono::steady_clock::now() >= deadline)
      throw NetworkError("connect to " + host + ":" + std::to_string(port) +
                         " timed out");
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

TcpListener::TcpListener(uint16_t port, const std::string& host) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw NetworkError("socket() failed");
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
    ::close(fd_);
    throw NetworkError("bad IPv4 address: " + host);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
    ::close(fd_);
    throw NetworkError("bind to " + host + ":" + std::to_string(port) +
                       " failed: " + strerror(errno));
  }
  if (::listen(fd_, 64) != 0) {
    ::close(fd_);
    throw NetworkError("listen failed");
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Channel> TcpListener::accept(int timeout_ms) {
  struct pollfd pfd = {fd_, POLLIN, 0};
  int rc = ::poll(&pfd, 1, timeout_ms);
  if (rc == 0) throw NetworkError("accept timed out");
  if (rc < 0) throw NetworkError("poll failed on listener");
  int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw NetworkError("accept failed");
  return std::make_unique<TcpChannel>(fd);
}

}  // namespace ppdeal
