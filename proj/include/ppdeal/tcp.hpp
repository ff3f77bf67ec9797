#pragma once

#include <memory>
#include <string>

#include "ppdeal/channel.hpp"

namespace ppdeal {

// "host:port" -> (host, port)
std::pair<std::string, uint16_t> parse_addr(const std::string& addr);

// Blocks until connected; retries until the deadline so peers may start in
// any order. Throws NetworkError on failure.
std::unique_ptr<Channel> tcp_connect(const std::string& host, uint16_t port,
                                     int deadline_ms = 10000);

class TcpListener {
 public:
  // port 0 picks an ephemeral port
  explicit TcpListener(uint16_t port, const std::string& host = "127.0.0.1");
  ~TcpListener();

  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  uint16_t port() const { return port_; }
  std::unique_ptr<Channel> accept(int timeout_ms = 10000);

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

}  // namespace ppdeal
