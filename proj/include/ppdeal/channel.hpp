#pragma once

#include <memory>
#include <utility>

#include "ppdeal/transcript.hpp"
#include "ppdeal/wire.hpp"

namespace ppdeal {

// Ordered, lossless message pipe. One logical task owns each end.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(const wire::WireMessage& msg) = 0;
  // Blocks up to the timeout, then throws ProtocolAbort(timeout).
  virtual wire::WireMessage recv() = 0;
  virtual void set_timeout_ms(int ms) = 0;
};

// In-process simulated network: a connected pair of channel endpoints.
// Delivery is FIFO per direction; bytes pass through the same framing code
// as the TCP transport.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair();

// Decorator recording plaintext protocol frames into a party transcript.
class RecordingChannel : public Channel {
 public:
  RecordingChannel(Channel& inner, Transcript& transcript)
      : inner_(inner), transcript_(transcript) {}

  void send(const wire::WireMessage& msg) override {
    transcript_.record_sent(msg);
    inner_.send(msg);
  }
  wire::WireMessage recv() override {
    wire::WireMessage msg = inner_.recv();
    transcript_.record_received(msg);
    return msg;
  }
  void set_timeout_ms(int ms) override { inner_.set_timeout_ms(ms); }

 private:
  Channel& inner_;
  Transcript& transcript_;
};

// Pre-shared-key channel security provider: AES-256-GCM over the payload
// with the 18-byte header (protocol, type, session id) as associated data.
// Nonce = direction byte || 3 zero bytes || 8-byte big-endian counter, one
// counter per direction per session. The header stays in the clear.
class PskChannel : public Channel {
 public:
  static constexpr size_t kKeySize = 32;
  static constexpr size_t kTagSize = 16;

  PskChannel(Channel& inner, const Bytes& key, bool initiator);

  void send(const wire::WireMessage& msg) override;
  wire::WireMessage recv() override;
  void set_timeout_ms(int ms) override { inner_.set_timeout_ms(ms); }

 private:
  Channel& inner_;
  Bytes key_;
  uint8_t send_dir_;
  uint64_t send_counter_ = 0;
  uint64_t recv_counter_ = 0;
};

}  // namespace ppdeal
