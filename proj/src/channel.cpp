#include "ppdeal/channel.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>

#include "ppdeal/errors.hpp"

namespace ppdeal {

namespace {

class ByteQueue {
 public:
  enum class Pop { ok, timeout, closed };

  void push(Bytes chunk) {
    {
      std::lock_guard lock(mu_);
      chunks_.push_back(std::move(chunk));
    }
    cv_.notify_one();
  }

  // mirrors a TCP close: the peer's pending and future reads fail fast
  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  Pop pop(Bytes& out, int timeout_ms) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                      [&] { return !chunks_.empty() || closed_; }))
      return Pop::timeout;
    if (chunks_.empty()) return Pop::closed;
    out = std::move(chunks_.front());
    chunks_.pop_front();
    return Pop::ok;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Bytes> chunks_;
  bool closed_ = false;
};

class InProcChannel : public Channel {
 public:
  InProcChannel(std::shared_ptr<ByteQueue> tx, std::shared_ptr<ByteQueue> rx)
      : tx_(std::move(tx)), rx_(std::move(rx)) {}

  ~InProcChannel() override { tx_->close(); }

  void send(const wire::WireMessage& msg) override { tx_->push(wire::frame(msg)); }

  wire::WireMessage recv() override {
    for (;;) {
      if (auto msg = reader_.next()) return *msg;
      Bytes chunk;
      switch (rx_->pop(chunk, timeout_ms_)) {
        case ByteQueue::Pop::timeout:
          throw ProtocolAbort(AbortCause::timeout,
                              "simulated channel receive timed out");
        case ByteQueue::Pop::closed:
          throw NetworkError("peer closed connection");
        case ByteQueue::Pop::ok:
          reader_.feed(chunk);
      }
    }
  }

  void set_timeout_ms(int ms) override { timeout_ms_ = ms; }

 private:
  std::shared_ptr<ByteQueue> tx_;
  std::shared_ptr<ByteQueue> rx_;
  wire::FrameReader reader_;
  int timeout_ms_ = 10000;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair() {
  auto a_to_b = std::make_shared<ByteQueue>();
  auto b_to_a = std::make_shared<ByteQueue>();
  return {std::make_unique<InProcChannel>(a_to_b, b_to_a),
          std::make_unique<InProcChannel>(b_to_a, a_to_b)};
}

namespace {

Bytes gcm_nonce(uint8_t dir, uint64_t counter) {
  Bytes nonce(12, 0);
  nonce[0] = dir;
  for (int i = 0; i < 8; ++i)
    nonce[4 + i] = static_cast<uint8_t>(counter >> (8 * (7 - i)));
  return nonce;
}

Bytes header_aad(const wire::WireMessage& msg) {
  Bytes aad;
  aad.push_back(msg.protocol_id);
  aad.push_back(msg.msg_type);
  aad.insert(aad.end(), msg.session_id.begin(), msg.session_id.end());
  return aad;
}

Bytes gcm_seal(const Bytes& key, const Bytes& nonce, const Bytes& aad,
               const Bytes& plain) {
  Bytes out(plain.size() + PskChannel::kTagSize);
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  int len = 0;
  bool ok = ctx &&
            EVP_EncryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, key.data(),
                               nonce.data()) == 1 &&
            EVP_EncryptUpdate(ctx, nullptr, &len, aad.data(), int(aad.size())) == 1 &&
            (plain.empty() ||
             EVP_EncryptUpdate(ctx, out.data(), &len, plain.data(),
                               int(plain.size())) == 1) &&
            EVP_EncryptFinal_ex(ctx, out.data() + plain.size(), &len) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_GET_TAG, PskChannel::kTagSize,
                                out.data() + plain.size()) == 1;
  EVP_CIPHER_CTX_free(ctx);
  if (!ok) throw NetworkError("AEAD seal failed");
  return out;
}

Bytes gcm_open(const Bytes& key, const Bytes& nonce, const Bytes& aad,
               const Bytes& sealed) {
  if (sealed.size() < PskChannel::kTagSize)
    throw ProtocolAbort(AbortCause::bad_frame, "sealed payload shorter than tag");
  size_t body = sealed.size() - PskChannel::kTagSize;
  Bytes out(body);
  Bytes tag(sealed.end() - PskChannel::kTagSize, sealed.end());
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  int len = 0;
  bool ok = ctx &&
            EVP_DecryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, key.data(),
                               nonce.data()) == 1 &&
            EVP_DecryptUpdate(ctx, nullptr, &len, aad.data(), int(aad.size())) == 1 &&
            (body == 0 ||
             EVP_DecryptUpdate(ctx, out.data(), &len, sealed.data(), int(body)) == 1) &&
            EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_TAG, PskChannel::kTagSize,
                                tag.data()) == 1 &&
            EVP_DecryptFinal_ex(ctx, out.data() + body, &len) == 1;
  EVP_CIPHER_CTX_free(ctx);
  if (!ok)
    throw ProtocolAbort(AbortCause::bad_frame, "AEAD authentication failed");
  return out;
}

}  // namespace

PskChannel::PskChannel(Channel& inner, const Bytes& key, bool initiator)
    : inner_(inner), key_(key), send_dir_(initiator ? 0 : 1) {
  if (key_.size() != kKeySize)
    throw ConfigError("psk provider needs a 32-byte key");
}

void PskChannel::send(const wire::WireMessage& msg) {
  wire::WireMessage sealed = msg;
  sealed.payload = gcm_seal(key_, gcm_nonce(send_dir_, send_counter_++),
                            header_aad(msg), msg.payload);
  inner_.send(sealed);
}

wire::WireMessage PskChannel::recv() {
  wire::WireMessage sealed = inner_.recv();
  wire::WireMessage msg = sealed;
  msg.payload = gcm_open(key_, gcm_nonce(send_dir_ ^ 1, recv_counter_++),
                         header_aad(sealed), sealed.payload);
  return msg;
}

}  // namespace ppdeal
