#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppdeal/bigint.hpp"
#include "ppdeal/cipher.hpp"

namespace ppdeal::wire {

// protocol ids
constexpr uint8_t kProtoHandshake = 0x00;
constexpr uint8_t kProtoLinkage = 0x01;
constexpr uint8_t kProtoNegotiation = 0x02;
constexpr uint8_t kProtoSum = 0x03;

// handshake message types
constexpr uint8_t kMsgHello = 0x01;
constexpr uint8_t kMsgHelloAck = 0x02;
constexpr uint8_t kMsgAbort = 0x03;
constexpr uint8_t kMsgLinkHello = 0x04;  // pre-handshake link identification

// linkage message types
constexpr uint8_t kMsgRingPass = 0x01;
constexpr uint8_t kMsgPublish = 0x02;
constexpr uint8_t kMsgCanonicalResult = 0x03;

// negotiation message types
constexpr uint8_t kMsgAliceMasked = 0x01;
constexpr uint8_t kMsgBobMaskedAndDouble = 0x02;
constexpr uint8_t kMsgAliceReturn = 0x03;
constexpr uint8_t kMsgFeasibility = 0x04;

// sum message types
constexpr uint8_t kMsgAcc = 0x01;
constexpr uint8_t kMsgResultBroadcast = 0x02;

constexpr size_t kHeaderSize = 22;  // 4 length + 1 proto + 1 type + 16 session
constexpr uint32_t kMaxPayload = 1u << 24;

using SessionId = std::array<uint8_t, 16>;

struct WireMessage {
  uint8_t protocol_id = 0;
  uint8_t msg_type = 0;
  SessionId session_id{};
  Bytes payload;

  bool operator==(const WireMessage&) const = default;
};

Bytes frame(const WireMessage& msg);

// Incremental deframer: feed arbitrary byte chunks, pop complete messages.
// Truncated input is buffered, never an error; oversized or unknown frames
// abort the connection.
class FrameReader {
 public:
  void feed(std::span<const uint8_t> data);
  std::optional<WireMessage> next();

 private:
  Bytes buf_;
};

// payload builders/readers (big-endian integers, fixed-width elements)

class PayloadWriter {
 public:
  PayloadWriter& u8(uint8_t v);
  PayloadWriter& u32(uint32_t v);
  PayloadWriter& u64(uint64_t v);
  PayloadWriter& raw(std::span<const uint8_t> data);
  PayloadWriter& element(const GroupParams& params, const MaskedElement& e);
  PayloadWriter& element_list(const GroupParams& params,
                              std::span<const MaskedElement> elems);
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

class PayloadReader {
 public:
  explicit PayloadReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t u8();
  uint32_t u32();
  uint64_t u64();
  Bytes raw(size_t n);
  MaskedElement element(const GroupParams& params);
  std::vector<MaskedElement> element_list(const GroupParams& params);
  size_t remaining() const { return data_.size() - pos_; }
  // a well-formed payload is consumed exactly
  void expect_end() const;

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

}  // namespace ppdeal::wire
