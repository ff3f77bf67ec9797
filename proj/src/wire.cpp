#include "ppdeal/wire.hpp"

#include <cstring>

#include "ppdeal/errors.hpp"

namespace ppdeal::wire {

Bytes frame(const WireMessage& msg) {
  if (msg.payload.size() > kMaxPayload)
    throw ProtocolAbort(AbortCause::bad_frame, "payload exceeds frame limit");
  Bytes out;
  out.reserve(kHeaderSize + msg.payload.size());
  uint32_t len = static_cast<uint32_t>(msg.payload.size());
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<uint8_t>(len >> (8 * i)));
  out.push_back(msg.protocol_id);
  out.push_back(msg.msg_type);
  out.insert(out.end(), msg.session_id.begin(), msg.session_id.end());
  out.insert(out.end(), msg.payload.begin(), msg.payload.end());
  return out;
}

void FrameReader::feed(std::span<const uint8_t> data) {
  buf_.insert(buf_.end(), data.begin(), data.end());
}

std::optional<WireMessage> FrameReader::next() {
  if (buf_.size() < kHeaderSize) return std::nullopt;
  uint32_t len = (uint32_t(buf_[0]) << 24) | (uint32_t(buf_[1]) << 16) |
                 (uint32_t(buf_[2]) << 8) | uint32_t(buf_[3]);
  if (len > kMaxPayload)
    throw ProtocolAbort(AbortCause::bad_frame, "frame length exceeds limit");
  uint8_t proto = buf_[4];
  if (proto > kProtoSum)
    throw ProtocolAbort(AbortCause::bad_frame,
                        "unknown protocol id " + std::to_string(proto));
  if (buf_.size() < kHeaderSize + len) return std::nullopt;

  WireMessage msg;
  msg.protocol_id = proto;
  msg.msg_type = buf_[5];
  std::copy(buf_.begin() + 6, buf_.begin() + 22, msg.session_id.begin());
  msg.payload.assign(buf_.begin() + kHeaderSize, buf_.begin() + kHeaderSize + len);
  buf_.erase(buf_.begin(), buf_.begin() + kHeaderSize + len);
  return msg;
}

PayloadWriter& PayloadWriter::u8(uint8_t v) {
  buf_.push_back(v);
  return *this;
}

PayloadWriter& PayloadWriter::u32(uint32_t v) {
  for (int i = 3; i >= 0; --i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  return *this;
}

PayloadWriter& PayloadWriter::u64(uint64_t v) {
  for (int i = 7; i >= 0; --i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  return *this;
}

PayloadWriter& PayloadWriter::raw(std::span<const uint8_t> data) {
  buf_.insert(buf_.end(), data.begin(), data.end());
  return *this;
}

PayloadWriter& PayloadWriter::element(const GroupParams& params, const MaskedElement& e) {
  Bytes raw = element_to_bytes(params, e);
  buf_.insert(buf_.end(), raw.begin(), raw.end());
  return *this;
}

PayloadWriter& PayloadWriter::element_list(const GroupParams& params,
                                           std::span<const MaskedElement> elems) {
  u32(static_cast<uint32_t>(elems.size()));
  for (const MaskedElement& e : elems) element(params, e);
  return *this;
}

uint8_t PayloadReader::u8() {
  if (remaining() < 1)
    throw ProtocolAbort(AbortCause::bad_frame, "payload truncated");
  return data_[pos_++];
}

uint32_t PayloadReader::u32() {
  if (remaining() < 4)
    throw ProtocolAbort(AbortCause::bad_frame, "payload truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

uint64_t PayloadReader::u64() {
  if (remaining() < 8)
    throw ProtocolAbort(AbortCause::bad_frame, "payload truncated");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

Bytes PayloadReader::raw(size_t n) {
  if (remaining() < n)
    throw ProtocolAbort(AbortCause::bad_frame, "payload truncated");
  Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
  pos_ += n;
  return out;
}

MaskedElement PayloadReader::element(const GroupParams& params) {
  Bytes raw_bytes = raw(params.element_width());
  return element_from_bytes(params, raw_bytes);
}

std::vector<MaskedElement> PayloadReader::element_list(const GroupParams& params) {
  uint32_t count = u32();
  if (remaining() < size_t(count) * params.element_width())
    throw ProtocolAbort(AbortCause::bad_frame, "element list truncated");
  std::vector<MaskedElement> out;
  out.reserve(count);
  for (uint32_t i = 0; i < count; ++i) out.push_back(element(params));
  return out;
}

void PayloadReader::expect_end() const {
  if (remaining() != 0)
    throw ProtocolAbort(AbortCause::bad_frame, "payload has trailing bytes");
}

}  // namespace ppdeal::wire
