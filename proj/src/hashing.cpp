#include "ppdeal/hashing.hpp"

#include <openssl/sha.h>

namespace ppdeal {

Digest sha256(std::span<const uint8_t> data) {
  Digest d{};
  SHA256(data.data(), data.size(), d.data());
  return d;
}

Digest sha256(const std::string& data) {
  return sha256(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

DigestBuilder& DigestBuilder::add(std::span<const uint8_t> data) {
  buf_.insert(buf_.end(), data.begin(), data.end());
  return *this;
}

DigestBuilder& DigestBuilder::add(const std::string& data) {
  add_u32(static_cast<uint32_t>(data.size()));
  buf_.insert(buf_.end(), data.begin(), data.end());
  return *this;
}

DigestBuilder& DigestBuilder::add_u32(uint32_t v) {
  for (int i = 3; i >= 0; --i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  return *this;
}

DigestBuilder& DigestBuilder::add_u64(uint64_t v) {
  for (int i = 7; i >= 0; --i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  return *this;
}

Digest DigestBuilder::finish() const { return sha256(buf_); }

}  // namespace ppdeal
