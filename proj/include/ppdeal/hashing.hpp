#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "ppdeal/bigint.hpp"

namespace ppdeal {

using Digest = std::array<uint8_t, 32>;

Digest sha256(std::span<const uint8_t> data);
Digest sha256(const std::string& data);

// Incremental builder for canonical digests over multi-part inputs.
class DigestBuilder {
 public:
  DigestBuilder& add(std::span<const uint8_t> data);
  DigestBuilder& add(const std::string& data);
  DigestBuilder& add_u32(uint32_t v);
  DigestBuilder& add_u64(uint64_t v);
  Digest finish() const;

 private:
  Bytes buf_;
};

}  // namespace ppdeal
