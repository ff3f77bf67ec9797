#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ppdeal {

using Bigint = mpz_class;
using Bytes = std::vector<uint8_t>;

// Big-endian, exactly `width` bytes; throws if the value needs more.
Bytes to_fixed_bytes(const Bigint& value, size_t width);

Bigint from_bytes(std::span<const uint8_t> data);

// Lowercase hex with 0x prefix; parser accepts with or without the prefix.
std::string to_hex(const Bigint& value);
Bigint from_hex(const std::string& hex);

size_t bit_length(const Bigint& value);

std::string bytes_to_hex(std::span<const uint8_t> data);
Bytes hex_to_bytes(const std::string& hex);

}  // namespace ppdeal
