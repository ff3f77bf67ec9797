#include "ppdeal/bigint.hpp"

#include <stdexcept>

#include "ppdeal/errors.hpp"

namespace ppdeal {

Bytes to_fixed_bytes(const Bigint& value, size_t width) {
  if (sgn(value) < 0) throw ConfigError("cannot serialize negative value");
  size_t needed = (mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8;
  if (value == 0) needed = 0;
  if (needed > width)
    throw ConfigError("value does not fit in " + std::to_string(width) + " bytes");
  Bytes out(width, 0);
  size_t count = 0;
  mpz_export(out.data() + (width - needed), &count, 1, 1, 1, 0, value.get_mpz_t());
  return out;
}

Bigint from_bytes(std::span<const uint8_t> data) {
  Bigint v;
  if (!data.empty()) mpz_import(v.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
  return v;
}

std::string to_hex(const Bigint& value) { return "0x" + value.get_str(16); }

Bigint from_hex(const std::string& hex) {
  std::string body = hex;
  if (body.rfind("0x", 0) == 0 || body.rfind("0X", 0) == 0) body = body.substr(2);
  if (body.empty()) throw ConfigError("empty hex integer");
  Bigint v;
  if (mpz_set_str(v.get_mpz_t(), body.c_str(), 16) != 0)
    throw ConfigError("bad hex integer: " + hex);
  return v;
}

size_t bit_length(const Bigint& value) {
  if (value == 0) return 0;
  return mpz_sizeinbase(value.get_mpz_t(), 2);
}

std::string bytes_to_hex(std::span<const uint8_t> data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

static int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Bytes hex_to_bytes(const std::string& hex) {
  if (hex.size() % 2 != 0) throw ConfigError("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    int hi = hex_nibble(hex[2 * i]);
    int lo = hex_nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw ConfigError("bad hex string");
    out[i] = static_cast<uint8_t>((hi << 4) | lo);
  }
  return out;
}

}  // namespace ppdeal
