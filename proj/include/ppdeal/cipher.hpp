#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppdeal/bigint.hpp"
#include "ppdeal/rng.hpp"

namespace ppdeal {

enum class EncodingMode {
  hash_to_qr,       // SHA-256 expansion, reduce mod p, square
  raw_square_test,  // decimal item squared mod p; toy verification only
};

const char* encoding_mode_name(EncodingMode mode);
EncodingMode encoding_mode_from_name(std::string_view name);

// Safe-prime group: p = 2q + 1 with p, q prime. All protocol values live in
// the order-q subgroup of quadratic residues mod p, so a masked value's
// Legendre symbol carries no information about the plaintext.
struct GroupParams {
  Bigint p;
  Bigint q;
  unsigned bit_length = 0;  // bits of p
  EncodingMode encoding = EncodingMode::hash_to_qr;

  size_t element_width() const { return (bit_length + 7) / 8; }

  // Validates primality (error < 2^-80), p == 2q+1, and bit_length.
  static GroupParams from_prime(const Bigint& p, EncodingMode mode);
  void validate() const;
};

// Masking exponent in [1, q-1]; q prime makes every key invertible mod q.
struct SecretKey {
  Bigint exponent;
};

// Group element in the quadratic-residue subgroup; the only value kind that
// ever appears inside protocol payloads.
struct MaskedElement {
  Bigint value;

  bool operator==(const MaskedElement& other) const { return value == other.value; }
  auto operator<=>(const MaskedElement& other) const { return cmp(value, other.value) <=> 0; }
};

GroupParams gen_group_params(unsigned bit_length, Rng& rng,
                             EncodingMode mode = EncodingMode::hash_to_qr);

SecretKey gen_secret_key(const GroupParams& params, Rng& rng);

// Deterministic hash-to-subgroup encoding of an arbitrary byte string.
MaskedElement encode_item(const GroupParams& params, std::string_view item);

MaskedElement mask(const GroupParams& params, const MaskedElement& elem,
                   const SecretKey& key);

SecretKey key_inverse(const GroupParams& params, const SecretKey& key);

MaskedElement unmask(const GroupParams& params, const MaskedElement& elem,
                     const SecretKey& key);

bool is_subgroup_element(const GroupParams& params, const Bigint& value);

// Fixed-width big-endian wire form, width = ceil(bit_length/8).
Bytes element_to_bytes(const GroupParams& params, const MaskedElement& elem);

// Parses and enforces subgroup membership; throws ProtocolAbort otherwise.
MaskedElement element_from_bytes(const GroupParams& params,
                                 std::span<const uint8_t> data);

Bytes key_to_bytes(const GroupParams& params, const SecretKey& key);

// Named parameter sets: modp2048 (RFC 3526 group 14), test512, dlog40,
// dlog20 (pinned constants, re-validated) and toy16/toy32/toy64 (generated
// deterministically from fixed seeds).
GroupParams named_params(std::string_view name);
std::vector<std::string> named_params_list();

}  // namespace ppdeal
