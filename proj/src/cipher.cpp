#include "ppdeal/cipher.hpp"

#include <algorithm>
#include <cctype>

#include "ppdeal/errors.hpp"
#include "ppdeal/hashing.hpp"

namespace ppdeal {

namespace {

// 40 Miller-Rabin rounds: error probability < 4^-40 = 2^-80.
constexpr int kPrimalityReps = 40;

bool is_probable_prime(const Bigint& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), kPrimalityReps) != 0;
}

constexpr unsigned kMinGeneratedBits = 16;

}  // namespace

const char* encoding_mode_name(EncodingMode mode) {
  return mode == EncodingMode::hash_to_qr ? "hash_to_qr" : "raw_square_test";
}

EncodingMode encoding_mode_from_name(std::string_view name) {
  if (name == "hash_to_qr") return EncodingMode::hash_to_qr;
  if (name == "raw_square_test") return EncodingMode::raw_square_test;
  throw ConfigError("unknown encoding mode: " + std::string(name));
}

GroupParams GroupParams::from_prime(const Bigint& p, EncodingMode mode) {
  GroupParams params;
  params.p = p;
  params.q = (p - 1) / 2;
  params.bit_length = static_cast<unsigned>(ppdeal::bit_length(p));
  params.encoding = mode;
  params.validate();
  return params;
}

void GroupParams::validate() const {
  if (p < 7) throw ConfigError("modulus too small to contain a usable subgroup");
  if (p != 2 * q + 1) throw ConfigError("p != 2q + 1");
  if (!is_probable_prime(p)) throw ConfigError("p failed primality test");
  if (!is_probable_prime(q)) throw ConfigError("q failed primality test");
  if (bit_length != ppdeal::bit_length(p))
    throw ConfigError("bit_length does not match p");
}

GroupParams gen_group_params(unsigned bits, Rng& rng, EncodingMode mode) {
  if (bits < kMinGeneratedBits)
    throw ConfigError("bit_length must be at least " + std::to_string(kMinGeneratedBits));
  GroupParams params;
  params.bit_length = bits;
  params.encoding = mode;
  for (;;) {
    Bigint q = rng.bits(bits - 1);
    mpz_setbit(q.get_mpz_t(), bits - 2);
    mpz_setbit(q.get_mpz_t(), 0);
    if (!is_probable_prime(q)) continue;
    Bigint p = 2 * q + 1;
    if (bit_length(p) != bits) continue;
    if (!is_probable_prime(p)) continue;
    params.p = p;
    params.q = q;
    return params;
  }
}

SecretKey gen_secret_key(const GroupParams& params, Rng& rng) {
  // uniform in [1, q-1]
  return SecretKey{rng.below(params.q - 1) + 1};
}

namespace {

MaskedElement encode_raw_square(const GroupParams& params, std::string_view item) {
  if (item.empty()) throw ConfigError("cannot encode empty item");
  for (char c : item)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ConfigError("raw_square_test items must be decimal integers, got: " +
                        std::string(item));
  Bigint m;
  if (mpz_set_str(m.get_mpz_t(), std::string(item).c_str(), 10) != 0)
    throw ConfigError("unparseable raw item: " + std::string(item));
  m %= params.p;
  if (m == 0)
    throw DegenerateEncodingError("item is 0 mod p: " + std::string(item));
  Bigint out = (m * m) % params.p;
  if (out < 2)
    throw DegenerateEncodingError("item squares to a fixed point: " + std::string(item));
  return MaskedElement{out};
}

MaskedElement encode_hash_to_qr(const GroupParams& params, std::string_view item) {
  if (item.empty()) throw ConfigError("cannot encode empty item");
  const size_t needed = params.element_width() + 8;
  const size_t blocks = (needed + 31) / 32;
  // attempt k draws digest blocks with counters [k*blocks, (k+1)*blocks)
  for (uint32_t attempt = 0;; ++attempt) {
    Bytes expanded;
    expanded.reserve(blocks * 32);
    for (size_t i = 0; i < blocks; ++i) {
      uint32_t counter = attempt * static_cast<uint32_t>(blocks) + static_cast<uint32_t>(i);
      Bytes input(item.begin(), item.end());
      for (int b = 0; b < 4; ++b)
        input.push_back(static_cast<uint8_t>(counter >> (8 * b)));  // little-endian
      Digest d = sha256(input);
      expanded.insert(expanded.end(), d.begin(), d.end());
    }
    Bigint reduced = from_bytes(expanded) % params.p;
    Bigint out = (reduced * reduced) % params.p;
    if (out >= 2) return MaskedElement{out};
  }
}

}  // namespace

MaskedElement encode_item(const GroupParams& params, std::string_view item) {
  return params.encoding == EncodingMode::raw_square_test
             ? encode_raw_square(params, item)
             : encode_hash_to_qr(params, item);
}

MaskedElement mask(const GroupParams& params, const MaskedElement& elem,
                   const SecretKey& key) {
  Bigint out;
  mpz_powm(out.get_mpz_t(), elem.value.get_mpz_t(), key.exponent.get_mpz_t(),
           params.p.get_mpz_t());
  return MaskedElement{out};
}

SecretKey key_inverse(const GroupParams& params, const SecretKey& key) {
  Bigint inv;
  if (mpz_invert(inv.get_mpz_t(), key.exponent.get_mpz_t(), params.q.get_mpz_t()) == 0)
    throw ConfigError("key exponent not invertible mod q");
  return SecretKey{inv};
}

MaskedElement unmask(const GroupParams& params, const MaskedElement& elem,
                     const SecretKey& key) {
  return mask(params, elem, key_inverse(params, key));
}

bool is_subgroup_element(const GroupParams& params, const Bigint& value) {
  if (value < 1 || value >= params.p) return false;
  if (value == 1) return true;
  return mpz_legendre(value.get_mpz_t(), params.p.get_mpz_t()) == 1;
}

Bytes element_to_bytes(const GroupParams& params, const MaskedElement& elem) {
  return to_fixed_bytes(elem.value, params.element_width());
}

MaskedElement element_from_bytes(const GroupParams& params,
                                 std::span<const uint8_t> data) {
  if (data.size() != params.element_width())
    throw ProtocolAbort(AbortCause::malformed_element,
                        "element has wrong width: " + std::to_string(data.size()));
  Bigint v = from_bytes(data);
  if (!is_subgroup_element(params, v))
    throw ProtocolAbort(AbortCause::malformed_element,
                        "payload value outside the quadratic-residue subgroup");
  return MaskedElement{v};
}

Bytes key_to_bytes(const GroupParams& params, const SecretKey& key) {
  return to_fixed_bytes(key.exponent, params.element_width());
}

namespace {

// RFC 3526 group 14; (p-1)/2 is prime, re-checked by validate() on load.
constexpr const char* kModp2048Hex =
    "0xFFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

constexpr const char* kTest512Hex =
    "0x9925bd9ccb6e86ff4575782578149a09acd2ceab7c3f4e126cace537f8328764"
    "88748d7265f8c674891368931ccd6c34d98cfe61d768328ef805f22b8e10e1ff";

constexpr const char* kDlog40Hex = "0xf294065f93";
constexpr const char* kDlog20Hex = "0xae1c7";

}  // namespace

GroupParams named_params(std::string_view name) {
  if (name == "modp2048")
    return GroupParams::from_prime(from_hex(kModp2048Hex), EncodingMode::hash_to_qr);
  if (name == "test512")
    return GroupParams::from_prime(from_hex(kTest512Hex), EncodingMode::hash_to_qr);
  if (name == "dlog40")
    return GroupParams::from_prime(from_hex(kDlog40Hex), EncodingMode::hash_to_qr);
  if (name == "dlog20")
    return GroupParams::from_prime(from_hex(kDlog20Hex), EncodingMode::hash_to_qr);
  if (name == "toy16" || name == "toy32" || name == "toy64") {
    unsigned bits = name == "toy16" ? 16 : name == "toy32" ? 32 : 64;
    Rng rng(0x70707 + bits);
    return gen_group_params(bits, rng);
  }
  throw ConfigError("unknown parameter set: " + std::string(name));
}

std::vector<std::string> named_params_list() {
  return {"modp2048", "test512", "dlog40", "dlog20", "toy16", "toy32", "toy64"};
}

}  // namespace ppdeal
