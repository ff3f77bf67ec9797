#include "ppdeal/rng.hpp"

#include <random>

namespace ppdeal {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t os_entropy64() {
  std::random_device rd;
  return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace

Rng::Rng(uint64_t seed) : seed_(seed) {
  gmp_randinit_mt(state_);
  gmp_randseed_ui(state_, static_cast<unsigned long>(seed));
}

Rng::Rng() : Rng(os_entropy64()) {}

Rng::~Rng() {
  if (live_) gmp_randclear(state_);
}

Rng::Rng(Rng&& other) noexcept : seed_(other.seed_) {
  state_[0] = other.state_[0];
  other.live_ = false;
}

Bigint Rng::below(const Bigint& bound) {
  Bigint v;
  mpz_urandomm(v.get_mpz_t(), state_, bound.get_mpz_t());
  return v;
}

Bigint Rng::bits(unsigned n) {
  Bigint v;
  mpz_urandomb(v.get_mpz_t(), state_, n);
  return v;
}

uint64_t Rng::u64() {
  Bigint v = bits(64);
  uint64_t out = 0;
  // export may produce fewer than 8 bytes for small values
  Bytes raw = to_fixed_bytes(v, 8);
  for (uint8_t b : raw) out = (out << 8) | b;
  return out;
}

Bytes Rng::bytes(size_t n) {
  Bytes out(n);
  for (size_t i = 0; i < n; i += 32) {
    Bigint chunk = bits(256);
    Bytes raw = to_fixed_bytes(chunk, 32);
    size_t take = std::min<size_t>(32, n - i);
    std::copy(raw.begin(), raw.begin() + take, out.begin() + i);
  }
  return out;
}

std::array<uint8_t, 16> Rng::bytes16() {
  Bytes raw = bytes(16);
  std::array<uint8_t, 16> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

size_t Rng::index(size_t n) {
  Bigint v = below(Bigint(static_cast<unsigned long>(n)));
  return static_cast<size_t>(mpz_get_ui(v.get_mpz_t()));
}

uint64_t Rng::derive_seed(uint64_t label) const {
  return splitmix64(seed_ ^ splitmix64(label + 1));
}

}  // namespace ppdeal
