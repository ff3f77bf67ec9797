#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "ppdeal/bigint.hpp"

namespace ppdeal {

// Deterministic RNG (GMP Mersenne Twister) used for all randomness in the
// suite: keys, blinds, salts, pad nonces, session ids, shuffles. Seeded runs
// are fully reproducible; unseeded construction pulls entropy from the OS.
class Rng {
 public:
  explicit Rng(uint64_t seed);
  Rng();  // OS entropy
  ~Rng();

  Rng(const Rng&) = delete;
  Rng& operator=(const Rng&) = delete;
  Rng(Rng&& other) noexcept;

  // Uniform in [0, bound).
  Bigint below(const Bigint& bound);
  // Uniform n-bit value (may have leading zero bits).
  Bigint bits(unsigned n);
  uint64_t u64();
  Bytes bytes(size_t n);
  std::array<uint8_t, 16> bytes16();

  // Index in [0, n). n must be > 0.
  size_t index(size_t n);

  // Stable per-label sub-seed, so parallel parties forked from one master
  // seed draw independent streams.
  uint64_t derive_seed(uint64_t label) const;

 private:
  gmp_randstate_t state_;
  uint64_t seed_ = 0;
  bool live_ = true;
};

}  // namespace ppdeal
