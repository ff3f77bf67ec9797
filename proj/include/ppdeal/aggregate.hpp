#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppdeal/hashing.hpp"
#include "ppdeal/linkage.hpp"
#include "ppdeal/rng.hpp"

namespace ppdeal::sum {

// Ring secure-sum session parameters. The modular accumulator keeps every
// intermediate view uniform over the blind while party_count * value_bound
// < M preserves exactness.
struct SumParams {
  Bigint modulus;      // M
  uint32_t party_count = 0;
  Bigint value_bound;  // max allowed per-party value

  void validate() const;
  size_t acc_width() const;  // wire width: bytes of M-1
};

struct StartedSum {
  Bigint blind;        // R, known only to the initiator
  Bigint accumulator;  // starts at R
};

StartedSum start_sum(const SumParams& params, Rng& rng);

// acc' = (acc + value) mod M; value must be within [0, value_bound]
Bigint accumulate(const SumParams& params, const Bigint& acc, const Bigint& value);

struct SumResult {
  Bigint sum;
  Bigint average_num;  // reduced rational average
  Bigint average_den;

  bool operator==(const SumResult&) const = default;
};

SumResult finish(const SumParams& params, const Bigint& acc_final, const Bigint& blind);

Digest sum_config_digest(const SumParams& params,
                         std::span<const linkage::PartyId> parties, bool broadcast);

// Ring pass: only the initiator (ring index 0) learns the result unless
// broadcast is enabled, in which case it explicitly shares (sum, count).
std::optional<SumResult> run_sum_party(const SumParams& params, size_t ring_size,
                                       size_t self_index, const Bigint& own_value,
                                       bool broadcast, const linkage::LinkMap& links,
                                       Rng& rng);

}  // namespace ppdeal::sum
