#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppdeal/channel.hpp"
#include "ppdeal/cipher.hpp"
#include "ppdeal/handshake.hpp"

namespace ppdeal::nego {

// Public discretization both parties share; handshake-checked byte identical.
struct PriceGrid {
  int64_t min_cents = 0;
  int64_t step_cents = 0;
  uint32_t n = 0;

  int64_t point(size_t i) const { return min_cents + static_cast<int64_t>(i) * step_cents; }
  int64_t max_cents() const { return point(n - 1); }
  void validate() const;

  // smallest grid index with point >= price (Bob rounds up); nullopt above max
  std::optional<size_t> ceil_index(int64_t price) const;
  // largest grid index with point <= price (Alice rounds down); nullopt below min
  std::optional<size_t> floor_index(int64_t price) const;

  bool operator==(const PriceGrid&) const = default;
};

enum class Role { alice, bob };
enum class Mode : uint8_t { alice_only = 0, symmetric = 1 };

const char* mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

// feasible=false carries no price for either role; Alice's outcome never
// carries a price derived from Bob's set.
struct NegotiationOutcome {
  Role role = Role::alice;
  bool feasible = false;
  std::optional<int64_t> matched_price;  // Bob, symmetric mode, feasible runs only
};

using Salt = std::array<uint8_t, 16>;

// "P" || salt || 8-byte big-endian cents
std::string price_encoding(const Salt& salt, int64_t cents);
// "X" || salt || 16-byte fresh nonce
std::string pad_encoding(const Salt& salt, Rng& rng);

// All grid points >= reservation (rounded up), ascending, padded to exactly
// n entries. Reservation above the grid yields all pads: the protocol still
// runs and is always infeasible.
std::vector<std::string> bob_accept_set(const PriceGrid& grid, int64_t reservation,
                                        const Salt& salt, Rng& rng);

// Exactly n entries: one bid encoding (rounded down), n-1 pads, shuffled.
std::vector<std::string> alice_vector(const PriceGrid& grid, int64_t bid,
                                      const Salt& salt, Rng& rng);

// All index pairs with equal values. Honest runs produce at most one; more
// means duplicate encodings (reported as an integrity warning by callers).
std::vector<std::pair<size_t, size_t>> compare_masked(
    std::span<const MaskedElement> a_double, std::span<const MaskedElement> b_double);

struct NegotiationConfig {
  GroupParams params;
  std::string params_name;
  PriceGrid grid;
  Mode mode = Mode::alice_only;
  Provider provider = Provider::null_provider;
  Bytes psk;
};

Digest negotiation_config_digest(const std::string& params_name, const PriceGrid& grid,
                                 Mode mode);

// Drives one full session over an established connection. The channel
// initiator draws the session salt; roles are independent of who connected.
NegotiationOutcome run_negotiation(Role role, int64_t secret_price,
                                   const NegotiationConfig& config, Channel& channel,
                                   bool channel_initiator, Transcript& transcript,
                                   Rng& rng);

}  // namespace ppdeal::nego
