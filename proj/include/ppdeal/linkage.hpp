#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppdeal/cipher.hpp"
#include "ppdeal/handshake.hpp"

namespace ppdeal::linkage {

using PartyId = std::string;

// One hop of the ring pass: element-wise masking. Order-preserving so the
// originator keeps the plaintext <-> ciphertext correspondence.
std::vector<MaskedElement> ring_hop(const GroupParams& params,
                                    std::span<const MaskedElement> items,
                                    const SecretKey& key);

// Test oracle: encode an item and apply every key; commutativity makes the
// result order-independent. Stays separate from the session code path.
MaskedElement full_mask_oracle(const GroupParams& params, std::string_view item,
                               std::span<const SecretKey> keys);

struct LocalMatch {
  size_t local_index = 0;
  size_t canonical_position = 0;

  bool operator==(const LocalMatch&) const = default;
};

struct LinkageResult {
  // masked values present in every published list, ascending by integer
  // value — the shared canonical order
  std::vector<MaskedElement> canonical_order;
  std::vector<LocalMatch> local_matches;
};

using PublishedLists = std::vector<std::pair<PartyId, std::vector<MaskedElement>>>;

std::vector<MaskedElement> publish_and_intersect(const PublishedLists& all_published);

// The untrusted-broker variant of the intersection step. Same output as
// publish_and_intersect; the mediator role holds no key material anywhere in
// its state (see MediatorState).
std::vector<MaskedElement> mediator_intersect(const PublishedLists& published);

// For each canonical element, the owning local index. A canonical element
// missing from the owner's list signals an order-preservation bug.
std::vector<LocalMatch> map_to_local(std::span<const std::string> own_plaintext_order,
                                     std::span<const MaskedElement> own_full_masked,
                                     std::span<const MaskedElement> canonical);

// keeps first occurrence, preserves order
std::vector<std::string> dedupe_items(std::span<const std::string> items);

struct RingConfig {
  std::vector<PartyId> parties;  // identical ring order at every party
  GroupParams params;
  std::string params_name;
  size_t self_index = 0;
  bool use_mediator = false;
};

Digest linkage_config_digest(const std::string& params_name,
                             std::span<const PartyId> parties, bool use_mediator);

// Established links to the peers this role talks to, keyed by ring index
// (parties) or kMediatorSlot.
constexpr size_t kMediatorSlot = static_cast<size_t>(-1);
using LinkMap = std::map<size_t, Link>;

struct PartyOutcome {
  LinkageResult result;
  std::vector<std::string> items;               // deduplicated, original order
  std::vector<MaskedElement> own_full_masked;   // aligned with items
};

// Runs the full protocol for one party: ring pass, publish (to peers or the
// mediator), intersection, local mapping.
PartyOutcome run_linkage_party(const RingConfig& config,
                               std::span<const std::string> own_items,
                               const SecretKey& key, const LinkMap& links);

// Everything the mediator ever holds: published lists and the canonical
// result. No SecretKey field exists, by construction.
struct MediatorState {
  PublishedLists published;
  std::vector<MaskedElement> canonical;

  Bytes dump(const GroupParams& params) const;  // for key-absence audits
};

MediatorState run_linkage_mediator(const GroupParams& params, size_t party_count,
                                   const LinkMap& links);

}  // namespace ppdeal::linkage
