#include "ppdeal/linkage.hpp"

#include <algorithm>
#include <set>

#include "ppdeal/errors.hpp"

namespace ppdeal::linkage {

using namespace wire;

std::vector<MaskedElement> ring_hop(const GroupParams& params,
                                    std::span<const MaskedElement> items,
                                    const SecretKey& key) {
  std::vector<MaskedElement> out;
  out.reserve(items.size());
  for (const MaskedElement& e : items) out.push_back(mask(params, e, key));
  return out;
}

MaskedElement full_mask_oracle(const GroupParams& params, std::string_view item,
                               std::span<const SecretKey> keys) {
  MaskedElement e = encode_item(params, item);
  for (const SecretKey& k : keys) e = mask(params, e, k);
  return e;
}

std::vector<MaskedElement> publish_and_intersect(const PublishedLists& all_published) {
  if (all_published.empty())
    throw ProtocolAbort(AbortCause::count_mismatch, "no published lists");
  std::set<Bigint> common;
  for (const MaskedElement& e : all_published.front().second) common.insert(e.value);
  for (size_t i = 1; i < all_published.size(); ++i) {
    std::set<Bigint> next;
    for (const MaskedElement& e : all_published[i].second)
      if (common.count(e.value)) next.insert(e.value);
    common.swap(next);
  }
  std::vector<MaskedElement> out;
  out.reserve(common.size());
  for (const Bigint& v : common) out.push_back(MaskedElement{v});  // set is ascending
  return out;
}

std::vector<MaskedElement> mediator_intersect(const PublishedLists& published) {
  return publish_and_intersect(published);
}

std::vector<LocalMatch> map_to_local(std::span<const std::string> own_plaintext_order,
                                     std::span<const MaskedElement> own_full_masked,
                                     std::span<const MaskedElement> canonical) {
  if (own_plaintext_order.size() != own_full_masked.size())
    throw IntegrityError("plaintext/ciphertext lists misaligned");
  std::map<Bigint, size_t> position;
  for (size_t i = 0; i < own_full_masked.size(); ++i)
    position.emplace(own_full_masked[i].value, i);
  std::vector<LocalMatch> out;
  out.reserve(canonical.size());
  for (size_t c = 0; c < canonical.size(); ++c) {
    auto it = position.find(canonical[c].value);
    if (it == position.end())
      throw IntegrityError(
          "canonical element missing from own list (order preservation broken)");
    out.push_back({it->second, c});
  }
  return out;
}

std::vector<std::string> dedupe_items(std::span<const std::string> items) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const std::string& item : items)
    if (seen.insert(item).second) out.push_back(item);
  return out;
}

Digest linkage_config_digest(const std::string& params_name,
                             std::span<const PartyId> parties, bool use_mediator) {
  DigestBuilder b;
  b.add("linkage").add(params_name);
  b.add_u32(static_cast<uint32_t>(parties.size()));
  for (const PartyId& id : parties) b.add(id);
  b.add_u32(use_mediator ? 1 : 0);
  return b.finish();
}

namespace {

Bytes encode_list(const GroupParams& params, std::span<const MaskedElement> elems) {
  PayloadWriter w;
  w.element_list(params, elems);
  return w.take();
}

std::vector<MaskedElement> decode_list(const GroupParams& params,
                                       const WireMessage& msg) {
  PayloadReader r(msg.payload);
  std::vector<MaskedElement> out = r.element_list(params);
  r.expect_end();
  return out;
}

const Link& link_at(const LinkMap& links, size_t slot) {
  auto it = links.find(slot);
  if (it == links.end())
    throw ProtocolAbort(AbortCause::ring_order_mismatch,
                        "missing link to slot " + std::to_string(slot));
  return it->second;
}

}  // namespace

PartyOutcome run_linkage_party(const RingConfig& config,
                               std::span<const std::string> own_items,
                               const SecretKey& key, const LinkMap& links) {
  const GroupParams& params = config.params;
  const size_t n_parties = config.parties.size();
  const size_t self = config.self_index;

  PartyOutcome outcome;
  outcome.items = dedupe_items(own_items);

  std::vector<MaskedElement> own_masked;
  own_masked.reserve(outcome.items.size());
  for (const std::string& item : outcome.items)
    own_masked.push_back(mask(params, encode_item(params, item), key));

  if (n_parties == 1) {
    // degenerate ring: the single mask is the full mask
    outcome.own_full_masked = own_masked;
  } else {
    const Link& succ = link_at(links, (self + 1) % n_parties);
    const Link& pred = link_at(links, (self + n_parties - 1) % n_parties);

    // Each party first sends its own pass, then forwards incoming passes in
    // arrival order. With FIFO links this makes the k-th list a party
    // receives the one originated k hops upstream, so the last of the
    // n_parties arrivals is its own list, fully masked.
    succ.send(kProtoLinkage, kMsgRingPass, encode_list(params, own_masked));
    for (size_t k = 0; k + 1 < n_parties; ++k) {
      auto passing = decode_list(params, pred.recv_expect(kProtoLinkage, kMsgRingPass));
      succ.send(kProtoLinkage, kMsgRingPass,
                encode_list(params, ring_hop(params, passing, key)));
    }
    outcome.own_full_masked =
        decode_list(params, pred.recv_expect(kProtoLinkage, kMsgRingPass));
    if (outcome.own_full_masked.size() != own_masked.size())
      throw ProtocolAbort(AbortCause::count_mismatch,
                          "ring pass returned a list of different length");
  }

  std::vector<MaskedElement> canonical;
  if (config.use_mediator) {
    const Link& mediator = link_at(links, kMediatorSlot);
    mediator.send(kProtoLinkage, kMsgPublish,
                  encode_list(params, outcome.own_full_masked));
    canonical =
        decode_list(params, mediator.recv_expect(kProtoLinkage, kMsgCanonicalResult));
    for (size_t i = 1; i < canonical.size(); ++i)
      if (!(canonical[i - 1].value < canonical[i].value))
        throw ProtocolAbort(AbortCause::protocol_violation,
                            "mediator result is not strictly increasing");
  } else {
    PublishedLists all;
    all.emplace_back(config.parties[self], outcome.own_full_masked);
    for (size_t peer = 0; peer < n_parties; ++peer) {
      if (peer == self) continue;
      link_at(links, peer)
          .send(kProtoLinkage, kMsgPublish, encode_list(params, outcome.own_full_masked));
    }
    for (size_t peer = 0; peer < n_parties; ++peer) {
      if (peer == self) continue;
      all.emplace_back(config.parties[peer],
                       decode_list(params, link_at(links, peer)
                                               .recv_expect(kProtoLinkage, kMsgPublish)));
    }
    canonical = publish_and_intersect(all);
  }

  outcome.result.canonical_order = canonical;
  outcome.result.local_matches =
      map_to_local(outcome.items, outcome.own_full_masked, canonical);
  return outcome;
}

Bytes MediatorState::dump(const GroupParams& params) const {
  Bytes out;
  for (const auto& [id, list] : published)
    for (const MaskedElement& e : list) {
      Bytes raw = element_to_bytes(params, e);
      out.insert(out.end(), raw.begin(), raw.end());
    }
  for (const MaskedElement& e : canonical) {
    Bytes raw = element_to_bytes(params, e);
    out.insert(out.end(), raw.begin(), raw.end());
  }
  return out;
}

MediatorState run_linkage_mediator(const GroupParams& params, size_t party_count,
                                   const LinkMap& links) {
  MediatorState state;
  for (size_t peer = 0; peer < party_count; ++peer)
    state.published.emplace_back(
        std::to_string(peer),
        decode_list(params, link_at(links, peer).recv_expect(kProtoLinkage, kMsgPublish)));
  state.canonical = mediator_intersect(state.published);
  Bytes result = encode_list(params, state.canonical);
  for (size_t peer = 0; peer < party_count; ++peer)
    link_at(links, peer).send(kProtoLinkage, kMsgCanonicalResult, result);
  return state;
}

}  // namespace ppdeal::linkage
