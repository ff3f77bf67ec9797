#include "ppdeal/net.hpp"

#include <algorithm>

#include "ppdeal/errors.hpp"
#include "ppdeal/tcp.hpp"

namespace ppdeal::net {

size_t RingTopology::index_of(const std::string& id) const {
  for (size_t i = 0; i < parties.size(); ++i)
    if (parties[i].id == id) return i;
  if (mediator && mediator->id == id) return kMediatorSlot;
  throw ConfigError("party id not in ring config: " + id);
}

bool link_initiator(size_t self_slot, size_t peer_slot) {
  if (peer_slot == kMediatorSlot) return true;
  if (self_slot == kMediatorSlot) return false;
  return self_slot > peer_slot;
}

LinkSet::LinkSet(RawChannels raw, size_t self_slot, const HandshakeSpec& spec,
                 const Bytes& psk, Transcript& transcript, Rng& rng) {
  for (auto& [peer, channel] : raw) {
    Entry entry;
    entry.raw = std::move(channel);
    entries_.emplace(peer, std::move(entry));
  }
  // std::map iterates peers ascending with the mediator slot last, so every
  // role processes its handshakes in the same global order
  for (auto& [peer, entry] : entries_) {
    bool initiator = link_initiator(self_slot, peer);
    RecordingChannel clear(*entry.raw, transcript);
    entry.session = initiator ? handshake_initiate(clear, spec, rng)
                              : handshake_respond(clear, spec);
    Channel* protocol_side = entry.raw.get();
    if (spec.provider == Provider::psk) {
      entry.sealed = std::make_unique<PskChannel>(*entry.raw, psk, initiator);
      protocol_side = entry.sealed.get();
    }
    entry.recorded = std::make_unique<RecordingChannel>(*protocol_side, transcript);
    links_[peer] = Link{entry.recorded.get(), entry.session.id};
  }
}

RawChannels tcp_fabric(const RingTopology& topo, size_t self_slot, int timeout_ms,
                       TcpListener* pre_bound) {
  const size_t n = topo.parties.size();
  RawChannels channels;

  if (self_slot == kMediatorSlot) {
    if (!topo.mediator) throw ConfigError("no mediator in ring config");
    std::optional<TcpListener> own;
    if (!pre_bound) {
      auto [host, port] = parse_addr(topo.mediator->addr);
      own.emplace(port, host);
    }
    TcpListener& listener = pre_bound ? *pre_bound : *own;
    for (size_t i = 0; i < n; ++i) {
      auto ch = listener.accept(timeout_ms);
      auto [index, id] = read_link_hello(*ch);
      if (index >= n || topo.parties[index].id != id)
        throw ProtocolAbort(AbortCause::ring_order_mismatch,
                            "link hello from unknown party " + id);
      if (channels.count(index))
        throw ProtocolAbort(AbortCause::ring_order_mismatch,
                            "duplicate connection from " + id);
      channels.emplace(index, std::move(ch));
    }
    return channels;
  }

  if (self_slot >= n) throw ConfigError("self index outside ring");
  const std::string& self_id = topo.parties[self_slot].id;

  // bind before connecting out so peers can reach us in any start order
  std::optional<TcpListener> own_listener;
  TcpListener* listener = pre_bound;
  size_t expected_inbound = n - 1 - self_slot;
  if (expected_inbound > 0 && !listener) {
    auto [host, port] = parse_addr(topo.parties[self_slot].addr);
    own_listener.emplace(port, host);
    listener = &*own_listener;
  }

  for (size_t peer = 0; peer < self_slot; ++peer) {
    auto [host, port] = parse_addr(topo.parties[peer].addr);
    auto ch = tcp_connect(host, port, timeout_ms);
    send_link_hello(*ch, static_cast<uint32_t>(self_slot), self_id);
    channels.emplace(peer, std::move(ch));
  }
  if (topo.mediator) {
    auto [host, port] = parse_addr(topo.mediator->addr);
    auto ch = tcp_connect(host, port, timeout_ms);
    send_link_hello(*ch, static_cast<uint32_t>(self_slot), self_id);
    channels.emplace(kMediatorSlot, std::move(ch));
  }

  for (size_t i = 0; i < expected_inbound; ++i) {
    auto ch = listener->accept(timeout_ms);
    auto [index, id] = read_link_hello(*ch);
    if (index <= self_slot || index >= n || topo.parties[index].id != id)
      throw ProtocolAbort(AbortCause::ring_order_mismatch,
                          "unexpected link hello from " + id);
    if (channels.count(index))
      throw ProtocolAbort(AbortCause::ring_order_mismatch,
                          "duplicate connection from " + id);
    channels.emplace(index, std::move(ch));
  }
  return channels;
}

InProcFabric::InProcFabric(size_t n_parties, bool with_mediator) {
  for (size_t a = 0; a < n_parties; ++a)
    for (size_t b = a + 1; b < n_parties; ++b)
      edges_.emplace(std::make_pair(a, b), make_inproc_pair());
  if (with_mediator)
    for (size_t a = 0; a < n_parties; ++a)
      edges_.emplace(std::make_pair(a, kMediatorSlot), make_inproc_pair());
}

RawChannels InProcFabric::take(size_t slot) {
  RawChannels out;
  for (auto& [edge, pair] : edges_) {
    auto [a, b] = edge;
    if (a == slot && pair.first)
      out.emplace(b, std::move(pair.first));
    else if (b == slot && pair.second)
      out.emplace(a, std::move(pair.second));
  }
  return out;
}

}  // namespace ppdeal::net
