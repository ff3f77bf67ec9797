#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ppdeal/handshake.hpp"
#include "ppdeal/linkage.hpp"
#include "ppdeal/tcp.hpp"

namespace ppdeal::net {

constexpr size_t kMediatorSlot = linkage::kMediatorSlot;

struct PartySpec {
  std::string id;
  std::string addr;  // host:port; unused on the simulated network
};

// Parsed ring configuration shared by the linkage and averaging protocols.
struct RingTopology {
  std::string params_name;
  std::vector<PartySpec> parties;  // ring order
  std::optional<PartySpec> mediator;
  Provider provider = Provider::null_provider;
  Bytes psk;
  // averaging session parameters ([sum] section)
  Bigint sum_modulus = 0;
  Bigint sum_value_bound = 0;

  size_t index_of(const std::string& id) const;  // kMediatorSlot for the mediator id
};

// Raw, pre-handshake channels keyed by peer slot (ring index, or
// kMediatorSlot for the broker).
using RawChannels = std::map<size_t, std::unique_ptr<Channel>>;

// The handshake initiator on a link: the TCP-client side. Parties initiate
// toward the mediator; between parties the higher ring index initiates.
bool link_initiator(size_t self_slot, size_t peer_slot);

// Owns the per-link channel stacks (transport, optional PSK seal, transcript
// recording) and exposes the established Link views. Handshakes run in
// ascending peer-slot order, which keeps seeded runs byte-identical across
// transports.
class LinkSet {
 public:
  LinkSet(RawChannels raw, size_t self_slot, const HandshakeSpec& spec,
          const Bytes& psk, Transcript& transcript, Rng& rng);

  const linkage::LinkMap& links() const { return links_; }

 private:
  struct Entry {
    std::unique_ptr<Channel> raw;
    std::unique_ptr<PskChannel> sealed;
    std::unique_ptr<RecordingChannel> recorded;
    Session session;
  };
  std::map<size_t, Entry> entries_;
  linkage::LinkMap links_;
};

// TCP mesh: binds the local listener, connects to lower slots (and the
// mediator), accepts from higher slots, identifies inbound links by their
// link-hello. Returns channels for every edge this role participates in.
// A caller that already bound a listener (e.g. on an ephemeral port) can
// pass it instead.
RawChannels tcp_fabric(const RingTopology& topo, size_t self_slot,
                       int timeout_ms = 15000,
                       ppdeal::TcpListener* pre_bound = nullptr);

// Pre-wired in-process mesh for demos and tests.
class InProcFabric {
 public:
  InProcFabric(size_t n_parties, bool with_mediator);
  RawChannels take(size_t slot);

 private:
  std::map<std::pair<size_t, size_t>,
           std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>>>
      edges_;
};

}  // namespace ppdeal::net
