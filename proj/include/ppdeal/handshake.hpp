#pragma once

#include <functional>
#include <string>

#include "ppdeal/channel.hpp"
#include "ppdeal/errors.hpp"
#include "ppdeal/hashing.hpp"
#include "ppdeal/rng.hpp"

namespace ppdeal {

constexpr uint8_t kWireVersion = 1;

enum class Provider : uint8_t { null_provider = 0, psk = 1 };

const char* provider_name(Provider p);
Provider provider_from_name(const std::string& name);

// What one end expects of a session. The digest commits to everything both
// ends must have configured identically (protocol, parameter set, protocol
// config, ring order); network addresses stay out of it so simulated and
// TCP runs of the same logical session hash alike. The blob carries
// initiator-chosen per-session values (e.g. the negotiation salt) the
// responder adopts rather than checks.
struct HandshakeSpec {
  uint8_t protocol = 0;
  std::string params_name;
  Digest config_digest{};
  Bytes blob;
  Provider provider = Provider::null_provider;
};

struct Session {
  wire::SessionId id{};
  Bytes blob;  // initiator's blob, as received (initiator: its own copy)
};

// Throws ProtocolAbort when the initiator's blob is unacceptable; runs
// before the acknowledgement so a mismatch aborts the session cleanly.
using BlobValidator = std::function<void(const Bytes& blob)>;

// Initiator proposes the session id and blob; mismatch on any committed
// field aborts before any protocol payload flows.
Session handshake_initiate(Channel& ch, const HandshakeSpec& spec, Rng& rng);
Session handshake_respond(Channel& ch, const HandshakeSpec& expect,
                          const BlobValidator& validate_blob = {});

// Pre-handshake link identification for multi-party meshes: tells an
// accepting party which peer a fresh connection belongs to. Not recorded in
// transcripts (transport bootstrap, like the TCP handshake itself).
void send_link_hello(Channel& ch, uint32_t party_index, const std::string& party_id);
std::pair<uint32_t, std::string> read_link_hello(Channel& ch);

// Established link: a channel plus its agreed session id.
struct Link {
  Channel* ch = nullptr;
  wire::SessionId sid{};

  void send(uint8_t protocol, uint8_t type, Bytes payload) const;
  // Receives one frame; peer aborts and unexpected frames raise
  // ProtocolAbort with the named cause.
  wire::WireMessage recv_expect(uint8_t protocol, uint8_t type) const;
  void send_abort(AbortCause cause, const std::string& detail) const;
};

}  // namespace ppdeal
