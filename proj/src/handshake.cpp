#include "ppdeal/handshake.hpp"

#include "ppdeal/errors.hpp"

namespace ppdeal {

using namespace wire;

const char* provider_name(Provider p) {
  return p == Provider::psk ? "psk" : "null";
}

Provider provider_from_name(const std::string& name) {
  if (name == "null" || name.empty()) return Provider::null_provider;
  if (name == "psk") return Provider::psk;
  throw ConfigError("unknown channel provider: " + name);
}

namespace {

Bytes hello_payload(const HandshakeSpec& spec, bool with_blob) {
  PayloadWriter w;
  w.u8(kWireVersion);
  w.u8(spec.protocol);
  w.u8(static_cast<uint8_t>(spec.provider));
  if (spec.params_name.size() > 255) throw ConfigError("parameter set name too long");
  w.u8(static_cast<uint8_t>(spec.params_name.size()));
  w.raw({reinterpret_cast<const uint8_t*>(spec.params_name.data()),
         spec.params_name.size()});
  w.raw(spec.config_digest);
  if (with_blob) {
    w.u32(static_cast<uint32_t>(spec.blob.size()));
    w.raw(spec.blob);
  }
  return w.take();
}

struct ParsedHello {
  uint8_t version;
  uint8_t protocol;
  uint8_t provider;
  std::string params_name;
  Digest digest;
  Bytes blob;
};

ParsedHello parse_hello(const Bytes& payload, bool with_blob) {
  PayloadReader r(payload);
  ParsedHello h;
  h.version = r.u8();
  h.protocol = r.u8();
  h.provider = r.u8();
  uint8_t name_len = r.u8();
  Bytes name = r.raw(name_len);
  h.params_name.assign(name.begin(), name.end());
  Bytes digest = r.raw(32);
  std::copy(digest.begin(), digest.end(), h.digest.begin());
  if (with_blob) h.blob = r.raw(r.u32());
  r.expect_end();
  return h;
}

[[noreturn]] void abort_link(Channel& ch, const SessionId& sid, AbortCause cause,
                             const std::string& detail) {
  PayloadWriter w;
  w.u8(static_cast<uint8_t>(cause));
  w.raw({reinterpret_cast<const uint8_t*>(detail.data()), detail.size()});
  ch.send({kProtoHandshake, kMsgAbort, sid, w.take()});
  throw ProtocolAbort(cause, detail);
}

[[noreturn]] void raise_peer_abort(const WireMessage& msg) {
  PayloadReader r(msg.payload);
  uint8_t cause = r.u8();
  Bytes detail = r.raw(r.remaining());
  throw ProtocolAbort(AbortCause::peer_abort,
                      std::string("peer aborted (") +
                          abort_cause_name(static_cast<AbortCause>(cause)) +
                          "): " + std::string(detail.begin(), detail.end()));
}

}  // namespace

Session handshake_initiate(Channel& ch, const HandshakeSpec& spec, Rng& rng) {
  Session session;
  session.id = rng.bytes16();
  session.blob = spec.blob;
  ch.send({kProtoHandshake, kMsgHello, session.id, hello_payload(spec, true)});

  WireMessage reply = ch.recv();
  if (reply.protocol_id == kProtoHandshake && reply.msg_type == kMsgAbort)
    raise_peer_abort(reply);
  if (reply.protocol_id != kProtoHandshake || reply.msg_type != kMsgHelloAck ||
      reply.session_id != session.id)
    abort_link(ch, session.id, AbortCause::protocol_violation,
               "expected handshake acknowledgement");
  ParsedHello ack = parse_hello(reply.payload, /*with_blob=*/false);
  if (ack.digest != spec.config_digest)
    abort_link(ch, session.id, AbortCause::config_mismatch,
               "peer acknowledged a different configuration");
  return session;
}

Session handshake_respond(Channel& ch, const HandshakeSpec& expect,
                          const BlobValidator& validate_blob) {
  WireMessage msg = ch.recv();
  if (msg.protocol_id == kProtoHandshake && msg.msg_type == kMsgAbort)
    raise_peer_abort(msg);
  if (msg.protocol_id != kProtoHandshake || msg.msg_type != kMsgHello)
    abort_link(ch, msg.session_id, AbortCause::protocol_violation,
               "expected handshake hello");
  ParsedHello hello = parse_hello(msg.payload, /*with_blob=*/true);

  if (hello.version != kWireVersion)
    abort_link(ch, msg.session_id, AbortCause::version_mismatch,
               "peer version " + std::to_string(hello.version));
  if (hello.protocol != expect.protocol)
    abort_link(ch, msg.session_id, AbortCause::config_mismatch,
               "peer wants protocol " + std::to_string(hello.protocol));
  if (hello.provider != static_cast<uint8_t>(expect.provider))
    abort_link(ch, msg.session_id, AbortCause::provider_mismatch,
               "channel provider mismatch");
  if (hello.params_name != expect.params_name)
    abort_link(ch, msg.session_id, AbortCause::params_mismatch,
               "parameter set mismatch: " + hello.params_name);
  if (hello.digest != expect.config_digest)
    abort_link(ch, msg.session_id, AbortCause::config_mismatch,
               "session configuration digest mismatch");
  if (validate_blob) {
    try {
      validate_blob(hello.blob);
    } catch (const ProtocolAbort& e) {
      abort_link(ch, msg.session_id, e.cause(), e.what());
    }
  }

  ch.send({kProtoHandshake, kMsgHelloAck, msg.session_id,
           hello_payload(expect, false)});

  Session session;
  session.id = msg.session_id;
  session.blob = std::move(hello.blob);
  return session;
}

void send_link_hello(Channel& ch, uint32_t party_index, const std::string& party_id) {
  PayloadWriter w;
  w.u32(party_index);
  w.raw({reinterpret_cast<const uint8_t*>(party_id.data()), party_id.size()});
  ch.send({kProtoHandshake, kMsgLinkHello, SessionId{}, w.take()});
}

std::pair<uint32_t, std::string> read_link_hello(Channel& ch) {
  WireMessage msg = ch.recv();
  if (msg.protocol_id != kProtoHandshake || msg.msg_type != kMsgLinkHello)
    throw ProtocolAbort(AbortCause::protocol_violation, "expected link hello");
  PayloadReader r(msg.payload);
  uint32_t index = r.u32();
  Bytes id = r.raw(r.remaining());
  return {index, std::string(id.begin(), id.end())};
}

void Link::send(uint8_t protocol, uint8_t type, Bytes payload) const {
  ch->send({protocol, type, sid, std::move(payload)});
}

WireMessage Link::recv_expect(uint8_t protocol, uint8_t type) const {
  WireMessage msg = ch->recv();
  if (msg.protocol_id == kProtoHandshake && msg.msg_type == kMsgAbort)
    raise_peer_abort(msg);
  if (msg.protocol_id != protocol || msg.msg_type != type || msg.session_id != sid) {
    send_abort(AbortCause::protocol_violation, "unexpected frame");
    throw ProtocolAbort(AbortCause::protocol_violation,
                        "expected protocol " + std::to_string(protocol) + " type " +
                            std::to_string(type) + ", got " +
                            std::to_string(msg.protocol_id) + "/" +
                            std::to_string(msg.msg_type));
  }
  return msg;
}

void Link::send_abort(AbortCause cause, const std::string& detail) const {
  PayloadWriter w;
  w.u8(static_cast<uint8_t>(cause));
  w.raw({reinterpret_cast<const uint8_t*>(detail.data()), detail.size()});
  ch->send({kProtoHandshake, kMsgAbort, sid, w.take()});
}

}  // namespace ppdeal
