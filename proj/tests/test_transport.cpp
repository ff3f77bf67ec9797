#include <thread>

#include "doctest.h"
#include "ppdeal/channel.hpp"
#include "ppdeal/errors.hpp"
#include "ppdeal/handshake.hpp"
#include "ppdeal/tcp.hpp"

using namespace ppdeal;
using namespace ppdeal::wire;

namespace {

WireMessage random_message(Rng& rng) {
  WireMessage msg;
  msg.protocol_id = static_cast<uint8_t>(rng.index(4));
  msg.msg_type = static_cast<uint8_t>(rng.index(4) + 1);
  msg.session_id = rng.bytes16();
  msg.payload = rng.bytes(rng.index(200));
  return msg;
}

}  // namespace

TEST_CASE("frames round trip and carry exact header layout") {
  WireMessage msg;
  msg.protocol_id = kProtoNegotiation;
  msg.msg_type = kMsgFeasibility;
  msg.session_id.fill(0xAB);
  msg.payload = {0x01};

  Bytes raw = frame(msg);
  CHECK(raw.size() == kHeaderSize + 1);
  CHECK(raw[0] == 0);
  CHECK(raw[3] == 1);  // 4-byte big-endian length
  CHECK(raw[4] == kProtoNegotiation);
  CHECK(raw[5] == kMsgFeasibility);

  WireMessage empty;
  empty.protocol_id = kProtoHandshake;
  empty.msg_type = kMsgHello;
  CHECK(frame(empty).size() == kHeaderSize);  // 22-byte frame for empty payload

  FrameReader reader;
  reader.feed(raw);
  auto out = reader.next();
  REQUIRE(out.has_value());
  CHECK(*out == msg);
  CHECK(!reader.next().has_value());
}

TEST_CASE("deframer buffers partial input and survives arbitrary chunking") {
  Rng rng(31337);
  std::vector<WireMessage> msgs;
  Bytes stream;
  for (int i = 0; i < 1000; ++i) {
    msgs.push_back(random_message(rng));
    Bytes raw = frame(msgs.back());
    stream.insert(stream.end(), raw.begin(), raw.end());
  }

  FrameReader reader;
  std::vector<WireMessage> decoded;
  size_t pos = 0;
  while (pos < stream.size()) {
    size_t chunk = std::min<size_t>(1 + rng.index(37), stream.size() - pos);
    reader.feed({stream.data() + pos, chunk});
    pos += chunk;
    while (auto msg = reader.next()) decoded.push_back(*msg);
  }
  CHECK(decoded == msgs);

  // a truncated trailing frame is "need more bytes", not an error
  FrameReader partial;
  Bytes raw = frame(msgs[0]);
  partial.feed({raw.data(), raw.size() - 3});
  CHECK(!partial.next().has_value());
}

TEST_CASE("oversized and unknown-protocol frames abort the connection") {
  FrameReader reader;
  Bytes bogus = {0xFF, 0xFF, 0xFF, 0xFF, 0x00, 0x01};
  bogus.resize(kHeaderSize, 0);
  reader.feed(bogus);
  CHECK_THROWS_AS(reader.next(), ProtocolAbort);

  FrameReader reader2;
  Bytes unknown(kHeaderSize, 0);
  unknown[4] = 0x7F;  // protocol id
  reader2.feed(unknown);
  CHECK_THROWS_AS(reader2.next(), ProtocolAbort);
}

TEST_CASE("in-process pair delivers in order and times out when idle") {
  auto [a, b] = make_inproc_pair();
  Rng rng(7);
  WireMessage m1 = random_message(rng), m2 = random_message(rng);
  a->send(m1);
  a->send(m2);
  CHECK(b->recv() == m1);
  CHECK(b->recv() == m2);

  b->set_timeout_ms(50);
  CHECK_THROWS_AS(b->recv(), ProtocolAbort);
}

TEST_CASE("tcp channel matches the in-process behaviour") {
  TcpListener listener(0);
  Rng rng(8);
  WireMessage m1 = random_message(rng), m2 = random_message(rng);

  std::thread client([&] {
    auto ch = tcp_connect("127.0.0.1", listener.port());
    ch->send(m1);
    WireMessage echo = ch->recv();
    ch->send(echo);
  });
  auto server = listener.accept();
  CHECK(server->recv() == m1);
  server->send(m2);
  CHECK(server->recv() == m2);
  client.join();
}

TEST_CASE("psk provider round trips and leaves the header in clear") {
  auto [a, b] = make_inproc_pair();
  Rng rng(9);
  Bytes key = rng.bytes(32);
  PskChannel sealed_a(*a, key, true);
  PskChannel sealed_b(*b, key, false);

  WireMessage msg = random_message(rng);
  sealed_a.send(msg);
  CHECK(sealed_b.recv() == msg);

  // on the wire the payload is sealed (larger by the tag) but headers match
  sealed_a.send(msg);
  WireMessage raw = b->recv();
  CHECK(raw.protocol_id == msg.protocol_id);
  CHECK(raw.msg_type == msg.msg_type);
  CHECK(raw.session_id == msg.session_id);
  CHECK(raw.payload.size() == msg.payload.size() + PskChannel::kTagSize);
  CHECK(raw.payload != msg.payload);

  // both directions, incrementing nonces
  sealed_b.send(msg);
  sealed_b.send(msg);
  CHECK(sealed_a.recv() == msg);
  CHECK(sealed_a.recv() == msg);
}

TEST_CASE("psk provider rejects tampered payloads") {
  auto [a, b] = make_inproc_pair();
  Rng rng(12);
  Bytes key = rng.bytes(32);
  PskChannel sealed_a(*a, key, true);
  PskChannel sealed_b(*b, key, false);

  WireMessage msg = random_message(rng);
  sealed_a.send(msg);
  WireMessage tampered = b->recv();
  tampered.payload[0] ^= 0x01;
  a->send(tampered);
  CHECK_THROWS_AS(sealed_b.recv(), ProtocolAbort);

  // wrong key never authenticates either
  auto [c, d] = make_inproc_pair();
  PskChannel sealed_c(*c, key, true);
  Bytes other_key = rng.bytes(32);
  PskChannel sealed_d(*d, other_key, false);
  sealed_c.send(msg);
  CHECK_THROWS_AS(sealed_d.recv(), ProtocolAbort);
}

TEST_CASE("handshake agrees on session id and aborts on mismatch") {
  Rng rng(10);

  HandshakeSpec spec;
  spec.protocol = kProtoNegotiation;
  spec.params_name = "toy64";
  spec.config_digest = DigestBuilder().add("cfg-A").finish();
  spec.blob = {1, 2, 3};

  SUBCASE("matching configs") {
    auto [a, b] = make_inproc_pair();
    Session init_session, resp_session;
    std::thread responder([&] { resp_session = handshake_respond(*b, spec); });
    init_session = handshake_initiate(*a, spec, rng);
    responder.join();
    CHECK(init_session.id == resp_session.id);
    CHECK(resp_session.blob == spec.blob);
  }

  SUBCASE("digest mismatch aborts both ends") {
    auto [a, b] = make_inproc_pair();
    HandshakeSpec other = spec;
    other.config_digest = DigestBuilder().add("cfg-B").finish();
    std::thread responder([&] {
      CHECK_THROWS_AS(handshake_respond(*b, other), ProtocolAbort);
    });
    CHECK_THROWS_AS(handshake_initiate(*a, spec, rng), ProtocolAbort);
    responder.join();
  }

  SUBCASE("provider mismatch aborts") {
    auto [a, b] = make_inproc_pair();
    HandshakeSpec other = spec;
    other.provider = Provider::psk;
    std::thread responder([&] {
      CHECK_THROWS_AS(handshake_respond(*b, other), ProtocolAbort);
    });
    CHECK_THROWS_AS(handshake_initiate(*a, spec, rng), ProtocolAbort);
    responder.join();
  }

  SUBCASE("params mismatch aborts") {
    auto [a, b] = make_inproc_pair();
    HandshakeSpec other = spec;
    other.params_name = "toy32";
    std::thread responder([&] {
      CHECK_THROWS_AS(handshake_respond(*b, other), ProtocolAbort);
    });
    CHECK_THROWS_AS(handshake_initiate(*a, spec, rng), ProtocolAbort);
    responder.join();
  }
}

TEST_CASE("transcripts export and reload byte-identically") {
  Transcript t;
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    WireMessage msg = random_message(rng);
    if (i % 2 == 0)
      t.record_sent(msg);
    else
      t.record_received(msg);
  }
  std::string jsonl = t.to_jsonl();
  Transcript loaded = Transcript::from_jsonl(jsonl);
  REQUIRE(loaded.records().size() == t.records().size());
  for (size_t i = 0; i < t.records().size(); ++i) {
    CHECK(loaded.records()[i].sent == t.records()[i].sent);
    CHECK(loaded.records()[i].seq == t.records()[i].seq);
    CHECK(loaded.records()[i].msg == t.records()[i].msg);
  }
  CHECK(loaded.to_jsonl() == jsonl);
}
