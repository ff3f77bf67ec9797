#include "ppdeal/negotiation.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>

#include "ppdeal/errors.hpp"

namespace ppdeal::nego {

using namespace wire;

void PriceGrid::validate() const {
  if (n < 2) throw ConfigError("price grid needs at least 2 points");
  if (step_cents <= 0) throw ConfigError("price grid step must be positive");
  if (min_cents < 0) throw ConfigError("price grid must not go below zero");
}

std::optional<size_t> PriceGrid::ceil_index(int64_t price) const {
  if (price <= min_cents) return 0;
  if (price > max_cents()) return std::nullopt;
  int64_t offset = price - min_cents;
  return static_cast<size_t>((offset + step_cents - 1) / step_cents);
}

std::optional<size_t> PriceGrid::floor_index(int64_t price) const {
  if (price < min_cents) return std::nullopt;
  if (price >= max_cents()) return n - 1;
  return static_cast<size_t>((price - min_cents) / step_cents);
}

const char* mode_name(Mode mode) {
  return mode == Mode::symmetric ? "symmetric" : "alice-only";
}

Mode mode_from_name(const std::string& name) {
  if (name == "symmetric") return Mode::symmetric;
  if (name == "alice-only" || name == "alice_only") return Mode::alice_only;
  throw ConfigError("unknown negotiation mode: " + name);
}

std::string price_encoding(const Salt& salt, int64_t cents) {
  std::string out;
  out.push_back('P');
  out.append(reinterpret_cast<const char*>(salt.data()), salt.size());
  uint64_t v = static_cast<uint64_t>(cents);
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  return out;
}

std::string pad_encoding(const Salt& salt, Rng& rng) {
  std::string out;
  out.push_back('X');
  out.append(reinterpret_cast<const char*>(salt.data()), salt.size());
  Bytes nonce = rng.bytes(16);
  out.append(reinterpret_cast<const char*>(nonce.data()), nonce.size());
  return out;
}

std::vector<std::string> bob_accept_set(const PriceGrid& grid, int64_t reservation,
                                        const Salt& salt, Rng& rng) {
  grid.validate();
  std::vector<std::string> out;
  out.reserve(grid.n);
  if (auto from = grid.ceil_index(reservation))
    for (size_t i = *from; i < grid.n; ++i)
      out.push_back(price_encoding(salt, grid.point(i)));
  while (out.size() < grid.n) out.push_back(pad_encoding(salt, rng));
  return out;
}

std::vector<std::string> alice_vector(const PriceGrid& grid, int64_t bid,
                                      const Salt& salt, Rng& rng) {
  grid.validate();
  std::vector<std::string> out;
  out.reserve(grid.n);
  if (auto at = grid.floor_index(bid))
    out.push_back(price_encoding(salt, grid.point(*at)));
  while (out.size() < grid.n) out.push_back(pad_encoding(salt, rng));
  // Fisher-Yates
  for (size_t i = out.size() - 1; i > 0; --i)
    std::swap(out[i], out[rng.index(i + 1)]);
  return out;
}

std::vector<std::pair<size_t, size_t>> compare_masked(
    std::span<const MaskedElement> a_double, std::span<const MaskedElement> b_double) {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t i = 0; i < a_double.size(); ++i)
    for (size_t j = 0; j < b_double.size(); ++j)
      if (a_double[i] == b_double[j]) out.emplace_back(i, j);
  return out;
}

Digest negotiation_config_digest(const std::string& params_name, const PriceGrid& grid,
                                 Mode mode) {
  DigestBuilder b;
  b.add("negotiation").add(params_name);
  b.add_u64(static_cast<uint64_t>(grid.min_cents));
  b.add_u64(static_cast<uint64_t>(grid.step_cents));
  b.add_u32(grid.n);
  b.add_u32(static_cast<uint32_t>(mode));
  return b.finish();
}

namespace {

std::vector<MaskedElement> encode_and_mask(const GroupParams& params,
                                           std::span<const std::string> entries,
                                           const SecretKey& key) {
  std::vector<MaskedElement> out;
  out.reserve(entries.size());
  for (const std::string& entry : entries)
    out.push_back(mask(params, encode_item(params, entry), key));
  return out;
}

std::vector<MaskedElement> read_list_exact(const GroupParams& params, PayloadReader& r,
                                           uint32_t expected) {
  std::vector<MaskedElement> out = r.element_list(params);
  if (out.size() != expected)
    throw ProtocolAbort(AbortCause::count_mismatch,
                        "expected " + std::to_string(expected) + " elements, got " +
                            std::to_string(out.size()));
  return out;
}

NegotiationOutcome run_alice(int64_t bid, const NegotiationConfig& config,
                             const Link& link, const Salt& salt, Rng& rng) {
  const GroupParams& params = config.params;
  SecretKey key = gen_secret_key(params, rng);

  std::vector<std::string> vec = alice_vector(config.grid, bid, salt, rng);
  std::vector<MaskedElement> a_masked = encode_and_mask(params, vec, key);
  PayloadWriter w;
  w.element_list(params, a_masked);
  link.send(kProtoNegotiation, kMsgAliceMasked, w.take());

  WireMessage reply = link.recv_expect(kProtoNegotiation, kMsgBobMaskedAndDouble);
  PayloadReader r(reply.payload);
  std::vector<MaskedElement> b_masked = read_list_exact(params, r, config.grid.n);
  std::vector<MaskedElement> a_double = read_list_exact(params, r, config.grid.n);
  r.expect_end();

  std::vector<MaskedElement> b_double;
  b_double.reserve(b_masked.size());
  for (const MaskedElement& e : b_masked) b_double.push_back(mask(params, e, key));

  auto matches = compare_masked(a_double, b_double);
  if (matches.size() > 1)
    std::cerr << "warning: duplicate encodings matched (" << matches.size()
              << " pairs)\n";
  bool feasible = !matches.empty();

  if (config.mode == Mode::symmetric) {
    PayloadWriter ret;
    ret.element_list(params, b_double);
    link.send(kProtoNegotiation, kMsgAliceReturn, ret.take());
  }
  PayloadWriter bit;
  bit.u8(feasible ? 0x01 : 0x00);
  link.send(kProtoNegotiation, kMsgFeasibility, bit.take());

  return {Role::alice, feasible, std::nullopt};
}

NegotiationOutcome run_bob(int64_t reservation, const NegotiationConfig& config,
                           const Link& link, const Salt& salt, Rng& rng) {
  const GroupParams& params = config.params;
  const uint32_t n = config.grid.n;
  SecretKey key = gen_secret_key(params, rng);

  // ordered accept set, then a private shuffle: the position Alice sees must
  // not reveal where the accept range starts
  std::vector<std::string> ordered = bob_accept_set(config.grid, reservation, salt, rng);
  size_t price_count = 0;
  if (auto from = config.grid.ceil_index(reservation)) price_count = n - *from;
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), size_t{0});
  for (size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);

  std::vector<std::string> shuffled(n);
  for (size_t j = 0; j < n; ++j) shuffled[j] = ordered[perm[j]];
  std::vector<MaskedElement> b_masked = encode_and_mask(params, shuffled, key);

  WireMessage first = link.recv_expect(kProtoNegotiation, kMsgAliceMasked);
  PayloadReader r(first.payload);
  std::vector<MaskedElement> a_masked = read_list_exact(params, r, n);
  r.expect_end();

  std::vector<MaskedElement> a_double;
  a_double.reserve(n);
  for (const MaskedElement& e : a_masked) a_double.push_back(mask(params, e, key));

  PayloadWriter w;
  w.element_list(params, b_masked);
  w.element_list(params, a_double);
  link.send(kProtoNegotiation, kMsgBobMaskedAndDouble, w.take());

  std::vector<MaskedElement> b_double;
  if (config.mode == Mode::symmetric) {
    WireMessage ret = link.recv_expect(kProtoNegotiation, kMsgAliceReturn);
    PayloadReader rr(ret.payload);
    b_double = read_list_exact(params, rr, n);
    rr.expect_end();
  }

  WireMessage bit = link.recv_expect(kProtoNegotiation, kMsgFeasibility);
  if (bit.payload.size() != 1 || bit.payload[0] > 1)
    throw ProtocolAbort(AbortCause::protocol_violation, "bad feasibility payload");
  bool feasible = bit.payload[0] == 0x01;

  std::optional<int64_t> matched;
  if (config.mode == Mode::symmetric) {
    auto matches = compare_masked(a_double, b_double);
    if (matches.empty() == feasible)
      throw ProtocolAbort(AbortCause::protocol_violation,
                          "feasibility bit contradicts the returned overlap");
    if (matches.size() > 1)
      std::cerr << "warning: duplicate encodings matched (" << matches.size()
                << " pairs)\n";
    if (feasible) {
      size_t original = perm[matches.front().second];
      if (original < price_count) {
        size_t accept_from = *config.grid.ceil_index(reservation);
        matched = config.grid.point(accept_from + original);
      } else {
        std::cerr << "warning: overlap landed on a pad entry\n";
      }
    }
  }
  return {Role::bob, feasible, matched};
}

}  // namespace

namespace {

// pinned handshake form: grid as 8/8/4-byte big-endian, 16-byte salt, mode byte
Bytes negotiation_blob(const PriceGrid& grid, const Salt& salt, Mode mode) {
  PayloadWriter w;
  w.u64(static_cast<uint64_t>(grid.min_cents));
  w.u64(static_cast<uint64_t>(grid.step_cents));
  w.u32(grid.n);
  w.raw(salt);
  w.u8(static_cast<uint8_t>(mode));
  return w.take();
}

Salt parse_negotiation_blob(const Bytes& blob, const PriceGrid& expect_grid,
                            Mode expect_mode) {
  PayloadReader r(blob);
  PriceGrid grid;
  grid.min_cents = static_cast<int64_t>(r.u64());
  grid.step_cents = static_cast<int64_t>(r.u64());
  grid.n = r.u32();
  Bytes salt_bytes = r.raw(16);
  Mode mode = static_cast<Mode>(r.u8());
  r.expect_end();
  if (grid != expect_grid)
    throw ProtocolAbort(AbortCause::config_mismatch, "price grid mismatch");
  if (mode != expect_mode)
    throw ProtocolAbort(AbortCause::config_mismatch, "negotiation mode mismatch");
  Salt salt;
  std::copy(salt_bytes.begin(), salt_bytes.end(), salt.begin());
  return salt;
}

}  // namespace

NegotiationOutcome run_negotiation(Role role, int64_t secret_price,
                                   const NegotiationConfig& config, Channel& channel,
                                   bool channel_initiator, Transcript& transcript,
                                   Rng& rng) {
  config.grid.validate();
  HandshakeSpec spec;
  spec.protocol = kProtoNegotiation;
  spec.params_name = config.params_name;
  spec.config_digest = negotiation_config_digest(config.params_name, config.grid,
                                                 config.mode);
  spec.provider = config.provider;

  RecordingChannel clear(channel, transcript);
  Session session;
  Salt salt;
  if (channel_initiator) {
    salt = rng.bytes16();
    spec.blob = negotiation_blob(config.grid, salt, config.mode);
    session = handshake_initiate(clear, spec, rng);
  } else {
    session = handshake_respond(clear, spec, [&](const Bytes& blob) {
      parse_negotiation_blob(blob, config.grid, config.mode);
    });
    salt = parse_negotiation_blob(session.blob, config.grid, config.mode);
  }

  std::unique_ptr<PskChannel> sealed;
  Channel* protocol_side = &channel;
  if (config.provider == Provider::psk) {
    sealed = std::make_unique<PskChannel>(channel, config.psk, channel_initiator);
    protocol_side = sealed.get();
  }
  RecordingChannel recorded(*protocol_side, transcript);
  Link link{&recorded, session.id};

  return role == Role::alice ? run_alice(secret_price, config, link, salt, rng)
                             : run_bob(secret_price, config, link, salt, rng);
}

}  // namespace ppdeal::nego
