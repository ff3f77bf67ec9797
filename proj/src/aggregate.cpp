#include "ppdeal/aggregate.hpp"

#include "ppdeal/errors.hpp"

namespace ppdeal::sum {

using namespace wire;

void SumParams::validate() const {
  if (party_count < 1) throw ConfigError("sum session needs at least one party");
  if (modulus < 2) throw ConfigError("sum modulus must be at least 2");
  if (value_bound < 0) throw ConfigError("value bound must be non-negative");
  if (party_count * value_bound >= modulus)
    throw ConfigError("party_count * value_bound must stay below the modulus");
}

size_t SumParams::acc_width() const {
  Bigint max = modulus - 1;
  return std::max<size_t>(1, (bit_length(max) + 7) / 8);
}

StartedSum start_sum(const SumParams& params, Rng& rng) {
  params.validate();
  Bigint blind = rng.below(params.modulus);
  return {blind, blind};
}

Bigint accumulate(const SumParams& params, const Bigint& acc, const Bigint& value) {
  if (value < 0 || value > params.value_bound)
    throw ConfigError("value outside the agreed bound");
  return (acc + value) % params.modulus;
}

SumResult finish(const SumParams& params, const Bigint& acc_final, const Bigint& blind) {
  if (params.party_count == 0) throw ConfigError("average undefined for zero parties");
  Bigint sum = acc_final - blind;
  mpz_mod(sum.get_mpz_t(), sum.get_mpz_t(), params.modulus.get_mpz_t());
  Bigint count(params.party_count);
  Bigint g;
  mpz_gcd(g.get_mpz_t(), sum.get_mpz_t(), count.get_mpz_t());
  if (g == 0) g = 1;
  return {sum, sum / g, count / g};
}

Digest sum_config_digest(const SumParams& params,
                         std::span<const linkage::PartyId> parties, bool broadcast) {
  DigestBuilder b;
  b.add("sum").add(to_hex(params.modulus)).add(to_hex(params.value_bound));
  b.add_u32(params.party_count);
  for (const linkage::PartyId& id : parties) b.add(id);
  b.add_u32(broadcast ? 1 : 0);
  return b.finish();
}

namespace {

const Link& link_at(const linkage::LinkMap& links, size_t slot) {
  auto it = links.find(slot);
  if (it == links.end())
    throw ProtocolAbort(AbortCause::ring_order_mismatch,
                        "missing link to slot " + std::to_string(slot));
  return it->second;
}

Bytes acc_payload(const SumParams& params, uint64_t count, const Bigint& acc) {
  PayloadWriter w;
  w.u64(count);
  w.raw(to_fixed_bytes(acc, params.acc_width()));
  return w.take();
}

std::pair<uint64_t, Bigint> parse_acc(const SumParams& params, const WireMessage& msg) {
  PayloadReader r(msg.payload);
  uint64_t count = r.u64();
  Bigint acc = from_bytes(r.raw(params.acc_width()));
  r.expect_end();
  if (acc >= params.modulus)
    throw ProtocolAbort(AbortCause::malformed_element, "accumulator outside [0, M)");
  return {count, acc};
}

}  // namespace

std::optional<SumResult> run_sum_party(const SumParams& params, size_t ring_size,
                                       size_t self_index, const Bigint& own_value,
                                       bool broadcast, const linkage::LinkMap& links,
                                       Rng& rng) {
  params.validate();
  if (own_value < 0 || own_value > params.value_bound)
    throw ConfigError("own value outside the agreed bound");
  if (params.party_count != ring_size)
    throw ConfigError("party_count must equal the ring size");

  if (self_index == 0) {
    StartedSum started = start_sum(params, rng);
    Bigint acc = accumulate(params, started.accumulator, own_value);
    if (ring_size > 1) {
      link_at(links, 1).send(kProtoSum, kMsgAcc, acc_payload(params, 1, acc));
      auto [count, final_acc] = parse_acc(
          params, link_at(links, ring_size - 1).recv_expect(kProtoSum, kMsgAcc));
      if (count != ring_size)
        throw ProtocolAbort(AbortCause::count_mismatch,
                            "accumulator visited " + std::to_string(count) +
                                " parties, expected " + std::to_string(ring_size));
      acc = final_acc;
    }
    SumResult result = finish(params, acc, started.blind);
    if (broadcast) {
      PayloadWriter w;
      w.raw(to_fixed_bytes(result.sum, params.acc_width()));
      w.u64(params.party_count);
      Bytes payload = w.take();
      for (size_t peer = 1; peer < ring_size; ++peer)
        link_at(links, peer).send(kProtoSum, kMsgResultBroadcast, payload);
    }
    return result;
  }

  auto [count, acc] =
      parse_acc(params, link_at(links, self_index - 1).recv_expect(kProtoSum, kMsgAcc));
  if (count != self_index)
    throw ProtocolAbort(AbortCause::count_mismatch,
                        "accumulator arrived with count " + std::to_string(count));
  Bigint next = accumulate(params, acc, own_value);
  link_at(links, (self_index + 1) % ring_size)
      .send(kProtoSum, kMsgAcc, acc_payload(params, count + 1, next));

  if (!broadcast) return std::nullopt;
  WireMessage msg = link_at(links, 0).recv_expect(kProtoSum, kMsgResultBroadcast);
  PayloadReader r(msg.payload);
  Bigint sum = from_bytes(r.raw(params.acc_width()));
  uint64_t n = r.u64();
  r.expect_end();
  if (n != params.party_count)
    throw ProtocolAbort(AbortCause::count_mismatch, "broadcast count mismatch");
  Bigint g, den(params.party_count);
  mpz_gcd(g.get_mpz_t(), sum.get_mpz_t(), den.get_mpz_t());
  if (g == 0) g = 1;
  return SumResult{sum, sum / g, den / g};
}

}  // namespace ppdeal::sum
