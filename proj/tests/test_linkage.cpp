#include <algorithm>
#include <set>
#include <string>

#include "doctest.h"
#include "ppdeal/advlab.hpp"
#include "ppdeal/demo.hpp"
#include "ppdeal/errors.hpp"
#include "ppdeal/linkage.hpp"

using namespace ppdeal;
using namespace ppdeal::linkage;

namespace {

GroupParams toy23() {
  return GroupParams::from_prime(Bigint(23), EncodingMode::raw_square_test);
}

// plaintext oracle: direct set intersection
std::set<std::string> intersect_plain(const std::vector<std::vector<std::string>>& lists) {
  std::set<std::string> common(lists.front().begin(), lists.front().end());
  for (size_t i = 1; i < lists.size(); ++i) {
    std::set<std::string> next;
    for (const std::string& s : lists[i])
      if (common.count(s)) next.insert(s);
    common.swap(next);
  }
  return common;
}

// plaintexts a party maps back from its linkage outcome
std::set<std::string> mapped_back(const PartyOutcome& outcome) {
  std::set<std::string> out;
  for (const LocalMatch& m : outcome.result.local_matches)
    out.insert(outcome.items[m.local_index]);
  return out;
}

std::vector<std::vector<std::string>> random_instance(Rng& rng, size_t n_parties,
                                                      size_t max_items) {
  // draw from a small universe so intersections are nonempty often
  std::vector<std::vector<std::string>> lists(n_parties);
  for (auto& list : lists) {
    size_t count = 1 + rng.index(max_items);
    for (size_t i = 0; i < count; ++i)
      list.push_back("item-" + std::to_string(rng.index(max_items * 2)));
  }
  return lists;
}

}  // namespace

TEST_CASE("ring_hop masks element-wise, order preserved") {
  GroupParams params = toy23();
  SecretKey k3{Bigint(3)};
  std::vector<MaskedElement> items = {MaskedElement{Bigint(9)}, MaskedElement{Bigint(16)}};
  auto hopped = ring_hop(params, items, k3);
  REQUIRE(hopped.size() == 2);
  CHECK(hopped[0].value == 16);  // 9^3 = 729 = 16 mod 23
  CHECK(hopped[1].value == 2);   // 16^3 = 4096 = 2 mod 23
  CHECK(ring_hop(params, {}, k3).empty());
  auto identity = ring_hop(params, items, SecretKey{Bigint(1)});
  CHECK(identity[0] == items[0]);
  CHECK(identity[1] == items[1]);
}

TEST_CASE("full_mask_oracle is key-order independent and matches mask()") {
  GroupParams params = toy23();
  std::vector<SecretKey> keys_37 = {SecretKey{Bigint(3)}, SecretKey{Bigint(7)}};
  std::vector<SecretKey> keys_73 = {SecretKey{Bigint(7)}, SecretKey{Bigint(3)}};
  // item "3" encodes to 9; double mask with {3,7} lands on 18
  CHECK(full_mask_oracle(params, "3", keys_37).value == 18);
  CHECK(full_mask_oracle(params, "3", keys_73).value == 18);
  for (const char* item : {"2", "3", "5", "6"}) {
    CHECK(full_mask_oracle(params, item, keys_37) ==
          full_mask_oracle(params, item, keys_73));
  }
  std::vector<SecretKey> single = {SecretKey{Bigint(3)}};
  CHECK(full_mask_oracle(params, "3", single) ==
        mask(params, encode_item(params, "3"), single[0]));
}

TEST_CASE("publish_and_intersect returns the sorted common set") {
  GroupParams params = named_params("toy64");
  Rng rng(555);
  std::vector<SecretKey> keys;
  for (int i = 0; i < 3; ++i) keys.push_back(gen_secret_key(params, rng));

  auto full = [&](const std::string& item) {
    return full_mask_oracle(params, item, keys);
  };
  PublishedLists published = {
      {"p0", {full("a"), full("b"), full("c")}},
      {"p1", {full("b"), full("c"), full("d")}},
      {"p2", {full("c"), full("b")}},
  };
  auto canonical = publish_and_intersect(published);
  REQUIRE(canonical.size() == 2);
  CHECK(canonical[0].value < canonical[1].value);
  std::set<Bigint> expected = {full("b").value, full("c").value};
  CHECK(expected.count(canonical[0].value) == 1);
  CHECK(expected.count(canonical[1].value) == 1);

  PublishedLists disjoint = {{"p0", {full("a")}}, {"p1", {full("z")}}};
  CHECK(publish_and_intersect(disjoint).empty());

  PublishedLists identical = {{"p0", {full("b"), full("a")}},
                              {"p1", {full("a"), full("b")}}};
  auto all = publish_and_intersect(identical);
  REQUIRE(all.size() == 2);
  CHECK(all[0].value < all[1].value);

  CHECK(mediator_intersect(published) == canonical);

  PublishedLists single = {{"p0", {full("b"), full("a")}}};
  auto sorted_own = mediator_intersect(single);
  REQUIRE(sorted_own.size() == 2);
  CHECK(sorted_own[0].value < sorted_own[1].value);
}

TEST_CASE("map_to_local finds the owner of every canonical element") {
  GroupParams params = named_params("toy64");
  Rng rng(99);
  std::vector<SecretKey> keys = {gen_secret_key(params, rng), gen_secret_key(params, rng)};
  std::vector<std::string> own = {"age", "zip", "name"};
  std::vector<MaskedElement> full;
  for (const std::string& item : own) full.push_back(full_mask_oracle(params, item, keys));

  std::vector<MaskedElement> canonical = {full[0], full[1]};
  std::sort(canonical.begin(), canonical.end());
  auto matches = map_to_local(own, full, canonical);
  REQUIRE(matches.size() == 2);
  std::set<size_t> locals;
  for (const LocalMatch& m : matches) {
    locals.insert(m.local_index);
    CHECK(full[m.local_index] == canonical[m.canonical_position]);
  }
  CHECK(locals == std::set<size_t>{0, 1});

  CHECK(map_to_local(own, full, {}).empty());

  std::vector<MaskedElement> everything = full;
  std::sort(everything.begin(), everything.end());
  CHECK(map_to_local(own, full, everything).size() == own.size());

  // a canonical element we do not own is an integrity failure
  MaskedElement alien = full_mask_oracle(params, "alien", keys);
  CHECK_THROWS_AS(map_to_local(own, full, std::vector<MaskedElement>{alien}),
                  IntegrityError);
}

TEST_CASE("two-party ring pass reproduces the worked toy values") {
  net::RingTopology topo = demo::toy_ring(2, "toy64");
  auto run = demo::run_linkage_inproc(topo, {{"3", "5"}, {"3"}}, 77);

  // order preservation: each full mask equals the oracle over both keys
  std::vector<SecretKey> keys = {run.record.keys.at("p0"), run.record.keys.at("p1")};
  const auto& outcome = run.outcomes[0];
  REQUIRE(outcome.items.size() == 2);
  for (size_t i = 0; i < outcome.items.size(); ++i)
    CHECK(outcome.own_full_masked[i] ==
          full_mask_oracle(run.record.params, outcome.items[i], keys));

  CHECK(mapped_back(run.outcomes[0]) == std::set<std::string>{"3"});
  CHECK(mapped_back(run.outcomes[1]) == std::set<std::string>{"3"});
}

TEST_CASE("one-party ring degenerates to a single self mask") {
  net::RingTopology topo = demo::toy_ring(1, "toy64");
  auto run = demo::run_linkage_inproc(topo, {{"a", "b", "a"}}, 3);
  const auto& outcome = run.outcomes[0];
  REQUIRE(outcome.items == std::vector<std::string>{"a", "b"});  // deduplicated
  std::vector<SecretKey> keys = {run.record.keys.at("p0")};
  for (size_t i = 0; i < outcome.items.size(); ++i)
    CHECK(outcome.own_full_masked[i] ==
          full_mask_oracle(run.record.params, outcome.items[i], keys));
  CHECK(outcome.result.canonical_order.size() == 2);
  CHECK(mapped_back(outcome) == std::set<std::string>{"a", "b"});
}

TEST_CASE("linkage agrees with the plaintext oracle on random instances") {
  Rng rng(2025);
  for (int trial = 0; trial < 30; ++trial) {
    size_t n_parties = 2 + rng.index(5);  // 2..6
    auto lists = random_instance(rng, n_parties, 8);
    net::RingTopology topo = demo::toy_ring(n_parties, "toy64");
    auto run = demo::run_linkage_inproc(topo, lists, rng.u64());

    std::set<std::string> expected = intersect_plain(lists);
    for (size_t i = 0; i < n_parties; ++i) {
      REQUIRE(mapped_back(run.outcomes[i]) == expected);
      REQUIRE(run.outcomes[i].result.canonical_order ==
              run.outcomes[0].result.canonical_order);
    }
    // full-mask order preservation for every party
    std::vector<SecretKey> keys;
    for (const auto& p : topo.parties) keys.push_back(run.record.keys.at(p.id));
    for (size_t i = 0; i < n_parties; ++i)
      for (size_t j = 0; j < run.outcomes[i].items.size(); ++j)
        REQUIRE(run.outcomes[i].own_full_masked[j] ==
                full_mask_oracle(run.record.params, run.outcomes[i].items[j], keys));
  }
}

TEST_CASE("canonical order is invariant under ring permutation") {
  std::vector<std::vector<std::string>> lists = {
      {"a", "b", "c", "d"}, {"b", "c", "d", "e"}, {"c", "d", "x"}};
  net::RingTopology topo = demo::toy_ring(3, "toy64");
  auto base = demo::run_linkage_inproc(topo, lists, 42);

  // rotate the ring: same parties and keys, different order. Keys are drawn
  // per party seed, so reuse them by permuting both parties and seeds via
  // the party-id mapping.
  net::RingTopology rotated = topo;
  rotated.parties = {topo.parties[1], topo.parties[2], topo.parties[0]};
  std::vector<std::vector<std::string>> rotated_lists = {lists[1], lists[2], lists[0]};
  auto run2 = demo::run_linkage_inproc(rotated, rotated_lists, 42);

  // the rotated run has different per-slot seeds, hence different keys, so
  // canonical bytes differ; what must match is the mapped-back plaintext set
  for (size_t i = 0; i < 3; ++i)
    CHECK(mapped_back(run2.outcomes[i]) == intersect_plain(lists));

  // with identical keys (forced), the canonical order is byte-identical:
  // replay both ring orders through the oracle
  GroupParams params = base.record.params;
  std::vector<SecretKey> keys;
  for (const auto& p : topo.parties) keys.push_back(base.record.keys.at(p.id));
  std::vector<SecretKey> permuted = {keys[2], keys[0], keys[1]};
  for (const std::string& item : {"c", "d"})
    CHECK(full_mask_oracle(params, item, keys) ==
          full_mask_oracle(params, item, permuted));
}

TEST_CASE("mediator variant returns the identical canonical order") {
  std::vector<std::vector<std::string>> lists = {
      {"a", "b", "c"}, {"b", "c", "d"}, {"c", "b"}};

  auto peer = demo::run_linkage_inproc(demo::toy_ring(3, "toy64"), lists, 808);
  auto brokered =
      demo::run_linkage_inproc(demo::toy_ring(3, "toy64", /*with_mediator=*/true),
                               lists, 808);

  // same seeds => same keys => identical canonical bytes
  CHECK(peer.outcomes[0].result.canonical_order ==
        brokered.outcomes[0].result.canonical_order);
  for (size_t i = 0; i < 3; ++i)
    CHECK(mapped_back(brokered.outcomes[i]) == intersect_plain(lists));

  // the broker never holds key material: its state dump must not contain
  // any party's key bytes
  REQUIRE(brokered.mediator_state.has_value());
  Bytes dump = brokered.mediator_state->dump(brokered.record.params);
  for (const auto& [id, key] : brokered.record.keys) {
    Bytes key_bytes = key_to_bytes(brokered.record.params, key);
    CHECK(std::search(dump.begin(), dump.end(), key_bytes.begin(), key_bytes.end()) ==
          dump.end());
  }
}

TEST_CASE("transcript hygiene: payloads are residues, raw encodings never travel") {
  std::vector<std::vector<std::string>> lists = {
      {"alpha", "beta", "gamma"}, {"beta", "delta"}, {"gamma", "beta", "epsilon"}};
  net::RingTopology topo = demo::toy_ring(3, "toy64");
  auto run = demo::run_linkage_inproc(topo, lists, 99);
  const GroupParams& params = run.record.params;

  for (size_t p = 0; p < 3; ++p) {
    const auto& id = topo.parties[p].id;
    const Transcript& t = run.record.transcripts.at(id);

    // every element in every linkage payload parses as a subgroup member
    // (lab::linkage_elements re-validates on parse)
    for (uint8_t type : {wire::kMsgRingPass, wire::kMsgPublish}) {
      for (bool sent : {true, false}) {
        for (const MaskedElement& e : lab::linkage_elements(params, t, sent, type))
          CHECK(is_subgroup_element(params, e.value));
      }
    }

    // no observed element equals the raw encoding of a plaintext this party
    // does not itself hold
    std::set<Bigint> observed;
    for (uint8_t type : {wire::kMsgRingPass, wire::kMsgPublish})
      for (bool sent : {true, false})
        for (const MaskedElement& e : lab::linkage_elements(params, t, sent, type))
          observed.insert(e.value);
    std::set<std::string> own(lists[p].begin(), lists[p].end());
    for (size_t o = 0; o < 3; ++o) {
      if (o == p) continue;
      for (const std::string& item : lists[o]) {
        if (own.count(item)) continue;
        CHECK(observed.count(encode_item(params, item).value) == 0);
      }
    }
  }
}

TEST_CASE("linkage works over psk-sealed channels identically") {
  std::vector<std::vector<std::string>> lists = {{"a", "b"}, {"b", "c"}};
  net::RingTopology plain = demo::toy_ring(2, "toy64");
  net::RingTopology sealed = plain;
  sealed.provider = Provider::psk;
  Rng key_rng(1);
  sealed.psk = key_rng.bytes(32);

  auto run_plain = demo::run_linkage_inproc(plain, lists, 5);
  auto run_sealed = demo::run_linkage_inproc(sealed, lists, 5);
  CHECK(run_plain.outcomes[0].result.canonical_order ==
        run_sealed.outcomes[0].result.canonical_order);
  CHECK(mapped_back(run_sealed.outcomes[0]) == std::set<std::string>{"b"});
  // layering: identical protocol frames under both providers (handshake
  // frames differ by exactly the provider byte)
  auto protocol_frames = [](const Transcript& t) {
    std::vector<wire::WireMessage> out;
    for (const TranscriptRecord& rec : t.records())
      if (rec.msg.protocol_id != wire::kProtoHandshake) out.push_back(rec.msg);
    return out;
  };
  CHECK(protocol_frames(run_plain.record.transcripts.at("p0")) ==
        protocol_frames(run_sealed.record.transcripts.at("p0")));
}
