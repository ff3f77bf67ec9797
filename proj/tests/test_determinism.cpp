#include "doctest.h"
#include "ppdeal/demo.hpp"

using namespace ppdeal;

// Identical seeds must give byte-identical per-party transcripts whether the
// session runs over the simulated network or real TCP sockets.

TEST_CASE("linkage transcripts are byte-identical across transports") {
  net::RingTopology topo = demo::toy_ring(3, "toy64");
  std::vector<std::vector<std::string>> lists = {{"a", "b"}, {"b", "c"}, {"b", "d"}};

  auto simulated = demo::run_linkage_inproc(topo, lists, 2718);
  auto tcp = demo::run_linkage_tcp(topo, lists, 2718);

  for (const auto& p : topo.parties) {
    REQUIRE(simulated.record.transcripts.at(p.id).to_jsonl() ==
            tcp.record.transcripts.at(p.id).to_jsonl());
  }
  CHECK(simulated.outcomes[0].result.canonical_order ==
        tcp.outcomes[0].result.canonical_order);

  // and across repeated runs of the same transport
  auto again = demo::run_linkage_inproc(topo, lists, 2718);
  for (const auto& p : topo.parties)
    CHECK(again.record.transcripts.at(p.id).to_jsonl() ==
          simulated.record.transcripts.at(p.id).to_jsonl());
}

TEST_CASE("mediator linkage transcripts are byte-identical across transports") {
  net::RingTopology topo = demo::toy_ring(3, "toy64", /*with_mediator=*/true);
  std::vector<std::vector<std::string>> lists = {{"a", "b"}, {"b"}, {"b", "d"}};

  auto simulated = demo::run_linkage_inproc(topo, lists, 14142);
  auto tcp = demo::run_linkage_tcp(topo, lists, 14142);
  for (const auto& p : topo.parties)
    CHECK(simulated.record.transcripts.at(p.id).to_jsonl() ==
          tcp.record.transcripts.at(p.id).to_jsonl());
  REQUIRE(simulated.mediator_transcript.has_value());
  REQUIRE(tcp.mediator_transcript.has_value());
  CHECK(simulated.mediator_transcript->to_jsonl() == tcp.mediator_transcript->to_jsonl());
}

TEST_CASE("negotiation transcripts are byte-identical across transports") {
  nego::NegotiationConfig config;
  config.params = named_params("toy64");
  config.params_name = "toy64";
  config.grid = {0, 5, 6};
  config.mode = nego::Mode::symmetric;

  auto simulated = demo::run_negotiation_inproc(config, 15, 10, 31415);
  auto tcp = demo::run_negotiation_tcp(config, 15, 10, 31415);
  CHECK(simulated.alice_transcript.to_jsonl() == tcp.alice_transcript.to_jsonl());
  CHECK(simulated.bob_transcript.to_jsonl() == tcp.bob_transcript.to_jsonl());
  CHECK(simulated.bob.matched_price == tcp.bob.matched_price);
}

TEST_CASE("sum transcripts are byte-identical across transports") {
  net::RingTopology topo = demo::toy_ring(4, "toy64");
  topo.sum_modulus = Bigint(1) << 64;
  topo.sum_value_bound = (Bigint(1) << 32) - 1;
  std::vector<Bigint> values = {Bigint(4), Bigint(7), Bigint(10), Bigint(21)};

  auto simulated = demo::run_sum_inproc(topo, values, /*broadcast=*/true, 999);
  auto tcp = demo::run_sum_tcp(topo, values, /*broadcast=*/true, 999);
  CHECK(simulated.result == tcp.result);
  for (size_t i = 0; i < 4; ++i)
    CHECK(simulated.transcripts[i].to_jsonl() == tcp.transcripts[i].to_jsonl());
}
