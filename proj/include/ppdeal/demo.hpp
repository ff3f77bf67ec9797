#pragma once

#include <optional>
#include <vector>

#include "ppdeal/advlab.hpp"
#include "ppdeal/aggregate.hpp"
#include "ppdeal/negotiation.hpp"
#include "ppdeal/net.hpp"

namespace ppdeal::demo {

// Multi-party runners that multiplex every role over threads in one process.
// The simulated-network variants back the demo subcommand and the test
// suites; the TCP variants drive the same sessions over real sockets on
// ephemeral loopback ports. Given equal seeds the two produce byte-identical
// transcripts.

struct LinkageRun {
  lab::SessionRecord record;  // ground truth: transcripts, keys, items
  std::vector<linkage::PartyOutcome> outcomes;
  std::optional<linkage::MediatorState> mediator_state;
  std::optional<Transcript> mediator_transcript;
};

// forced_keys (one per party, lab harness use) replaces the per-party draw,
// so audits can replay sessions with known key material
LinkageRun run_linkage_inproc(const net::RingTopology& topo,
                              const std::vector<std::vector<std::string>>& items,
                              uint64_t seed,
                              const std::vector<SecretKey>* forced_keys = nullptr);
LinkageRun run_linkage_tcp(const net::RingTopology& topo,
                           const std::vector<std::vector<std::string>>& items,
                           uint64_t seed);

struct NegotiationRun {
  nego::NegotiationOutcome alice;
  nego::NegotiationOutcome bob;
  Transcript alice_transcript;
  Transcript bob_transcript;
};

NegotiationRun run_negotiation_inproc(const nego::NegotiationConfig& config,
                                      int64_t bid, int64_t reservation, uint64_t seed);
NegotiationRun run_negotiation_tcp(const nego::NegotiationConfig& config, int64_t bid,
                                   int64_t reservation, uint64_t seed);

struct SumRun {
  sum::SumResult result;  // the initiator's view
  std::vector<std::optional<sum::SumResult>> per_party;
  std::vector<Transcript> transcripts;
};

SumRun run_sum_inproc(const net::RingTopology& topo, const std::vector<Bigint>& values,
                      bool broadcast, uint64_t seed);
SumRun run_sum_tcp(const net::RingTopology& topo, const std::vector<Bigint>& values,
                   bool broadcast, uint64_t seed);

// a simple ring topology over named params, no addresses (simulated runs)
net::RingTopology toy_ring(size_t n_parties, const std::string& params_name,
                           bool with_mediator = false);

}  // namespace ppdeal::demo
