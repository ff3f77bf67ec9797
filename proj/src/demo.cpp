#include "ppdeal/demo.hpp"

#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "ppdeal/config_io.hpp"
#include "ppdeal/errors.hpp"
#include "ppdeal/tcp.hpp"

namespace ppdeal::demo {

namespace {

// Joins every worker, then rethrows the most specific failure: one party's
// config error makes its peers fail with secondary network/timeout errors,
// and the root cause is the useful one.
void run_all(std::vector<std::function<void()>> jobs) {
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(jobs.size());
  for (size_t i = 0; i < jobs.size(); ++i)
    threads.emplace_back([&, i] {
      try {
        jobs[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  for (std::thread& t : threads) t.join();

  auto rank = [](const std::exception_ptr& e) {
    try {
      std::rethrow_exception(e);
    } catch (const ConfigError&) {
      return 0;
    } catch (const IntegrityError&) {
      return 1;
    } catch (const ProtocolAbort& abort) {
      return abort.cause() == AbortCause::timeout ? 3 : 2;
    } catch (...) {
      return 3;
    }
  };
  std::exception_ptr best;
  int best_rank = 99;
  for (std::exception_ptr& e : errors)
    if (e && rank(e) < best_rank) {
      best = e;
      best_rank = rank(e);
    }
  if (best) std::rethrow_exception(best);
}

HandshakeSpec linkage_spec(const net::RingTopology& topo) {
  std::vector<linkage::PartyId> ids;
  for (const net::PartySpec& p : topo.parties) ids.push_back(p.id);
  HandshakeSpec spec;
  spec.protocol = wire::kProtoLinkage;
  spec.params_name = topo.params_name;
  spec.config_digest =
      linkage::linkage_config_digest(topo.params_name, ids, topo.mediator.has_value());
  spec.provider = topo.provider;
  return spec;
}

using FabricSource = std::function<net::RawChannels(size_t slot)>;

LinkageRun run_linkage(const net::RingTopology& topo,
                       const std::vector<std::vector<std::string>>& items,
                       uint64_t seed, const FabricSource& fabric,
                       const std::vector<SecretKey>* forced_keys = nullptr) {
  const size_t n = topo.parties.size();
  if (items.size() != n) throw ConfigError("one item list per party required");
  GroupParams params = cfg::load_params(topo.params_name);

  Rng master(seed);
  std::vector<uint64_t> seeds;
  for (size_t i = 0; i <= n; ++i) seeds.push_back(master.derive_seed(i));

  LinkageRun run;
  run.record.params = params;
  run.record.params_name = topo.params_name;
  for (const net::PartySpec& p : topo.parties) run.record.parties.push_back(p.id);
  run.outcomes.resize(n);

  std::vector<Transcript> transcripts(n);
  std::vector<SecretKey> keys(n);
  HandshakeSpec spec = linkage_spec(topo);

  std::vector<std::function<void()>> jobs;
  for (size_t i = 0; i < n; ++i) {
    jobs.push_back([&, i] {
      Rng rng(seeds[i]);
      keys[i] = forced_keys ? (*forced_keys)[i] : gen_secret_key(params, rng);
      net::LinkSet links(fabric(i), i, spec, topo.psk, transcripts[i], rng);
      linkage::RingConfig config;
      for (const net::PartySpec& p : topo.parties) config.parties.push_back(p.id);
      config.params = params;
      config.params_name = topo.params_name;
      config.self_index = i;
      config.use_mediator = topo.mediator.has_value();
      run.outcomes[i] = linkage::run_linkage_party(config, items[i], keys[i],
                                                   links.links());
    });
  }
  Transcript mediator_transcript;
  linkage::MediatorState mediator_state;
  if (topo.mediator) {
    jobs.push_back([&] {
      Rng rng(seeds[n]);
      net::LinkSet links(fabric(net::kMediatorSlot), net::kMediatorSlot, spec,
                         topo.psk, mediator_transcript, rng);
      mediator_state = linkage::run_linkage_mediator(params, n, links.links());
    });
  }
  run_all(std::move(jobs));

  for (size_t i = 0; i < n; ++i) {
    const linkage::PartyId& id = topo.parties[i].id;
    run.record.transcripts[id] = std::move(transcripts[i]);
    run.record.keys[id] = keys[i];
    run.record.items[id] = run.outcomes[i].items;
  }
  if (topo.mediator) {
    run.mediator_state = std::move(mediator_state);
    run.mediator_transcript = std::move(mediator_transcript);
  }
  return run;
}

}  // namespace

LinkageRun run_linkage_inproc(const net::RingTopology& topo,
                              const std::vector<std::vector<std::string>>& items,
                              uint64_t seed,
                              const std::vector<SecretKey>* forced_keys) {
  net::InProcFabric fabric(topo.parties.size(), topo.mediator.has_value());
  std::mutex mu;
  return run_linkage(
      topo, items, seed,
      [&](size_t slot) {
        std::lock_guard lock(mu);
        return fabric.take(slot);
      },
      forced_keys);
}

LinkageRun run_linkage_tcp(const net::RingTopology& topo,
                           const std::vector<std::vector<std::string>>& items,
                           uint64_t seed) {
  // pre-bind every listener on an ephemeral port, then rewrite the topology
  // so connect sides know where to go
  const size_t n = topo.parties.size();
  net::RingTopology live = topo;
  std::vector<std::unique_ptr<TcpListener>> listeners(n + 1);
  for (size_t i = 0; i < n; ++i) {
    listeners[i] = std::make_unique<TcpListener>(0);
    live.parties[i].addr = "127.0.0.1:" + std::to_string(listeners[i]->port());
  }
  if (topo.mediator) {
    listeners[n] = std::make_unique<TcpListener>(0);
    live.mediator->addr = "127.0.0.1:" + std::to_string(listeners[n]->port());
  }
  return run_linkage(live, items, seed, [&](size_t slot) {
    TcpListener* bound =
        slot == net::kMediatorSlot ? listeners[n].get() : listeners[slot].get();
    return net::tcp_fabric(live, slot, 15000, bound);
  });
}

NegotiationRun run_negotiation_inproc(const nego::NegotiationConfig& config,
                                      int64_t bid, int64_t reservation, uint64_t seed) {
  auto [alice_ch, bob_ch] = make_inproc_pair();
  Rng master(seed);
  uint64_t alice_seed = master.derive_seed(0);
  uint64_t bob_seed = master.derive_seed(1);

  NegotiationRun run;
  run_all({[&, alice_seed] {
             Rng rng(alice_seed);
             run.alice = nego::run_negotiation(nego::Role::alice, bid, config,
                                               *alice_ch, /*channel_initiator=*/true,
                                               run.alice_transcript, rng);
           },
           [&, bob_seed] {
             Rng rng(bob_seed);
             run.bob = nego::run_negotiation(nego::Role::bob, reservation, config,
                                             *bob_ch, /*channel_initiator=*/false,
                                             run.bob_transcript, rng);
           }});
  return run;
}

NegotiationRun run_negotiation_tcp(const nego::NegotiationConfig& config, int64_t bid,
                                   int64_t reservation, uint64_t seed) {
  TcpListener listener(0);
  Rng master(seed);
  uint64_t alice_seed = master.derive_seed(0);
  uint64_t bob_seed = master.derive_seed(1);

  NegotiationRun run;
  run_all({[&, alice_seed] {
             Rng rng(alice_seed);
             auto ch = tcp_connect("127.0.0.1", listener.port());
             run.alice = nego::run_negotiation(nego::Role::alice, bid, config, *ch,
                                               /*channel_initiator=*/true,
                                               run.alice_transcript, rng);
           },
           [&, bob_seed] {
             Rng rng(bob_seed);
             auto ch = listener.accept();
             run.bob = nego::run_negotiation(nego::Role::bob, reservation, config,
                                             *ch, /*channel_initiator=*/false,
                                             run.bob_transcript, rng);
           }});
  return run;
}

namespace {

SumRun run_sum(const net::RingTopology& topo, const std::vector<Bigint>& values,
               bool broadcast, uint64_t seed, const FabricSource& fabric) {
  const size_t n = topo.parties.size();
  if (values.size() != n) throw ConfigError("one value per party required");

  sum::SumParams params;
  params.modulus = topo.sum_modulus;
  params.party_count = static_cast<uint32_t>(n);
  params.value_bound = topo.sum_value_bound;
  params.validate();

  std::vector<linkage::PartyId> ids;
  for (const net::PartySpec& p : topo.parties) ids.push_back(p.id);
  HandshakeSpec spec;
  spec.protocol = wire::kProtoSum;
  spec.params_name = "";  // the sum protocol does not use group parameters
  spec.config_digest = sum::sum_config_digest(params, ids, broadcast);
  spec.provider = topo.provider;

  Rng master(seed);
  std::vector<uint64_t> seeds;
  for (size_t i = 0; i < n; ++i) seeds.push_back(master.derive_seed(i));

  SumRun run;
  run.per_party.resize(n);
  run.transcripts.resize(n);

  std::vector<std::function<void()>> jobs;
  for (size_t i = 0; i < n; ++i) {
    jobs.push_back([&, i] {
      Rng rng(seeds[i]);
      net::LinkSet links(fabric(i), i, spec, topo.psk, run.transcripts[i], rng);
      run.per_party[i] =
          sum::run_sum_party(params, n, i, values[i], broadcast, links.links(), rng);
    });
  }
  run_all(std::move(jobs));
  if (!run.per_party[0]) throw IntegrityError("initiator finished without a result");
  run.result = *run.per_party[0];
  return run;
}

}  // namespace

SumRun run_sum_inproc(const net::RingTopology& topo, const std::vector<Bigint>& values,
                      bool broadcast, uint64_t seed) {
  net::InProcFabric fabric(topo.parties.size(), /*with_mediator=*/false);
  std::mutex mu;
  return run_sum(topo, values, broadcast, seed, [&](size_t slot) {
    std::lock_guard lock(mu);
    return fabric.take(slot);
  });
}

SumRun run_sum_tcp(const net::RingTopology& topo, const std::vector<Bigint>& values,
                   bool broadcast, uint64_t seed) {
  const size_t n = topo.parties.size();
  net::RingTopology live = topo;
  std::vector<std::unique_ptr<TcpListener>> listeners(n);
  for (size_t i = 0; i < n; ++i) {
    listeners[i] = std::make_unique<TcpListener>(0);
    live.parties[i].addr = "127.0.0.1:" + std::to_string(listeners[i]->port());
  }
  return run_sum(live, values, broadcast, seed, [&](size_t slot) {
    return net::tcp_fabric(live, slot, 15000, listeners[slot].get());
  });
}

net::RingTopology toy_ring(size_t n_parties, const std::string& params_name,
                           bool with_mediator) {
  net::RingTopology topo;
  topo.params_name = params_name;
  for (size_t i = 0; i < n_parties; ++i)
    topo.parties.push_back({"p" + std::to_string(i), ""});
  if (with_mediator) topo.mediator = net::PartySpec{"broker", ""};
  return topo;
}

}  // namespace ppdeal::demo
