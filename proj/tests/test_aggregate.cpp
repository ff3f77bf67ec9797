#include <algorithm>
#include <set>

#include "doctest.h"
#include "ppdeal/aggregate.hpp"
#include "ppdeal/demo.hpp"
#include "ppdeal/errors.hpp"

using namespace ppdeal;
using namespace ppdeal::sum;

namespace {

net::RingTopology sum_ring(size_t n, const Bigint& modulus, const Bigint& bound) {
  net::RingTopology topo = demo::toy_ring(n, "toy64");
  topo.sum_modulus = modulus;
  topo.sum_value_bound = bound;
  return topo;
}

}  // namespace

TEST_CASE("session parameters enforce the no-wraparound bound") {
  SumParams params{Bigint(1000), 3, Bigint(100)};
  params.validate();
  CHECK_THROWS_AS((SumParams{Bigint(1000), 10, Bigint(100)}.validate()), ConfigError);
  CHECK_THROWS_AS((SumParams{Bigint(1000), 0, Bigint(1)}.validate()), ConfigError);
  CHECK(SumParams{Bigint(1) << 64, 8, (Bigint(1) << 32) - 1}.acc_width() == 8);
  CHECK(SumParams{Bigint(16), 3, Bigint(4)}.acc_width() == 1);
}

TEST_CASE("start_sum draws a deterministic blind inside [0, M)") {
  SumParams params{Bigint(1000), 3, Bigint(100)};
  Rng a(12), b(12);
  StartedSum s1 = start_sum(params, a);
  StartedSum s2 = start_sum(params, b);
  CHECK(s1.blind == s2.blind);
  CHECK(s1.accumulator == s1.blind);
  CHECK(s1.blind >= 0);
  CHECK(s1.blind < 1000);
}

TEST_CASE("the worked accumulation chain: 99 + 4 + 7 + 10") {
  SumParams params{Bigint(1000), 3, Bigint(100)};
  Bigint acc = 99;  // blind
  acc = accumulate(params, acc, 4);
  CHECK(acc == 103);
  acc = accumulate(params, acc, 7);
  CHECK(acc == 110);
  acc = accumulate(params, acc, 10);
  CHECK(acc == 120);

  SumResult result = finish(params, acc, 99);
  CHECK(result.sum == 21);
  CHECK(result.average_num == 7);
  CHECK(result.average_den == 1);

  CHECK(accumulate(params, acc, 0) == acc);
  CHECK_THROWS_AS(accumulate(params, acc, 101), ConfigError);

  SumParams tiny{Bigint(10), 1, Bigint(9)};
  CHECK(accumulate(tiny, 6, 8) == 4);  // modular wrap
}

TEST_CASE("averages stay exact rationals") {
  SumParams one{Bigint(1000), 1, Bigint(100)};
  SumResult single = finish(one, Bigint(42 + 7), Bigint(7));
  CHECK(single.sum == 42);
  CHECK(single.average_num == 42);
  CHECK(single.average_den == 1);

  SumParams two{Bigint(1000), 2, Bigint(100)};
  SumResult halves = finish(two, Bigint(3), Bigint(0));
  CHECK(halves.average_num == 3);
  CHECK(halves.average_den == 2);  // non-integer preserved exactly
}

TEST_CASE("blinding is a bijection at M=16, exhaustively") {
  // the precise, testable form of "intermediate views reveal nothing": for
  // any fixed prefix sum s, R -> (R+s) mod M permutes [0, M)
  const int M = 16;
  for (int s = 0; s < M; ++s) {
    std::set<int> image;
    for (int r = 0; r < M; ++r) image.insert((r + s) % M);
    REQUIRE(image.size() == M);
  }
}

TEST_CASE("three-party ring: [4,7,10] averages to 7") {
  auto run = demo::run_sum_inproc(sum_ring(3, Bigint(1000), Bigint(100)),
                                  {Bigint(4), Bigint(7), Bigint(10)},
                                  /*broadcast=*/false, 99);
  CHECK(run.result.sum == 21);
  CHECK(run.result.average_num == 7);
  CHECK(run.result.average_den == 1);
  // only the initiator learns the result without broadcast
  CHECK(run.per_party[0].has_value());
  CHECK(!run.per_party[1].has_value());
  CHECK(!run.per_party[2].has_value());
}

TEST_CASE("all zeros sum to zero; broadcast shares the exact result") {
  auto run = demo::run_sum_inproc(sum_ring(4, Bigint(1000), Bigint(100)),
                                  {Bigint(0), Bigint(0), Bigint(0), Bigint(0)},
                                  /*broadcast=*/true, 5);
  CHECK(run.result.sum == 0);
  CHECK(run.result.average_num == 0);
  for (const auto& r : run.per_party) {
    REQUIRE(r.has_value());
    CHECK(*r == run.result);
  }
}

TEST_CASE("random instances match the plaintext average oracle") {
  Rng rng(2024);
  Bigint modulus = Bigint(1) << 64;
  Bigint bound = (Bigint(1) << 32) - 1;
  for (int trial = 0; trial < 30; ++trial) {
    size_t n = 2 + rng.index(7);  // 2..8 parties
    std::vector<Bigint> values;
    Bigint total = 0;
    for (size_t i = 0; i < n; ++i) {
      values.push_back(rng.below(Bigint(1) << 32));
      total += values.back();
    }
    auto run = demo::run_sum_inproc(sum_ring(n, modulus, bound), values, false,
                                    rng.u64());
    REQUIRE(run.result.sum == total);
    Bigint g;
    mpz_gcd(g.get_mpz_t(), total.get_mpz_t(), Bigint(n).get_mpz_t());
    REQUIRE(run.result.average_num == total / g);
    REQUIRE(run.result.average_den == Bigint(n) / g);
  }
}

TEST_CASE("ring order does not change the average") {
  Bigint modulus = Bigint(1) << 40;
  Bigint bound = Bigint(1000000);
  std::vector<Bigint> values = {Bigint(17), Bigint(99), Bigint(3), Bigint(512)};
  auto base = demo::run_sum_inproc(sum_ring(4, modulus, bound), values, false, 10);
  std::vector<Bigint> rotated = {values[2], values[0], values[3], values[1]};
  auto permuted = demo::run_sum_inproc(sum_ring(4, modulus, bound), rotated, false, 11);
  CHECK(base.result == permuted.result);
}

TEST_CASE("wire hygiene: raw values never appear in accumulator payloads") {
  Rng rng(606);
  Bigint modulus = Bigint(1) << 64;
  Bigint bound = (Bigint(1) << 32) - 1;
  for (int trial = 0; trial < 10; ++trial) {
    size_t n = 3 + rng.index(4);
    std::vector<Bigint> values;
    for (size_t i = 0; i < n; ++i)
      values.push_back(rng.below((Bigint(1) << 32) - 65536) + 65536);  // >= 2^16
    auto run = demo::run_sum_inproc(sum_ring(n, modulus, bound), values, false,
                                    rng.u64());
    for (size_t p = 0; p < n; ++p) {
      std::vector<Bytes> encodings;
      for (const Bigint& v : values) encodings.push_back(to_fixed_bytes(v, 8));
      for (const TranscriptRecord& rec : run.transcripts[p].records()) {
        if (rec.msg.protocol_id != wire::kProtoSum) continue;
        for (const Bytes& enc : encodings) {
          bool found = std::search(rec.msg.payload.begin(), rec.msg.payload.end(),
                                   enc.begin(), enc.end()) != rec.msg.payload.end();
          REQUIRE(!found);
        }
      }
    }
  }
}

TEST_CASE("a value above the agreed bound aborts the session locally") {
  auto topo = sum_ring(2, Bigint(1000), Bigint(100));
  CHECK_THROWS_AS(
      demo::run_sum_inproc(topo, {Bigint(4), Bigint(101)}, false, 1),
      ConfigError);
}
