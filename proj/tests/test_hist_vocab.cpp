#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "cygnet/error.hpp"
#include "cygnet/hist_vocab.hpp"
#include "oracles.hpp"

using namespace cygnet;

namespace {

std::set<EntityId> as_set(std::span<const EntityId> ids) { return {ids.begin(), ids.end()}; }

}  // namespace

TEST_CASE("absorb and lookup basics") {
  HistVocab v;
  CHECK(v.lookup(1, 0).empty());
  const std::vector<Triple> g0{{1, 0, 2}};
  v.absorb(g0, 0);
  CHECK(as_set(v.lookup(1, 0)) == std::set<EntityId>{2});
  CHECK(v.frontier() == 1);

  v.absorb(g0, 1);
  CHECK(as_set(v.lookup(1, 0)) == std::set<EntityId>{2});

  const std::vector<Triple> g2{{1, 0, 3}};
  v.absorb(g2, 2);
  CHECK(as_set(v.lookup(1, 0)) == std::set<EntityId>{2, 3});
  CHECK(v.lookup(0, 1).empty());
}

TEST_CASE("absorb out of order raises SequencingError") {
  HistVocab v;
  const std::vector<Triple> g{{0, 0, 1}};
  CHECK_THROWS_AS(v.absorb(g, 1), SequencingError);
  v.absorb(g, 0);
  CHECK_THROWS_AS(v.absorb(g, 0), SequencingError);
}

TEST_CASE("lookup after 18 seasons lists the 18 prior champions") {
  HistVocab v;
  const EntityId league = 0;
  const RelationId champion = 0;
  for (SnapshotIndex season = 0; season < 18; ++season) {
    const std::vector<Triple> g{{league, champion, static_cast<EntityId>(1 + season % 18)}};
    v.absorb(g, season);
  }
  CHECK(v.lookup(league, champion).size() == 18);
}

TEST_CASE("copy_mask examples") {
  HistVocab v;
  const std::vector<Triple> g{{0, 0, 2}, {0, 0, 5}, {1, 0, 0}, {1, 0, 1}, {1, 0, 2}};
  v.absorb(g, 0);
  CHECK(copy_mask(v, 0, 0, 6) == std::vector<double>{-100, -100, 0, -100, -100, 0});
  CHECK(copy_mask(v, 2, 0, 3) == std::vector<double>{-100, -100, -100});
  CHECK(copy_mask(v, 1, 0, 3) == std::vector<double>{0, 0, 0});

  std::vector<double> comp(6);
  v.write_complement_mask(0, 0, {}, comp);
  CHECK(comp == std::vector<double>{0, 0, -100, 0, 0, -100});
}

TEST_CASE("count mode raises the in-vocabulary value") {
  HistVocab v(VocabMode::Count);
  const std::vector<Triple> g{{0, 0, 1}};
  v.absorb(g, 0);
  v.absorb(g, 1);
  v.absorb(std::vector<Triple>{{0, 0, 2}}, 2);
  CHECK(std::vector<std::uint32_t>(v.counts(0, 0).begin(), v.counts(0, 0).end()) ==
        std::vector<std::uint32_t>{2, 1});
  CHECK(copy_mask(v, 0, 0, 3) == std::vector<double>{-100, 1, 0});
}

TEST_CASE("property: incremental construction equals brute force at every frontier") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 15, r = 3, snaps = 10;
    auto facts = oracle::random_facts(n, r, snaps, 60, rng);
    auto seq = group_snapshots(facts, snaps);
    HistVocab v;
    std::map<std::pair<EntityId, RelationId>, std::set<EntityId>> previous;
    for (SnapshotIndex k = 0; k <= snaps; ++k) {
      auto expected = oracle::vocab_brute(facts, k);
      std::size_t pairs = 0;
      for (EntityId s = 0; s < n; ++s) {
        for (RelationId p = 0; p < r; ++p) {
          auto got = as_set(v.lookup(s, p));
          auto it = expected.find({s, p});
          CHECK(got == (it == expected.end() ? std::set<EntityId>{} : it->second));
          pairs += !got.empty();
          // Monotone: nothing from the previous frontier disappears.
          auto old = previous.find({s, p});
          if (old != previous.end()) {
            CHECK(std::includes(got.begin(), got.end(), old->second.begin(), old->second.end()));
          }
          // Mask soundness: zeros sit exactly on the lookup.
          auto mask = copy_mask(v, s, p, n);
          CHECK(mask == oracle::mask_brute(expected, s, p, n, 100.0));
        }
      }
      CHECK(pairs == v.num_pairs());
      previous = expected;
      if (k < snaps) v.absorb(seq.snapshots[k], k);
    }
  }
}

TEST_CASE("absorb_until and clear") {
  std::mt19937_64 rng(7);
  auto facts = oracle::random_facts(10, 2, 5, 30, rng);
  auto seq = group_snapshots(facts, 5);
  HistVocab a, b;
  a.absorb_until(seq, 3);
  for (SnapshotIndex k = 0; k < 3; ++k) b.absorb(seq.snapshots[k], k);
  CHECK(a == b);
  CHECK(a.frontier() == 3);
  a.clear();
  CHECK(a.frontier() == 0);
  CHECK(a.num_pairs() == 0);
}

TEST_CASE("recurrence_stats") {
  std::vector<Quadruple> history{{1, 0, 2, 0}};
  auto hit = recurrence_stats(history, std::vector<Quadruple>{{1, 0, 2, 1}});
  CHECK(hit.fact_repeat_rate == 1.0);
  CHECK(hit.group_repeat_rate == 1.0);

  auto miss = recurrence_stats(history, std::vector<Quadruple>{{3, 1, 4, 1}});
  CHECK(miss.fact_repeat_rate == 0.0);
  CHECK(miss.group_repeat_rate == 0.0);

  // Group (1,0) has objects {3, 2}; it intersects the history even though
  // (1,0,3) is new. Facts: 1 of 3 repeats; groups: 1 of 2.
  auto mixed = recurrence_stats(history, std::vector<Quadruple>{{1, 0, 3, 1}, {1, 0, 2, 1}, {5, 0, 6, 1}});
  CHECK(mixed.fact_repeat_rate == doctest::Approx(1.0 / 3));
  CHECK(mixed.group_repeat_rate == 0.5);
  CHECK(mixed.probe_groups == 2);

  auto empty = recurrence_stats(history, {});
  CHECK(empty.probe_facts == 0);
  CHECK(empty.fact_repeat_rate == 0.0);
}
