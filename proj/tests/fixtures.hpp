// Random instances shared by the unit tests and the acceptance suite.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cygnet/data.hpp"
#include "cygnet/hist_vocab.hpp"
#include "cygnet/kernels.hpp"
#include "cygnet/synth.hpp"
#include "oracles.hpp"

namespace fixture {

using namespace cygnet;

/// A batch of queries from one snapshot k together with the history before k.
struct GradInstance {
  ModelParams<double> params;
  std::vector<Quadruple> history;  // times < k
  std::vector<Quadruple> batch;    // times == k
  HistVocab vocab;                 // history absorbed up to k
  std::vector<Example> examples;
};

inline GradInstance grad_instance(std::mt19937_64& rng, int max_entities = 10, int max_dim = 5,
                                  int max_batch = 4) {
  std::uniform_int_distribution<int> nd(2, max_entities), dd(1, max_dim), bd(1, max_batch),
      kd(1, 4);
  const int n = nd(rng), d = dd(rng), r = 3, k = kd(rng);
  GradInstance g;
  g.params = oracle::random_params(n, r, k + 1, d, rng, 0.8);
  g.history = oracle::random_facts(n, r, k, 6 * n, rng);
  std::uniform_int_distribution<int> e(0, n - 1), rel(0, r - 1);
  const int b = bd(rng);
  for (int i = 0; i < b; ++i) {
    // Half the queries reuse a history pair so the copy path is exercised.
    Quadruple q{e(rng), rel(rng), e(rng), k};
    if (i % 2 == 0 && !g.history.empty()) {
      const auto& h = g.history[std::uniform_int_distribution<std::size_t>(0, g.history.size() - 1)(rng)];
      q.subject = h.subject;
      q.relation = h.relation;
      if (i % 4 == 0) q.object = h.object;
    }
    g.batch.push_back(q);
  }
  g.vocab.absorb_until(group_snapshots(g.history, k), k);
  g.examples = to_examples(g.batch);
  return g;
}

/// The learnability workload: N=100, R=5, 20 snapshots of 200 facts.
inline Dataset synth_dataset(double recurrence, std::uint64_t seed, bool fixed_objects) {
  SynthConfig config;
  config.recurrence = recurrence;
  config.seed = seed;
  config.fixed_objects = fixed_objects;
  auto synth = generate(config);
  auto split = chronological_split(synth.facts);
  Dataset ds;
  ds.name = "synth";
  ds.meta = {config.num_entities, config.num_relations, config.num_snapshots, 1};
  ds.reciprocal = true;
  auto aug = [&](const std::vector<Quadruple>& q) {
    return augment_reciprocal(q, config.num_relations).quads;
  };
  ds.train = aug(split.train);
  ds.valid = aug(split.valid);
  ds.test = aug(split.test);
  ds.num_relations_aug = 2 * config.num_relations;
  return ds;
}

}  // namespace fixture
