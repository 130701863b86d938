#include <doctest.h>

#include <random>

#include "cygnet/error.hpp"
#include "cygnet/filter.hpp"
#include "cygnet/kernels.hpp"
#include "cygnet/optimizer.hpp"
#include "fixtures.hpp"

using namespace cygnet;

namespace {

struct Workload {
  ModelParams<float> params;
  HistVocab vocab;
  std::vector<Example> batch;
  std::vector<Quadruple> queries;
  FilterIndex filter;
};

Workload workload(std::uint64_t seed, int batch_size) {
  auto ds = fixture::synth_dataset(0.6, seed, false);
  Rng rng(seed);
  Workload w;
  w.params = init_params<float>(ds.meta.num_entities, ds.num_relations_aug,
                                static_cast<std::int32_t>(ds.meta.num_snapshots), 16, rng);
  auto seq = group_snapshots(ds.train);
  const SnapshotIndex k = static_cast<SnapshotIndex>(seq.size()) - 1;
  w.vocab.absorb_until(seq, k);
  for (const auto& f : seq.snapshots[k]) {
    if (static_cast<int>(w.batch.size()) == batch_size) break;
    w.batch.push_back({{f.subject, f.relation, k}, f.object});
  }
  w.queries = ds.test;
  w.filter = build_filter({ds.train, ds.valid, ds.test});
  return w;
}

}  // namespace

TEST_CASE("serial and parallel gradient kernels agree bitwise") {
  for (int threads : {1, 2, 4}) {
    kernels::set_threads(threads);
    for (std::uint64_t seed : {1u, 2u}) {
      auto w = workload(seed, 300);
      auto gs = w.params.zeros_like();
      auto gp = w.params.zeros_like();
      const double ls = kernels::serial::accumulate_gradients(w.params, std::span<const Example>(w.batch),
                                                              w.vocab, 0.7, {}, gs);
      const double lp = kernels::omp::accumulate_gradients(w.params, std::span<const Example>(w.batch),
                                                           w.vocab, 0.7, {}, gp);
      CHECK(ls == lp);
      CHECK(gs == gp);
    }
  }
  kernels::set_threads(kernels::max_threads());
}

TEST_CASE("serial and parallel ranking kernels agree") {
  auto w = workload(3, 0);
  for (auto regime : {FilterRegime::Raw, FilterRegime::Static, FilterRegime::TimeAware}) {
    for (auto mode : {Mode::Full, Mode::CopyOnly, Mode::GenOnly, Mode::GenNew}) {
      kernels::RankRequest req;
      req.alpha = 0.6;
      req.mode = mode;
      req.regime = regime;
      req.filter = &w.filter;
      auto rs = kernels::serial::rank_queries(w.params, std::span<const Quadruple>(w.queries), w.vocab, req);
      auto rp = kernels::omp::rank_queries(w.params, std::span<const Quadruple>(w.queries), w.vocab, req);
      CHECK(rs == rp);
    }
  }
}

TEST_CASE("kernel loss equals the per-query loss sum") {
  auto w = workload(5, 50);
  auto grads = w.params.zeros_like();
  const double total = kernels::serial::accumulate_gradients(
      w.params, std::span<const Example>(w.batch), w.vocab, 0.8, {}, grads);
  double expected = 0;
  for (const auto& ex : w.batch) expected += kernels::query_loss(w.params, ex, w.vocab, 0.8, {});
  CHECK(total == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("out-of-range queries are rejected before any work") {
  auto w = workload(6, 10);
  w.batch[3].query.subject = w.params.num_entities;
  auto grads = w.params.zeros_like();
  CHECK_THROWS_AS(kernels::omp::accumulate_gradients(w.params, std::span<const Example>(w.batch),
                                                     w.vocab, 0.8, {}, grads),
                  BoundsError);
  kernels::RankRequest req;
  CHECK_THROWS_AS(kernels::serial::rank_queries(w.params, std::span<const Quadruple>(w.queries),
                                                w.vocab, req),
                  ParameterError);
}
