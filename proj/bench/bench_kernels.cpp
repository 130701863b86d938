// Serial reference vs OpenMP kernels on a synthetic workload.
//
//   ./bench_kernels --benchmark_filter=Gradients

#include <benchmark/benchmark.h>

#include "cygnet/filter.hpp"
#include "cygnet/kernels.hpp"
#include "cygnet/optimizer.hpp"
#include "cygnet/synth.hpp"
#include "cygnet/trainer.hpp"

namespace {

using namespace cygnet;

struct Workload {
  ModelParams<float> params;
  HistVocab vocab;
  std::vector<Example> batch;
  std::vector<Quadruple> queries;
  FilterIndex filter;

  Workload(std::int32_t entities, std::int32_t dim, std::size_t batch_size) {
    SynthConfig sc;
    sc.num_entities = entities;
    sc.num_relations = 10;
    sc.num_snapshots = 10;
    sc.facts_per_snapshot = static_cast<std::int32_t>(batch_size);
    sc.recurrence = 0.8;
    sc.seed = 7;
    auto synth = generate(sc);
    Rng rng(1);
    params = init_params<float>(entities, sc.num_relations, sc.num_snapshots, dim, rng);
    vocab.absorb_until(synth.sequence, sc.num_snapshots - 1);
    for (const auto& q : synth.facts) {
      if (q.time == sc.num_snapshots - 1) queries.push_back(q);
    }
    batch = to_examples(queries);
    filter = build_filter({synth.facts});
  }
};

template <Exec E>
void BM_Gradients(benchmark::State& state) {
  Workload w(static_cast<std::int32_t>(state.range(0)), 64, 256);
  const MaskSpec mask;
  for (auto _ : state) {
    auto grads = w.params.zeros_like();
    double loss = kernels::accumulate_gradients(E, w.params, std::span<const Example>(w.batch),
                                                w.vocab, 0.8, mask, grads);
    benchmark::DoNotOptimize(loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.batch.size()));
}

template <Exec E>
void BM_Ranking(benchmark::State& state) {
  Workload w(static_cast<std::int32_t>(state.range(0)), 64, 256);
  kernels::RankRequest req;
  req.filter = &w.filter;
  for (auto _ : state) {
    auto ranks = kernels::rank_queries(E, w.params, std::span<const Quadruple>(w.queries),
                                       w.vocab, req);
    benchmark::DoNotOptimize(ranks.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.queries.size()));
}

BENCHMARK(BM_Gradients<Exec::Serial>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gradients<Exec::Parallel>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ranking<Exec::Serial>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ranking<Exec::Parallel>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
