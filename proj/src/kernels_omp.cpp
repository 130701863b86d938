#include <omp.h>

#include "cygnet/error.hpp"
#include "cygnet/kernels.hpp"
#include "kernels_common.hpp"

namespace cygnet::kernels {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

namespace omp {

template <class T>
double accumulate_gradients(const ModelParams<T>& params, std::span<const Example> batch,
                            const HistVocab& vocab, double alpha, const MaskSpec& mask,
                            Gradients<T>& grads) {
  const auto b = static_cast<std::int64_t>(batch.size());
  const auto n = static_cast<std::int64_t>(params.num_entities);
  for (const auto& ex : batch) {
    detail::validate(params, ex.query.subject, ex.query.relation, ex.truth, ex.query.step);
  }
  std::vector<QueryGrad> per_query(batch.size());

  // Per-query forward/backward are independent.
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t q = 0; q < b; ++q) {
    per_query[q] = query_backward(params, batch[q], vocab, alpha, mask);
  }

  // Each output row sums its query contributions in batch order.
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t q = 0; q < b; ++q) {
      detail::accumulate_affine_row(grads, static_cast<std::size_t>(i), per_query[q]);
    }
  }

  double loss = 0.0;
  for (std::int64_t q = 0; q < b; ++q) {
    detail::accumulate_embeddings(grads, batch[q], per_query[q]);
    loss += per_query[q].loss;
  }
  return loss;
}

template <class T>
std::vector<std::int64_t> rank_queries(const ModelParams<T>& params,
                                       std::span<const Quadruple> queries,
                                       const HistVocab& vocab, const RankRequest& request) {
  if (request.regime != FilterRegime::Raw && request.filter == nullptr) {
    throw ParameterError("filtered ranking requires a filter index");
  }
  for (const auto& f : queries) detail::validate(params, f.subject, f.relation, f.object, f.time);
  const auto count = static_cast<std::int64_t>(queries.size());
  std::vector<std::int64_t> ranks(queries.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t q = 0; q < count; ++q) {
    const auto& f = queries[q];
    const auto pred = predict_probs(params, {f.subject, f.relation, f.time}, vocab,
                                    request.alpha, request.mode, request.mask);
    std::span<const EntityId> excluded;
    if (request.filter) excluded = request.filter->excluded(request.regime, f.subject, f.relation, f.time);
    ranks[q] = rank_of_truth(pred.combined, f.object, excluded);
  }
  return ranks;
}

#define CYGNET_INSTANTIATE(T)                                                                   \
  template double accumulate_gradients(const ModelParams<T>&, std::span<const Example>,         \
                                       const HistVocab&, double, const MaskSpec&,               \
                                       Gradients<T>&);                                          \
  template std::vector<std::int64_t> rank_queries(const ModelParams<T>&,                        \
                                                  std::span<const Quadruple>, const HistVocab&, \
                                                  const RankRequest&);

CYGNET_INSTANTIATE(float)
CYGNET_INSTANTIATE(double)
#undef CYGNET_INSTANTIATE

}  // namespace omp
}  // namespace cygnet::kernels
