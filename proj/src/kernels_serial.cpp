#include <algorithm>
#include <cmath>

#include "cygnet/error.hpp"
#include "cygnet/kernels.hpp"
#include "kernels_common.hpp"

namespace cygnet {

std::vector<Example> to_examples(std::span<const Quadruple> facts) {
  std::vector<Example> out;
  out.reserve(facts.size());
  for (const auto& q : facts) out.push_back({{q.subject, q.relation, q.time}, q.object});
  return out;
}

namespace kernels {

template <class T>
QueryGrad query_backward(const ModelParams<T>& params, const Example& ex,
                         const HistVocab& vocab, double alpha, const MaskSpec& mask) {
  const auto n = static_cast<std::size_t>(params.num_entities);
  const auto m = static_cast<std::size_t>(params.input_dim());
  const auto y = static_cast<std::size_t>(ex.truth);
  if (ex.truth < 0 || y >= n) throw BoundsError("truth id out of range");

  QueryGrad qg;
  qg.input = query_input(params, ex.query);

  std::vector<double> tanh_out(n), logits(n);
  affine(params.copy_weight, params.copy_bias, qg.input, tanh_out);
  vocab.write_mask(ex.query.subject, ex.query.relation, mask, logits);
  for (std::size_t i = 0; i < n; ++i) {
    tanh_out[i] = std::tanh(tanh_out[i]);
    logits[i] += tanh_out[i];
  }
  const ProbVector a = softmax(logits);

  affine(params.gen_weight, params.gen_bias, qg.input, logits);
  const ProbVector b = softmax(logits);

  const double prob = alpha * a[y] + (1.0 - alpha) * b[y];
  const double floored = std::max(prob, kProbFloor);
  qg.loss = -std::log(floored);

  // Below the floor the loss is constant, so its gradient vanishes.
  const bool clamped = prob < kProbFloor;
  const double copy_coef = clamped ? 0.0 : alpha * a[y] / floored;
  const double gen_coef = clamped ? 0.0 : (1.0 - alpha) * b[y] / floored;
  qg.d_copy_pre.resize(n);
  qg.d_gen.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double delta = i == y ? 1.0 : 0.0;
    qg.d_copy_pre[i] = copy_coef * (a[i] - delta) * (1.0 - tanh_out[i] * tanh_out[i]);
    qg.d_gen[i] = gen_coef * (b[i] - delta);
  }

  qg.d_input.assign(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto wc = params.copy_weight.row(i);
    auto wg = params.gen_weight.row(i);
    const double dc = qg.d_copy_pre[i];
    const double dg = qg.d_gen[i];
    for (std::size_t j = 0; j < m; ++j) {
      qg.d_input[j] += static_cast<double>(wc[j]) * dc + static_cast<double>(wg[j]) * dg;
    }
  }
  return qg;
}

template <class T>
double query_loss(const ModelParams<T>& params, const Example& ex, const HistVocab& vocab,
                  double alpha, const MaskSpec& mask) {
  auto pred = predict_probs(params, ex.query, vocab, alpha, Mode::Full, mask);
  return -std::log(std::max(pred.combined.at(ex.truth), kProbFloor));
}

namespace serial {

template <class T>
double accumulate_gradients(const ModelParams<T>& params, std::span<const Example> batch,
                            const HistVocab& vocab, double alpha, const MaskSpec& mask,
                            Gradients<T>& grads) {
  const auto n = static_cast<std::size_t>(params.num_entities);
  double loss = 0.0;
  for (const auto& ex : batch) {
    const QueryGrad qg = query_backward(params, ex, vocab, alpha, mask);
    for (std::size_t i = 0; i < n; ++i) detail::accumulate_affine_row(grads, i, qg);
    detail::accumulate_embeddings(grads, ex, qg);
    loss += qg.loss;
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
  std::vector<std::int64_t> ranks(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto& f = queries[q];
    const auto pred = predict_probs(params, {f.subject, f.relation, f.time}, vocab,
                                    request.alpha, request.mode, request.mask);
    std::span<const EntityId> excluded;
    if (request.filter) excluded = request.filter->excluded(request.regime, f.subject, f.relation, f.time);
    ranks[q] = rank_of_truth(pred.combined, f.object, excluded);
  }
  return ranks;
}

}  // namespace serial

#define CYGNET_INSTANTIATE(T)                                                                   \
  template QueryGrad query_backward(const ModelParams<T>&, const Example&, const HistVocab&,    \
                                    double, const MaskSpec&);                                   \
  template double query_loss(const ModelParams<T>&, const Example&, const HistVocab&, double,   \
                             const MaskSpec&);                                                  \
  template double serial::accumulate_gradients(const ModelParams<T>&, std::span<const Example>, \
                                               const HistVocab&, double, const MaskSpec&,       \
                                               Gradients<T>&);                                  \
  template std::vector<std::int64_t> serial::rank_queries(                                      \
      const ModelParams<T>&, std::span<const Quadruple>, const HistVocab&, const RankRequest&);

CYGNET_INSTANTIATE(float)
CYGNET_INSTANTIATE(double)
#undef CYGNET_INSTANTIATE

}  // namespace kernels
}  // namespace cygnet
