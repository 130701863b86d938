#include "cygnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cygnet/error.hpp"

namespace cygnet {

template <class T>
ModelParams<T>::ModelParams(std::int32_t entities, std::int32_t relations,
                            std::int32_t snapshots, std::int32_t d)
    : num_entities(entities),
      num_relations(relations),
      num_snapshots(snapshots),
      dim(d),
      entity_emb(entities, d),
      relation_emb(relations, d),
      time_unit(1, d),
      copy_weight(entities, 3 * d),
      copy_bias(entities, 1),
      gen_weight(entities, 3 * d),
      gen_bias(entities, 1) {
  if (entities <= 0 || relations <= 0 || d <= 0) {
    throw ParameterError("model shape must be positive");
  }
}

template <class T>
ModelParams<T> ModelParams<T>::zeros_like() const {
  ModelParams out(num_entities, num_relations, num_snapshots, dim);
  out.mask_magnitude = mask_magnitude;
  out.alpha = alpha;
  return out;
}

template <class To, class From>
ModelParams<To> cast_params(const ModelParams<From>& from) {
  ModelParams<To> to(from.num_entities, from.num_relations, from.num_snapshots, from.dim);
  to.mask_magnitude = from.mask_magnitude;
  to.alpha = from.alpha;
  auto copy = [](const Matrix<From>& src, Matrix<To>& dst) {
    auto s = src.flat();
    auto d = dst.flat();
    for (std::size_t i = 0; i < s.size(); ++i) d[i] = static_cast<To>(s[i]);
  };
  copy(from.entity_emb, to.entity_emb);
  copy(from.relation_emb, to.relation_emb);
  copy(from.time_unit, to.time_unit);
  copy(from.copy_weight, to.copy_weight);
  copy(from.copy_bias, to.copy_bias);
  copy(from.gen_weight, to.gen_weight);
  copy(from.gen_bias, to.gen_bias);
  return to;
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Full: return "full";
    case Mode::CopyOnly: return "copy-only";
    case Mode::GenOnly: return "gen-only";
    case Mode::GenNew: return "gen-new";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  if (text == "full") return Mode::Full;
  if (text == "copy-only") return Mode::CopyOnly;
  if (text == "gen-only") return Mode::GenOnly;
  if (text == "gen-new") return Mode::GenNew;
  throw ParameterError("unknown mode '" + text + "'");
}

ProbVector softmax(std::span<const double> logits) {
  ProbVector out(logits.size());
  if (logits.empty()) return out;
  const double hi = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - hi);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

template <class T>
std::vector<double> time_embedding(const ModelParams<T>& params, SnapshotIndex k) {
  std::vector<double> t(params.dim);
  const double scale = static_cast<double>(k + 1);
  auto unit = params.time_unit.row(0);
  for (std::int32_t j = 0; j < params.dim; ++j) t[j] = scale * static_cast<double>(unit[j]);
  return t;
}

template <class T>
std::vector<double> query_input(const ModelParams<T>& params, const Query& query) {
  if (query.subject < 0 || query.subject >= params.num_entities) {
    throw BoundsError("subject id " + std::to_string(query.subject) + " out of range");
  }
  if (query.relation < 0 || query.relation >= params.num_relations) {
    throw BoundsError("relation id " + std::to_string(query.relation) + " out of range");
  }
  if (query.step < 0) throw BoundsError("snapshot index must be non-negative");
  const std::int32_t d = params.dim;
  std::vector<double> x(3 * d);
  auto s = params.entity_emb.row(query.subject);
  auto p = params.relation_emb.row(query.relation);
  auto unit = params.time_unit.row(0);
  const double scale = static_cast<double>(query.step + 1);
  for (std::int32_t j = 0; j < d; ++j) {
    x[j] = static_cast<double>(s[j]);
    x[d + j] = static_cast<double>(p[j]);
    x[2 * d + j] = scale * static_cast<double>(unit[j]);
  }
  return x;
}

template <class T>
void affine(const Matrix<T>& weight, const Matrix<T>& bias, std::span<const double> x,
            std::span<double> out) {
  const std::size_t n = weight.rows();
  const std::size_t m = weight.cols();
  for (std::size_t i = 0; i < n; ++i) {
    auto w = weight.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += static_cast<double>(w[j]) * x[j];
    out[i] = acc + static_cast<double>(bias(i, 0));
  }
}

template <class T>
std::vector<double> copy_index(const ModelParams<T>& params, const Query& query) {
  auto x = query_input(params, query);
  std::vector<double> v(params.num_entities);
  affine(params.copy_weight, params.copy_bias, x, v);
  for (auto& e : v) e = std::tanh(e);
  return v;
}

template <class T>
ProbVector copy_probs(const ModelParams<T>& params, const Query& query,
                      std::span<const double> mask) {
  if (mask.size() != static_cast<std::size_t>(params.num_entities)) {
    throw ParameterError("mask length does not match entity count");
  }
  auto c = copy_index(params, query);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += mask[i];
  return softmax(c);
}

template <class T>
std::vector<double> generation_logits(const ModelParams<T>& params, const Query& query) {
  auto x = query_input(params, query);
  std::vector<double> g(params.num_entities);
  affine(params.gen_weight, params.gen_bias, x, g);
  return g;
}

template <class T>
ProbVector generation_probs(const ModelParams<T>& params, const Query& query) {
  return softmax(generation_logits(params, query));
}

ProbVector combine(std::span<const double> pc, std::span<const double> pg, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ParameterError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (pc.size() != pg.size()) throw ParameterError("probability vectors differ in length");
  ProbVector out(pc.size());
  for (std::size_t i = 0; i < pc.size(); ++i) out[i] = alpha * pc[i] + (1.0 - alpha) * pg[i];
  return out;
}

template <class T>
Prediction predict_probs(const ModelParams<T>& params, const Query& query,
                         const HistVocab& vocab, double alpha, Mode mode,
                         const MaskSpec& mask) {
  const auto n = static_cast<std::size_t>(params.num_entities);
  Prediction pred;
  std::vector<double> dense(n);
  vocab.write_mask(query.subject, query.relation, mask, dense);
  pred.copy = copy_probs(params, query, dense);

  auto g = generation_logits(params, query);
  if (mode == Mode::GenNew) {
    vocab.write_complement_mask(query.subject, query.relation, mask, dense);
    for (std::size_t i = 0; i < n; ++i) g[i] += dense[i];
  }
  pred.generation = softmax(g);

  switch (mode) {
    case Mode::CopyOnly: pred.combined = pred.copy; break;
    case Mode::GenOnly: pred.combined = pred.generation; break;
    case Mode::Full:
    case Mode::GenNew: pred.combined = combine(pred.copy, pred.generation, alpha); break;
  }
  return pred;
}

std::vector<EntityId> rank_entities(std::span<const double> probs) {
  std::vector<EntityId> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](EntityId a, EntityId b) { return probs[a] > probs[b]; });
  return order;
}

template <class T>
std::vector<EntityId> predict(const ModelParams<T>& params, const Query& query,
                              const HistVocab& vocab, double alpha, Mode mode,
                              const MaskSpec& mask) {
  return rank_entities(predict_probs(params, query, vocab, alpha, mode, mask).combined);
}

#define CYGNET_INSTANTIATE(T)                                                               \
  template struct ModelParams<T>;                                                           \
  template std::vector<double> time_embedding(const ModelParams<T>&, SnapshotIndex);        \
  template std::vector<double> query_input(const ModelParams<T>&, const Query&);            \
  template void affine(const Matrix<T>&, const Matrix<T>&, std::span<const double>,        \
                       std::span<double>);                                                  \
  template std::vector<double> copy_index(const ModelParams<T>&, const Query&);             \
  template ProbVector copy_probs(const ModelParams<T>&, const Query&,                       \
                                 std::span<const double>);                                  \
  template std::vector<double> generation_logits(const ModelParams<T>&, const Query&);      \
  template ProbVector generation_probs(const ModelParams<T>&, const Query&);                \
  template Prediction predict_probs(const ModelParams<T>&, const Query&, const HistVocab&,  \
                                    double, Mode, const MaskSpec&);                         \
  template std::vector<EntityId> predict(const ModelParams<T>&, const Query&,               \
                                         const HistVocab&, double, Mode, const MaskSpec&);

CYGNET_INSTANTIATE(float)
CYGNET_INSTANTIATE(double)
#undef CYGNET_INSTANTIATE

template ModelParams<double> cast_params(const ModelParams<float>&);
template ModelParams<float> cast_params(const ModelParams<double>&);
template ModelParams<float> cast_params(const ModelParams<float>&);
template ModelParams<double> cast_params(const ModelParams<double>&);

}  // namespace cygnet
