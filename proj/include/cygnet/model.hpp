// Copy-generation forward pass.
//
// For a query (s, p, ?, k) the input is x = [e_s; r_p; (k+1)·t_u] (length 3d).
//   copy:        p(c) = softmax(tanh(W_c x + b_c) + mask)
//   generation:  p(g) = softmax(W_g x + b_g)
//   mixture:     p    = α·p(c) + (1-α)·p(g)
// Parameters may be float (training) or double (gradient checks); all
// internal arithmetic is done in double.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cygnet/data.hpp"
#include "cygnet/hist_vocab.hpp"
#include "cygnet/tensor.hpp"

namespace cygnet {

template <class T>
struct ModelParams {
  std::int32_t num_entities = 0;
  std::int32_t num_relations = 0;  // after reciprocal augmentation
  std::int32_t num_snapshots = 0;
  std::int32_t dim = 0;
  float mask_magnitude = 100.0f;
  float alpha = 0.8f;

  Matrix<T> entity_emb;    // N × d
  Matrix<T> relation_emb;  // R_aug × d
  Matrix<T> time_unit;     // 1 × d
  Matrix<T> copy_weight;   // N × 3d
  Matrix<T> copy_bias;     // N × 1
  Matrix<T> gen_weight;    // N × 3d
  Matrix<T> gen_bias;      // N × 1

  ModelParams() = default;
  ModelParams(std::int32_t entities, std::int32_t relations, std::int32_t snapshots,
              std::int32_t d);

  std::int32_t input_dim() const noexcept { return 3 * dim; }

  /// Visits tensors in checkpoint order with their names.
  template <class F>
  void for_each_tensor(F&& f) {
    f("entity_emb", entity_emb);
    f("relation_emb", relation_emb);
    f("time_unit", time_unit);
    f("copy_weight", copy_weight);
    f("copy_bias", copy_bias);
    f("gen_weight", gen_weight);
    f("gen_bias", gen_bias);
  }
  template <class F>
  void for_each_tensor(F&& f) const {
    f("entity_emb", entity_emb);
    f("relation_emb", relation_emb);
    f("time_unit", time_unit);
    f("copy_weight", copy_weight);
    f("copy_bias", copy_bias);
    f("gen_weight", gen_weight);
    f("gen_bias", gen_bias);
  }

  /// Zero tensors with the same shapes; used as a gradient buffer.
  ModelParams zeros_like() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Gradient buffers share the parameter layout.
template <class T>
using Gradients = ModelParams<T>;

/// Converts between float and double parameter sets.
template <class To, class From>
ModelParams<To> cast_params(const ModelParams<From>& from);

struct Query {
  EntityId subject = 0;
  RelationId relation = 0;
  SnapshotIndex step = 0;
};

using ProbVector = std::vector<double>;

enum class Mode { Full, CopyOnly, GenOnly, GenNew };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

/// Numerically stable softmax (max logit subtracted).
ProbVector softmax(std::span<const double> logits);

/// (k+1)·t_u.
template <class T>
std::vector<double> time_embedding(const ModelParams<T>& params, SnapshotIndex k);

/// [e_s; r_p; (k+1)·t_u].
template <class T>
std::vector<double> query_input(const ModelParams<T>& params, const Query& query);

/// out_i = bias_i + Σ_j weight(i, j)·x_j.
template <class T>
void affine(const Matrix<T>& weight, const Matrix<T>& bias, std::span<const double> x,
            std::span<double> out);

/// tanh(W_c x + b_c): the copy index vector before masking.
template <class T>
std::vector<double> copy_index(const ModelParams<T>& params, const Query& query);

template <class T>
ProbVector copy_probs(const ModelParams<T>& params, const Query& query,
                      std::span<const double> mask);

template <class T>
std::vector<double> generation_logits(const ModelParams<T>& params, const Query& query);

template <class T>
ProbVector generation_probs(const ModelParams<T>& params, const Query& query);

/// α·pc + (1-α)·pg. Throws ParameterError for α outside [0, 1].
ProbVector combine(std::span<const double> pc, std::span<const double> pg, double alpha);

/// Both mode distributions and the mode's final distribution for one query.
struct Prediction {
  ProbVector copy;
  ProbVector generation;
  ProbVector combined;
};

template <class T>
Prediction predict_probs(const ModelParams<T>& params, const Query& query,
                         const HistVocab& vocab, double alpha, Mode mode,
                         const MaskSpec& mask = {});

/// Entity ids by descending probability, ties by ascending id.
std::vector<EntityId> rank_entities(std::span<const double> probs);

template <class T>
std::vector<EntityId> predict(const ModelParams<T>& params, const Query& query,
                              const HistVocab& vocab, double alpha, Mode mode,
                              const MaskSpec& mask = {});

/// Mask spec for a parameter set (magnitude from the params).
template <class T>
MaskSpec mask_spec(const ModelParams<T>& params, double in_value = 0.0) {
  return {static_cast<double>(params.mask_magnitude), in_value};
}

}  // namespace cygnet
