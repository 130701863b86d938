// Batch kernels behind training and evaluation.
//
// Each kernel exists twice: `serial` is the straightforward per-query loop
// kept as the reference; `omp` parallelizes over queries and over output rows.
// Both perform every floating-point addition in the same order, so their
// results are bitwise identical for any thread count.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cygnet/filter.hpp"
#include "cygnet/hist_vocab.hpp"
#include "cygnet/model.hpp"

namespace cygnet {

/// A training or evaluation query together with its true object.
struct Example {
  Query query;
  EntityId truth = 0;
};

std::vector<Example> to_examples(std::span<const Quadruple> facts);

/// Guard inside the log of the mixture probability.
inline constexpr double kProbFloor = 1e-30;

enum class Exec { Serial, Parallel };

namespace kernels {

/// Per-query backward quantities of the mixture cross-entropy.
struct QueryGrad {
  std::vector<double> input;      // x = [e_s; r_p; (k+1) t_u]
  std::vector<double> d_copy_pre; // ∂L/∂(W_c x + b_c)
  std::vector<double> d_gen;      // ∂L/∂(W_g x + b_g)
  std::vector<double> d_input;    // ∂L/∂x
  double loss = 0.0;
};

template <class T>
QueryGrad query_backward(const ModelParams<T>& params, const Example& ex,
                         const HistVocab& vocab, double alpha, const MaskSpec& mask);

/// -ln max(P(truth), floor) for one query.
template <class T>
double query_loss(const ModelParams<T>& params, const Example& ex, const HistVocab& vocab,
                  double alpha, const MaskSpec& mask);

/// Mixture probabilities for every query and the rank of each truth.
struct RankRequest {
  double alpha = 0.8;
  Mode mode = Mode::Full;
  MaskSpec mask;
  FilterRegime regime = FilterRegime::Static;
  const FilterIndex* filter = nullptr;  // required unless regime is Raw
};

namespace serial {

/// Adds the batch gradient of Σ -ln P into `grads` (which the caller zeroes)
/// and returns the summed loss.
template <class T>
double accumulate_gradients(const ModelParams<T>& params, std::span<const Example> batch,
                            const HistVocab& vocab, double alpha, const MaskSpec& mask,
                            Gradients<T>& grads);

template <class T>
std::vector<std::int64_t> rank_queries(const ModelParams<T>& params,
                                       std::span<const Quadruple> queries,
                                       const HistVocab& vocab, const RankRequest& request);

}  // namespace serial

namespace omp {

template <class T>
double accumulate_gradients(const ModelParams<T>& params, std::span<const Example> batch,
                            const HistVocab& vocab, double alpha, const MaskSpec& mask,
                            Gradients<T>& grads);

template <class T>
std::vector<std::int64_t> rank_queries(const ModelParams<T>& params,
                                       std::span<const Quadruple> queries,
                                       const HistVocab& vocab, const RankRequest& request);

}  // namespace omp

template <class T>
double accumulate_gradients(Exec exec, const ModelParams<T>& params,
                            std::span<const Example> batch, const HistVocab& vocab,
                            double alpha, const MaskSpec& mask, Gradients<T>& grads) {
  return exec == Exec::Serial
             ? serial::accumulate_gradients(params, batch, vocab, alpha, mask, grads)
             : omp::accumulate_gradients(params, batch, vocab, alpha, mask, grads);
}

template <class T>
std::vector<std::int64_t> rank_queries(Exec exec, const ModelParams<T>& params,
                                       std::span<const Quadruple> queries,
                                       const HistVocab& vocab, const RankRequest& request) {
  return exec == Exec::Serial ? serial::rank_queries(params, queries, vocab, request)
                              : omp::rank_queries(params, queries, vocab, request);
}

/// Number of threads OpenMP would use (1 when built without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace kernels
}  // namespace cygnet
