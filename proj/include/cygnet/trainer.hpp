// Mixture cross-entropy training with hand-derived gradients and AMSGrad.
//
// Each epoch walks the training snapshots in time order. Queries of snapshot
// k are scored against the vocabulary of snapshots [0, k); only after all of
// snapshot k's batches are applied is the snapshot absorbed.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cygnet/data.hpp"
#include "cygnet/hist_vocab.hpp"
#include "cygnet/kernels.hpp"
#include "cygnet/model.hpp"
#include "cygnet/optimizer.hpp"

namespace cygnet {

enum class LossReduction { Sum, Mean };

struct TrainConfig {
  double alpha = 0.8;
  std::int32_t dim = 200;
  double learning_rate = 1e-3;
  std::int32_t batch_size = 1024;
  std::int32_t epochs = 30;
  std::uint64_t seed = 0;
  double mask_magnitude = 100.0;
  double mask_in_value = 0.0;
  VocabMode vocab_mode = VocabMode::Binary;
  LossReduction reduction = LossReduction::Sum;
  Exec exec = Exec::Parallel;
  std::int32_t patience = 0;  // 0 disables early stopping
};

/// Throws ParameterError unless every field is in range.
void validate(const TrainConfig& config);

template <class T>
double batch_loss(const ModelParams<T>& params, std::span<const Example> batch,
                  const HistVocab& vocab, double alpha, const MaskSpec& mask = {},
                  LossReduction reduction = LossReduction::Sum);

/// Analytic gradient of batch_loss. Throws NumericError naming the first
/// tensor holding a non-finite entry.
template <class T>
Gradients<T> batch_gradients(const ModelParams<T>& params, std::span<const Example> batch,
                             const HistVocab& vocab, double alpha, const MaskSpec& mask = {},
                             LossReduction reduction = LossReduction::Sum,
                             Exec exec = Exec::Serial, double* loss = nullptr);

struct EpochLog {
  std::int32_t epoch = 0;
  double loss = 0.0;
  double seconds = 0.0;
  std::optional<double> valid_score;
};

struct FitHooks {
  /// Called before every optimizer step with the snapshot being trained and
  /// the vocabulary the batch was scored against.
  std::function<void(SnapshotIndex, std::span<const Example>, const HistVocab&)> on_batch;
  /// Validation score (higher is better) used for early stopping.
  std::function<double(const ModelParams<float>&)> validate;
  std::function<void(const EpochLog&)> on_epoch;
};

struct FitResult {
  ModelParams<float> params;
  std::vector<EpochLog> log;
  std::int64_t steps = 0;
  std::int32_t best_epoch = 0;
};

FitResult fit(const Dataset& dataset, const TrainConfig& config, const FitHooks& hooks = {});

/// Vocabulary frozen at the end of training: every training snapshot
/// absorbed, plus the validation snapshots when `absorb_valid` is set.
HistVocab build_vocab(const Dataset& dataset, bool absorb_valid = false,
                      VocabMode mode = VocabMode::Binary);

/// Per-dataset default mixture weight (0.8 ICEWS, 0.7 GDELT, 0.5 WIKI/YAGO,
/// 0.8 otherwise), matched case-insensitively on the dataset name.
double default_alpha(const std::string& dataset_name);

}  // namespace cygnet
