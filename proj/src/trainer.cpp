#include "cygnet/trainer.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>

#include "cygnet/error.hpp"

namespace cygnet {

void validate(const TrainConfig& c) {
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
  if (c.dim <= 0) throw ParameterError("dim must be positive");
  if (!(c.learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
  if (c.batch_size <= 0) throw ParameterError("batch size must be positive");
  if (c.epochs <= 0) throw ParameterError("epochs must be positive");
  if (!(c.mask_magnitude > 0.0)) throw ParameterError("mask magnitude must be positive");
  if (c.patience < 0) throw ParameterError("patience must be non-negative");
}

template <class T>
double batch_loss(const ModelParams<T>& params, std::span<const Example> batch,
                  const HistVocab& vocab, double alpha, const MaskSpec& mask,
                  LossReduction reduction) {
  if (batch.empty()) throw ParameterError("empty batch");
  double loss = 0.0;
  for (const auto& ex : batch) loss += kernels::query_loss(params, ex, vocab, alpha, mask);
  if (reduction == LossReduction::Mean) loss /= static_cast<double>(batch.size());
  return loss;
}

template <class T>
Gradients<T> batch_gradients(const ModelParams<T>& params, std::span<const Example> batch,
                             const HistVocab& vocab, double alpha, const MaskSpec& mask,
                             LossReduction reduction, Exec exec, double* loss) {
  if (batch.empty()) throw ParameterError("empty batch");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
  Gradients<T> grads = params.zeros_like();
  double total = kernels::accumulate_gradients(exec, params, batch, vocab, alpha, mask, grads);
  if (reduction == LossReduction::Mean) {
    const double scale = 1.0 / static_cast<double>(batch.size());
    grads.for_each_tensor([&](const char*, Matrix<T>& m) {
      for (auto& v : m.flat()) v = static_cast<T>(static_cast<double>(v) * scale);
    });
    total *= scale;
  }
  grads.for_each_tensor([&](const char* name, const Matrix<T>& m) {
    for (auto v : m.flat()) {
      if (!std::isfinite(static_cast<double>(v))) {
        throw NumericError(std::string("non-finite gradient in ") + name);
      }
    }
  });
  if (loss) *loss = total;
  return grads;
}

HistVocab build_vocab(const Dataset& dataset, bool absorb_valid, VocabMode mode) {
  HistVocab vocab(mode);
  const auto train = group_snapshots(dataset.train);
  vocab.absorb_until(train, static_cast<SnapshotIndex>(train.size()));
  if (absorb_valid && !dataset.valid.empty()) {
    const auto valid = group_snapshots(dataset.valid);
    // Gap snapshots between the splits are empty; absorbing them keeps the
    // frontier aligned with calendar steps.
    vocab.absorb_until(valid, static_cast<SnapshotIndex>(valid.size()));
  }
  return vocab;
}

double default_alpha(const std::string& dataset_name) {
  std::string name = dataset_name;
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (name.find("gdelt") != std::string::npos) return 0.7;
  if (name.find("wiki") != std::string::npos || name.find("yago") != std::string::npos) return 0.5;
  return 0.8;
}

FitResult fit(const Dataset& dataset, const TrainConfig& config, const FitHooks& hooks) {
  validate(config);
  if (dataset.train.empty()) throw ParameterError("training split is empty");

  Rng rng(config.seed);
  const auto num_snapshots = static_cast<std::int32_t>(dataset.meta.num_snapshots);
  FitResult result;
  result.params = init_params<float>(dataset.meta.num_entities, dataset.num_relations_aug,
                                     num_snapshots, config.dim, rng);
  result.params.alpha = static_cast<float>(config.alpha);
  result.params.mask_magnitude = static_cast<float>(config.mask_magnitude);

  const MaskSpec mask{config.mask_magnitude, config.mask_in_value};
  const auto snapshots = group_snapshots(dataset.train);
  std::vector<std::vector<Example>> examples(snapshots.size());
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    for (const auto& f : snapshots.snapshots[k]) {
      examples[k].push_back({{f.subject, f.relation, static_cast<SnapshotIndex>(k)}, f.object});
    }
  }

  AmsGrad<float> optimizer(result.params);
  HistVocab vocab(config.vocab_mode);
  Gradients<float> grads = result.params.zeros_like();
  std::optional<double> best_score;
  ModelParams<float> best_params;
  std::int32_t since_best = 0;

  for (std::int32_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    vocab.clear();
    double epoch_loss = 0.0;
    for (std::size_t k = 0; k < examples.size(); ++k) {
      auto& facts = examples[k];
      std::shuffle(facts.begin(), facts.end(), rng);
      for (std::size_t begin = 0; begin < facts.size(); begin += config.batch_size) {
        const std::size_t end = std::min(facts.size(), begin + config.batch_size);
        std::span<const Example> batch(facts.data() + begin, end - begin);
        if (hooks.on_batch) hooks.on_batch(static_cast<SnapshotIndex>(k), batch, vocab);
        double loss = 0.0;
        grads = batch_gradients(result.params, batch, vocab, config.alpha, mask,
                                config.reduction, config.exec, &loss);
        optimizer.step(result.params, grads, config.learning_rate);
        epoch_loss += loss;
        ++result.steps;
      }
      vocab.absorb(snapshots.snapshots[k], static_cast<SnapshotIndex>(k));
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.loss = epoch_loss;
    entry.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool stop = false;
    if (hooks.validate && config.patience > 0) {
      entry.valid_score = hooks.validate(result.params);
      if (!best_score || *entry.valid_score > *best_score) {
        best_score = entry.valid_score;
        best_params = result.params;
        result.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= config.patience) {
        stop = true;
      }
    } else {
      result.best_epoch = epoch;
    }
    result.log.push_back(entry);
    if (hooks.on_epoch) hooks.on_epoch(entry);
    if (stop) break;
  }
  if (best_score) result.params = std::move(best_params);
  return result;
}

#define CYGNET_INSTANTIATE(T)                                                                    \
  template double batch_loss(const ModelParams<T>&, std::span<const Example>, const HistVocab&, \
                             double, const MaskSpec&, LossReduction);                            \
  template Gradients<T> batch_gradients(const ModelParams<T>&, std::span<const Example>,         \
                                        const HistVocab&, double, const MaskSpec&,               \
                                        LossReduction, Exec, double*);

CYGNET_INSTANTIATE(float)
CYGNET_INSTANTIATE(double)
#undef CYGNET_INSTANTIATE

}  // namespace cygnet
