#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cygnet/model.hpp"

namespace cygnet {

using Rng = std::mt19937_64;

/// Glorot-uniform bound sqrt(6 / (fan_in + fan_out)) for a rows × cols tensor.
double xavier_bound(std::size_t rows, std::size_t cols);

/// Entries uniform on ±xavier_bound(rows, cols).
template <class T>
Matrix<T> xavier_init(std::size_t rows, std::size_t cols, Rng& rng);

/// Xavier-initialized parameters; biases start at zero.
template <class T>
ModelParams<T> init_params(std::int32_t entities, std::int32_t relations,
                           std::int32_t snapshots, std::int32_t d, Rng& rng);

struct AmsGradConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// AMSGrad without bias correction:
///   m <- β1 m + (1-β1) g;  v <- β2 v + (1-β2) g²;  v̂ <- max(v̂, v)
///   θ <- θ - lr · m / (sqrt(v̂) + ε)
template <class T>
class AmsGrad {
 public:
  AmsGrad(const ModelParams<T>& shape, AmsGradConfig config = {});

  void step(ModelParams<T>& params, const Gradients<T>& grads, double lr);

  std::int64_t steps() const noexcept { return steps_; }
  const ModelParams<T>& first_moment() const noexcept { return m_; }
  const ModelParams<T>& second_moment() const noexcept { return v_; }
  const ModelParams<T>& max_second_moment() const noexcept { return vhat_; }

 private:
  AmsGradConfig config_;
  ModelParams<T> m_, v_, vhat_;
  std::int64_t steps_ = 0;
};

}  // namespace cygnet
