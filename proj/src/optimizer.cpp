#include "cygnet/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "cygnet/error.hpp"

namespace cygnet {

double xavier_bound(std::size_t rows, std::size_t cols) {
  return std::sqrt(6.0 / static_cast<double>(rows + cols));
}

template <class T>
Matrix<T> xavier_init(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = xavier_bound(rows, cols);
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix<T> m(rows, cols);
  for (auto& v : m.flat()) v = static_cast<T>(dist(rng));
  return m;
}

template <class T>
ModelParams<T> init_params(std::int32_t entities, std::int32_t relations,
                           std::int32_t snapshots, std::int32_t d, Rng& rng) {
  ModelParams<T> p(entities, relations, snapshots, d);
  p.entity_emb = xavier_init<T>(entities, d, rng);
  p.relation_emb = xavier_init<T>(relations, d, rng);
  p.time_unit = xavier_init<T>(1, d, rng);
  p.copy_weight = xavier_init<T>(entities, 3 * d, rng);
  p.gen_weight = xavier_init<T>(entities, 3 * d, rng);
  return p;
}

template <class T>
AmsGrad<T>::AmsGrad(const ModelParams<T>& shape, AmsGradConfig config)
    : config_(config), m_(shape.zeros_like()), v_(shape.zeros_like()), vhat_(shape.zeros_like()) {}

namespace {

template <class T>
void update_tensor(std::span<T> theta, std::span<const T> g, std::span<T> m, std::span<T> v,
                   std::span<T> vhat, const AmsGradConfig& c, double lr) {
  const auto n = static_cast<std::int64_t>(theta.size());
#pragma omp parallel for schedule(static) if (n > 65536)
  for (std::int64_t i = 0; i < n; ++i) {
    const double gi = static_cast<double>(g[i]);
    const double mi = c.beta1 * static_cast<double>(m[i]) + (1.0 - c.beta1) * gi;
    const double vi = c.beta2 * static_cast<double>(v[i]) + (1.0 - c.beta2) * gi * gi;
    const double vh = std::max(static_cast<double>(vhat[i]), vi);
    m[i] = static_cast<T>(mi);
    v[i] = static_cast<T>(vi);
    vhat[i] = static_cast<T>(vh);
    theta[i] = static_cast<T>(static_cast<double>(theta[i]) - lr * mi / (std::sqrt(vh) + c.eps));
  }
}

}  // namespace

template <class T>
void AmsGrad<T>::step(ModelParams<T>& params, const Gradients<T>& grads, double lr) {
  std::vector<Matrix<T>*> theta, m, v, vhat;
  std::vector<const Matrix<T>*> g;
  params.for_each_tensor([&](const char*, Matrix<T>& t) { theta.push_back(&t); });
  m_.for_each_tensor([&](const char*, Matrix<T>& t) { m.push_back(&t); });
  v_.for_each_tensor([&](const char*, Matrix<T>& t) { v.push_back(&t); });
  vhat_.for_each_tensor([&](const char*, Matrix<T>& t) { vhat.push_back(&t); });
  grads.for_each_tensor([&](const char*, const Matrix<T>& t) { g.push_back(&t); });
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (!theta[k]->same_shape(*g[k]) || !theta[k]->same_shape(*m[k])) {
      throw ParameterError("optimizer state shape mismatch");
    }
    update_tensor<T>(theta[k]->flat(), g[k]->flat(), m[k]->flat(), v[k]->flat(),
                     vhat[k]->flat(), config_, lr);
  }
  ++steps_;
}

template Matrix<float> xavier_init<float>(std::size_t, std::size_t, Rng&);
template Matrix<double> xavier_init<double>(std::size_t, std::size_t, Rng&);
template ModelParams<float> init_params<float>(std::int32_t, std::int32_t, std::int32_t,
                                               std::int32_t, Rng&);
template ModelParams<double> init_params<double>(std::int32_t, std::int32_t, std::int32_t,
                                                 std::int32_t, Rng&);
template class AmsGrad<float>;
template class AmsGrad<double>;

}  // namespace cygnet
