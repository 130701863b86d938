// Helpers shared by the serial and OpenMP kernels. Keeping one definition of
// each accumulation guarantees both paths add in the same order.

#pragma once

#include <span>

#include "cygnet/error.hpp"
#include "cygnet/kernels.hpp"

namespace cygnet::kernels::detail {

/// Bounds-checks ids up front; exceptions must not escape a parallel region.
template <class T>
inline void validate(const ModelParams<T>& params, EntityId s, RelationId p, EntityId o,
                     SnapshotIndex step) {
  if (s < 0 || s >= params.num_entities || o < 0 || o >= params.num_entities) {
    throw BoundsError("entity id out of range");
  }
  if (p < 0 || p >= params.num_relations) throw BoundsError("relation id out of range");
  if (step < 0) throw BoundsError("snapshot index must be non-negative");
}

template <class T>
inline void add_scaled(std::span<T> dst, double coef, std::span<const double> x) {
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += static_cast<T>(coef * x[j]);
}

/// Adds query q's contribution to row i of both affine maps.
template <class T>
inline void accumulate_affine_row(Gradients<T>& grads, std::size_t i, const QueryGrad& qg) {
  const double dc = qg.d_copy_pre[i];
  const double dg = qg.d_gen[i];
  add_scaled<T>(grads.copy_weight.row(i), dc, qg.input);
  grads.copy_bias(i, 0) += static_cast<T>(dc);
  add_scaled<T>(grads.gen_weight.row(i), dg, qg.input);
  grads.gen_bias(i, 0) += static_cast<T>(dg);
}

/// Adds query q's contribution to the subject, relation and time-unit rows.
template <class T>
inline void accumulate_embeddings(Gradients<T>& grads, const Example& ex, const QueryGrad& qg) {
  const std::size_t d = static_cast<std::size_t>(grads.dim);
  std::span<const double> dx(qg.d_input);
  auto s = grads.entity_emb.row(ex.query.subject);
  auto p = grads.relation_emb.row(ex.query.relation);
  auto t = grads.time_unit.row(0);
  const double scale = static_cast<double>(ex.query.step + 1);
  for (std::size_t j = 0; j < d; ++j) {
    s[j] += static_cast<T>(dx[j]);
    p[j] += static_cast<T>(dx[d + j]);
    t[j] += static_cast<T>(scale * dx[2 * d + j]);
  }
}

}  // namespace cygnet::kernels::detail
