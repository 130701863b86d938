// Ranking evaluation: MRR and Hits@1/3/10 per direction and per snapshot.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cygnet/filter.hpp"
#include "cygnet/kernels.hpp"
#include "cygnet/model.hpp"

namespace cygnet {

struct Metrics {
  std::int64_t count = 0;
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;

  bool defined() const noexcept { return count > 0; }
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Metrics over a list of 1-based ranks, summed in list order with
/// compensated summation.
Metrics metrics_from_ranks(std::span<const std::int64_t> ranks);

struct SnapshotMetrics {
  SnapshotIndex snapshot = 0;
  Metrics metrics;
  friend bool operator==(const SnapshotMetrics&, const SnapshotMetrics&) = default;
};

struct EvalConfig {
  double alpha = 0.8;
  Mode mode = Mode::Full;
  FilterRegime filter = FilterRegime::Static;
  MaskSpec mask;
  Exec exec = Exec::Parallel;
};

struct EvalReport {
  Metrics overall;
  Metrics object;   // relations < R
  Metrics subject;  // reciprocal relations >= R
  std::vector<SnapshotMetrics> per_snapshot;
  Mode mode = Mode::Full;
  FilterRegime filter = FilterRegime::Static;
  double alpha = 0.0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Ranks every fact of `split` as an object query. `num_relations` is the
/// original R: facts with relation >= R count as subject queries.
template <class T>
EvalReport evaluate(const ModelParams<T>& params, std::span<const Quadruple> split,
                    const HistVocab& vocab, const FilterIndex& filter, const EvalConfig& config,
                    std::int32_t num_relations);

/// `key=value` lines; metrics as percentages with two decimals.
void write_report(std::ostream& out, const EvalReport& report);

/// snapshot,count,mrr,hits1,hits3,hits10
void write_per_snapshot_csv(std::ostream& out, const EvalReport& report);

std::string format_percent(double fraction);

}  // namespace cygnet
