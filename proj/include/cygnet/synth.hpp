// Synthetic temporal KGs with a controllable recurrence rate.

#pragma once

#include <cstdint>
#include <vector>

#include "cygnet/data.hpp"

namespace cygnet {

struct SynthConfig {
  std::int32_t num_entities = 100;
  std::int32_t num_relations = 5;
  std::int32_t num_snapshots = 20;
  std::int32_t facts_per_snapshot = 200;
  double recurrence = 0.5;  // chance a fact is copied from history
  std::uint64_t seed = 0;
  /// Every (s, p) pair keeps the object it was first drawn with.
  bool fixed_objects = false;
};

void validate(const SynthConfig& config);

struct SynthResult {
  std::vector<Quadruple> facts;  // time = snapshot index
  SnapshotSequence sequence;
  /// Fraction of facts after the first snapshot whose (s, p, o) occurred earlier.
  double realized_repeat_rate = 0.0;
};

/// Snapshot 0 is drawn fresh. Afterwards each fact is, with probability
/// `recurrence`, copied from history: a previously used (s, p) pair chosen
/// uniformly, then one of that pair's past objects chosen uniformly. Otherwise
/// (s, p, o) is drawn uniformly. Facts within a snapshot are distinct; when
/// history has no unused fact left for the snapshot, the fact is drawn fresh.
SynthResult generate(const SynthConfig& config);

}  // namespace cygnet
