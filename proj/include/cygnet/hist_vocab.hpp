// Historical vocabulary: for every (subject, relation) pair, the set of
// objects that completed it in an earlier snapshot. The copy path only
// scores entities in this set.

#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "cygnet/data.hpp"

namespace cygnet {

enum class VocabMode {
  Binary,  // repeated occurrences do not accumulate
  Count,   // occurrence counts are kept and raise the in-vocabulary mask value
};

/// Values written into the dense copy mask.
struct MaskSpec {
  double magnitude = 100.0;  // absent entities get -magnitude
  double in_value = 0.0;     // present entities
};

class HistVocab {
 public:
  explicit HistVocab(VocabMode mode = VocabMode::Binary) : mode_(mode) {}

  /// Inserts every fact of snapshot `index`, which must equal frontier().
  void absorb(std::span<const Triple> snapshot, SnapshotIndex index);

  /// Absorbs snapshots [frontier(), end) of `seq`.
  void absorb_until(const SnapshotSequence& seq, SnapshotIndex end);

  /// Sorted object ids seen with (s, p); empty for unseen pairs.
  std::span<const EntityId> lookup(EntityId s, RelationId p) const;

  /// Occurrence counts aligned with lookup(s, p). Only populated in Count mode.
  std::span<const std::uint32_t> counts(EntityId s, RelationId p) const;

  /// Number of snapshots absorbed; the vocabulary covers [0, frontier()).
  SnapshotIndex frontier() const noexcept { return frontier_; }
  VocabMode mode() const noexcept { return mode_; }
  std::size_t num_pairs() const noexcept { return entries_.size(); }

  void clear();

  /// Writes the dense copy mask for (s, p) into `out` (length N).
  void write_mask(EntityId s, RelationId p, const MaskSpec& spec, std::span<double> out) const;

  /// Writes the complement mask used by generation-new: -magnitude at
  /// in-vocabulary positions, 0 elsewhere.
  void write_complement_mask(EntityId s, RelationId p, const MaskSpec& spec,
                             std::span<double> out) const;

  friend bool operator==(const HistVocab& a, const HistVocab& b);

 private:
  static std::uint64_t key(EntityId s, RelationId p) noexcept {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) << 32) |
           static_cast<std::uint32_t>(p);
  }

  struct Entry {
    std::vector<EntityId> objects;
    std::vector<std::uint32_t> counts;
  };

  VocabMode mode_;
  SnapshotIndex frontier_ = 0;
  std::unordered_map<std::uint64_t, Entry> entries_;
};

/// Dense copy mask for (s, p): spec.in_value at in-vocabulary ids, -magnitude
/// elsewhere. In Count mode present ids get in_value + (count - 1).
std::vector<double> copy_mask(const HistVocab& vocab, EntityId s, RelationId p,
                              std::int32_t num_entities, const MaskSpec& spec = {});

struct RecurrenceStats {
  double fact_repeat_rate = 0.0;   // probe facts whose (s,p,o) occurs in history
  double group_repeat_rate = 0.0;  // probe (s,p) groups hitting the history lookup
  std::size_t probe_facts = 0;
  std::size_t probe_groups = 0;
};

RecurrenceStats recurrence_stats(std::span<const Quadruple> history,
                                 std::span<const Quadruple> probe);

}  // namespace cygnet
