#include "cygnet/hist_vocab.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cygnet/error.hpp"

namespace cygnet {

void HistVocab::absorb(std::span<const Triple> snapshot, SnapshotIndex index) {
  if (index != frontier_) {
    throw SequencingError("expected snapshot " + std::to_string(frontier_) + ", got " +
                          std::to_string(index));
  }
  for (const auto& f : snapshot) {
    auto& entry = entries_[key(f.subject, f.relation)];
    auto it = std::lower_bound(entry.objects.begin(), entry.objects.end(), f.object);
    const auto pos = it - entry.objects.begin();
    if (it == entry.objects.end() || *it != f.object) {
      entry.objects.insert(it, f.object);
      if (mode_ == VocabMode::Count) entry.counts.insert(entry.counts.begin() + pos, 1);
    } else if (mode_ == VocabMode::Count) {
      ++entry.counts[pos];
    }
  }
  ++frontier_;
}

void HistVocab::absorb_until(const SnapshotSequence& seq, SnapshotIndex end) {
  end = std::min<SnapshotIndex>(end, static_cast<SnapshotIndex>(seq.size()));
  while (frontier_ < end) absorb(seq.snapshots[frontier_], frontier_);
}

std::span<const EntityId> HistVocab::lookup(EntityId s, RelationId p) const {
  auto it = entries_.find(key(s, p));
  if (it == entries_.end()) return {};
  return it->second.objects;
}

std::span<const std::uint32_t> HistVocab::counts(EntityId s, RelationId p) const {
  auto it = entries_.find(key(s, p));
  if (it == entries_.end()) return {};
  return it->second.counts;
}

void HistVocab::clear() {
  entries_.clear();
  frontier_ = 0;
}

void HistVocab::write_mask(EntityId s, RelationId p, const MaskSpec& spec,
                           std::span<double> out) const {
  std::fill(out.begin(), out.end(), -spec.magnitude);
  auto it = entries_.find(key(s, p));
  if (it == entries_.end()) return;
  const auto& entry = it->second;
  for (std::size_t i = 0; i < entry.objects.size(); ++i) {
    double value = spec.in_value;
    if (mode_ == VocabMode::Count) value += static_cast<double>(entry.counts[i]) - 1.0;
    out[entry.objects[i]] = value;
  }
}

void HistVocab::write_complement_mask(EntityId s, RelationId p, const MaskSpec& spec,
                                      std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (EntityId o : lookup(s, p)) out[o] = -spec.magnitude;
}

bool operator==(const HistVocab& a, const HistVocab& b) {
  if (a.mode_ != b.mode_ || a.frontier_ != b.frontier_) return false;
  if (a.entries_.size() != b.entries_.size()) return false;
  for (const auto& [k, entry] : a.entries_) {
    auto it = b.entries_.find(k);
    if (it == b.entries_.end()) return false;
    if (entry.objects != it->second.objects || entry.counts != it->second.counts) return false;
  }
  return true;
}

std::vector<double> copy_mask(const HistVocab& vocab, EntityId s, RelationId p,
                              std::int32_t num_entities, const MaskSpec& spec) {
  if (spec.magnitude <= 0) throw ParameterError("mask magnitude must be positive");
  std::vector<double> mask(num_entities);
  vocab.write_mask(s, p, spec, mask);
  return mask;
}

RecurrenceStats recurrence_stats(std::span<const Quadruple> history,
                                 std::span<const Quadruple> probe) {
  std::set<Triple> seen;
  for (const auto& q : history) seen.insert({q.subject, q.relation, q.object});

  RecurrenceStats stats;
  stats.probe_facts = probe.size();
  std::size_t repeated = 0;
  std::map<std::pair<EntityId, RelationId>, bool> groups;
  for (const auto& q : probe) {
    const bool hit = seen.count({q.subject, q.relation, q.object}) > 0;
    if (hit) ++repeated;
    auto& g = groups[{q.subject, q.relation}];
    g = g || hit;
  }
  stats.probe_groups = groups.size();
  std::size_t repeated_groups = 0;
  for (const auto& [pair, hit] : groups) repeated_groups += hit ? 1 : 0;
  if (!probe.empty()) {
    stats.fact_repeat_rate = static_cast<double>(repeated) / static_cast<double>(probe.size());
    stats.group_repeat_rate =
        static_cast<double>(repeated_groups) / static_cast<double>(groups.size());
  }
  return stats;
}

}  // namespace cygnet
