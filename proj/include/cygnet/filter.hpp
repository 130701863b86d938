// Known-fact index for filtered ranking.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cygnet/data.hpp"

namespace cygnet {

enum class FilterRegime {
  Raw,        // no filtering
  Static,     // drop every other (s, p, o) known at any time
  TimeAware,  // drop only other (s, p, o) known at the query's time
};

std::string to_string(FilterRegime regime);
FilterRegime parse_filter(const std::string& text);

class FilterIndex {
 public:
  void add(std::span<const Quadruple> facts);
  /// Sorts and deduplicates; call once after the last add().
  void finalize();

  /// Objects known for (s, p) at any time.
  std::span<const EntityId> objects(EntityId s, RelationId p) const;
  /// Objects known for (s, p) at time t.
  std::span<const EntityId> objects(EntityId s, RelationId p, SnapshotIndex t) const;

  std::span<const EntityId> excluded(FilterRegime regime, EntityId s, RelationId p,
                                     SnapshotIndex t) const;

  bool contains(const Triple& f) const;
  /// Number of distinct time-collapsed triples.
  std::size_t size() const noexcept { return num_triples_; }

 private:
  struct TimedKey {
    EntityId s;
    RelationId p;
    SnapshotIndex t;
    bool operator==(const TimedKey&) const = default;
  };
  struct TimedHash {
    std::size_t operator()(const TimedKey& k) const noexcept;
  };
  static std::uint64_t key(EntityId s, RelationId p) noexcept {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) << 32) |
           static_cast<std::uint32_t>(p);
  }

  std::unordered_map<std::uint64_t, std::vector<EntityId>> static_;
  std::unordered_map<TimedKey, std::vector<EntityId>, TimedHash> timed_;
  std::size_t num_triples_ = 0;
};

/// Union of time-collapsed (and timed) facts over all splits.
FilterIndex build_filter(std::initializer_list<std::span<const Quadruple>> splits);

/// 1-based rank of `truth` under the deterministic tie rule: one plus the
/// number of surviving entities scoring strictly higher, plus the number of
/// surviving entities with equal score and a smaller id. Entities listed in
/// `excluded` (other than the truth) do not survive. `excluded` must be sorted.
std::int64_t rank_of_truth(std::span<const double> scores, EntityId truth,
                           std::span<const EntityId> excluded = {});

}  // namespace cygnet
