#include "cygnet/filter.hpp"

#include <algorithm>

#include "cygnet/error.hpp"

namespace cygnet {

std::string to_string(FilterRegime regime) {
  switch (regime) {
    case FilterRegime::Raw: return "raw";
    case FilterRegime::Static: return "static";
    case FilterRegime::TimeAware: return "time-aware";
  }
  return "?";
}

FilterRegime parse_filter(const std::string& text) {
  if (text == "raw") return FilterRegime::Raw;
  if (text == "static") return FilterRegime::Static;
  if (text == "time-aware") return FilterRegime::TimeAware;
  throw ParameterError("unknown filter '" + text + "'");
}

std::size_t FilterIndex::TimedHash::operator()(const TimedKey& k) const noexcept {
  std::uint64_t h = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.s)) << 32) |
                    static_cast<std::uint32_t>(k.p);
  h ^= static_cast<std::uint64_t>(k.t) * 0x9E3779B97F4A7C15ull;
  h ^= h >> 31;
  return static_cast<std::size_t>(h);
}

void FilterIndex::add(std::span<const Quadruple> facts) {
  for (const auto& q : facts) {
    static_[key(q.subject, q.relation)].push_back(q.object);
    timed_[{q.subject, q.relation, q.time}].push_back(q.object);
  }
}

void FilterIndex::finalize() {
  num_triples_ = 0;
  for (auto& [k, objs] : static_) {
    std::sort(objs.begin(), objs.end());
    objs.erase(std::unique(objs.begin(), objs.end()), objs.end());
    num_triples_ += objs.size();
  }
  for (auto& [k, objs] : timed_) {
    std::sort(objs.begin(), objs.end());
    objs.erase(std::unique(objs.begin(), objs.end()), objs.end());
  }
}

std::span<const EntityId> FilterIndex::objects(EntityId s, RelationId p) const {
  auto it = static_.find(key(s, p));
  if (it == static_.end()) return {};
  return it->second;
}

std::span<const EntityId> FilterIndex::objects(EntityId s, RelationId p, SnapshotIndex t) const {
  auto it = timed_.find({s, p, t});
  if (it == timed_.end()) return {};
  return it->second;
}

std::span<const EntityId> FilterIndex::excluded(FilterRegime regime, EntityId s, RelationId p,
                                                SnapshotIndex t) const {
  switch (regime) {
    case FilterRegime::Raw: return {};
    case FilterRegime::Static: return objects(s, p);
    case FilterRegime::TimeAware: return objects(s, p, t);
  }
  return {};
}

bool FilterIndex::contains(const Triple& f) const {
  auto objs = objects(f.subject, f.relation);
  return std::binary_search(objs.begin(), objs.end(), f.object);
}

FilterIndex build_filter(std::initializer_list<std::span<const Quadruple>> splits) {
  FilterIndex index;
  for (auto split : splits) index.add(split);
  index.finalize();
  return index;
}

std::int64_t rank_of_truth(std::span<const double> scores, EntityId truth,
                           std::span<const EntityId> excluded) {
  if (truth < 0 || static_cast<std::size_t>(truth) >= scores.size()) {
    throw BoundsError("truth id out of range");
  }
  const double target = scores[truth];
  auto beats = [&](EntityId e) {
    return scores[e] > target || (scores[e] == target && e < truth);
  };
  std::int64_t ahead = 0;
  for (std::size_t e = 0; e < scores.size(); ++e) ahead += beats(static_cast<EntityId>(e)) ? 1 : 0;
  for (EntityId e : excluded) {
    if (e != truth && beats(e)) --ahead;
  }
  return ahead + 1;
}

}  // namespace cygnet
