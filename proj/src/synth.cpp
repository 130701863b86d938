#include "cygnet/synth.hpp"

#include <map>
#include <optional>
#include <random>
#include <set>

#include "cygnet/error.hpp"

namespace cygnet {

void validate(const SynthConfig& c) {
  if (c.num_entities <= 0 || c.num_relations <= 0 || c.num_snapshots <= 0 ||
      c.facts_per_snapshot <= 0) {
    throw ParameterError("synthetic counts must be positive");
  }
  if (!(c.recurrence >= 0.0 && c.recurrence <= 1.0)) {
    throw ParameterError("recurrence must lie in [0, 1]");
  }
  const double pairs = static_cast<double>(c.num_entities) * c.num_relations;
  const double capacity = c.fixed_objects ? pairs : pairs * c.num_entities;
  if (static_cast<double>(c.facts_per_snapshot) > capacity) {
    throw CapacityError("cannot draw " + std::to_string(c.facts_per_snapshot) +
                        " distinct facts per snapshot (capacity " +
                        std::to_string(static_cast<long long>(capacity)) + ")");
  }
}

namespace {

using Pair = std::pair<EntityId, RelationId>;

class Generator {
 public:
  explicit Generator(const SynthConfig& c) : config_(c), rng_(c.seed) {}

  SynthResult run() {
    SynthResult result;
    std::size_t later_facts = 0;
    std::size_t later_repeats = 0;
    for (std::int32_t k = 0; k < config_.num_snapshots; ++k) {
      std::set<Triple> snapshot;
      for (std::int32_t i = 0; i < config_.facts_per_snapshot; ++i) {
        std::optional<Triple> fact;
        if (k > 0 && coin_(rng_) < config_.recurrence) fact = copy_from_history(snapshot);
        if (!fact) fact = fresh(snapshot);
        snapshot.insert(*fact);
        result.facts.push_back({fact->subject, fact->relation, fact->object, k});
        if (k > 0) {
          ++later_facts;
          later_repeats += seen_.count(*fact);
        }
      }
      for (const auto& f : snapshot) remember(f);
    }
    result.sequence = group_snapshots(result.facts, config_.num_snapshots);
    if (later_facts > 0) {
      result.realized_repeat_rate =
          static_cast<double>(later_repeats) / static_cast<double>(later_facts);
    }
    return result;
  }

 private:
  std::int32_t uniform(std::int32_t n) {
    return std::uniform_int_distribution<std::int32_t>(0, n - 1)(rng_);
  }

  std::vector<EntityId> unused_objects(const Pair& pair, const std::set<Triple>& snapshot) const {
    std::vector<EntityId> out;
    for (EntityId o : history_.at(pair)) {
      if (!snapshot.count({pair.first, pair.second, o})) out.push_back(o);
    }
    return out;
  }

  std::optional<Triple> copy_from_history(const std::set<Triple>& snapshot) {
    if (pairs_.empty()) return std::nullopt;
    // Rejection first; exhaustive scan only when history is nearly used up.
    for (int attempt = 0; attempt < 32; ++attempt) {
      const Pair& pair = pairs_[uniform(static_cast<std::int32_t>(pairs_.size()))];
      auto objs = unused_objects(pair, snapshot);
      if (!objs.empty()) {
        return Triple{pair.first, pair.second, objs[uniform(static_cast<std::int32_t>(objs.size()))]};
      }
    }
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      if (!unused_objects(pairs_[i], snapshot).empty()) open.push_back(i);
    }
    if (open.empty()) return std::nullopt;
    const Pair& pair = pairs_[open[uniform(static_cast<std::int32_t>(open.size()))]];
    auto objs = unused_objects(pair, snapshot);
    return Triple{pair.first, pair.second, objs[uniform(static_cast<std::int32_t>(objs.size()))]};
  }

  Triple fresh(const std::set<Triple>& snapshot) {
    while (true) {
      Triple f{uniform(config_.num_entities), uniform(config_.num_relations), 0};
      if (config_.fixed_objects) {
        auto [it, inserted] = fixed_.try_emplace({f.subject, f.relation}, 0);
        if (inserted) it->second = uniform(config_.num_entities);
        f.object = it->second;
      } else {
        f.object = uniform(config_.num_entities);
      }
      if (!snapshot.count(f)) return f;
    }
  }

  void remember(const Triple& f) {
    if (!seen_.insert(f).second) return;
    const Pair pair{f.subject, f.relation};
    auto [it, inserted] = history_.try_emplace(pair);
    if (inserted) pairs_.push_back(pair);
    it->second.push_back(f.object);
  }

  SynthConfig config_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> coin_{0.0, 1.0};
  std::vector<Pair> pairs_;
  std::map<Pair, std::vector<EntityId>> history_;
  std::map<Pair, EntityId> fixed_;
  std::set<Triple> seen_;
};

}  // namespace

SynthResult generate(const SynthConfig& config) {
  validate(config);
  return Generator(config).run();
}

}  // namespace cygnet
