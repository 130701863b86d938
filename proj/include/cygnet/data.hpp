// Temporal fact quadruples: parsing, timestamp normalization, reciprocal
// augmentation, chronological splitting and snapshot grouping.
//
// Exchange format (one fact per line, extra columns ignored):
//   subject<TAB>relation<TAB>object<TAB>raw_time
// plus a sidecar stat.txt holding "N R".

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cygnet {

using EntityId = std::int32_t;
using RelationId = std::int32_t;
using SnapshotIndex = std::int64_t;

struct Quadruple {
  EntityId subject = 0;
  RelationId relation = 0;
  EntityId object = 0;
  SnapshotIndex time = 0;  // raw time until normalized

  friend auto operator<=>(const Quadruple&, const Quadruple&) = default;
};

/// Time-collapsed fact.
struct Triple {
  EntityId subject = 0;
  RelationId relation = 0;
  EntityId object = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct DatasetMeta {
  std::int32_t num_entities = 0;
  std::int32_t num_relations = 0;  // before reciprocal augmentation
  std::int64_t num_snapshots = 0;
  std::int64_t granularity = 1;
};

/// Facts grouped by snapshot index; index k holds G_k. Empty snapshots are
/// kept so positions stay aligned with time steps.
struct SnapshotSequence {
  std::vector<std::vector<Triple>> snapshots;

  std::size_t size() const noexcept { return snapshots.size(); }
  std::size_t num_facts() const noexcept;
};

/// Parses the tab-separated exchange format. Times are left raw. When `meta`
/// is given, every id is checked against its entity and relation bounds.
std::vector<Quadruple> parse_quadruple_file(std::istream& in,
                                            const DatasetMeta* meta = nullptr);

void write_quadruple_file(std::ostream& out, std::span<const Quadruple> quads);

DatasetMeta read_stat_file(const std::filesystem::path& path);
void write_stat_file(const std::filesystem::path& path, const DatasetMeta& meta);

struct NormalizedFacts {
  std::vector<Quadruple> quads;
  std::int64_t num_snapshots = 0;
};

/// time <- floor(raw / granularity), then shifted so the earliest index is 0.
NormalizedFacts normalize_timestamps(std::span<const Quadruple> quads,
                                     std::int64_t granularity);

struct AugmentedFacts {
  std::vector<Quadruple> quads;
  std::int32_t num_relations = 0;  // 2R
};

/// Adds (o, p + R, s, t) after every (s, p, o, t).
AugmentedFacts augment_reciprocal(std::span<const Quadruple> quads,
                                  std::int32_t num_relations);

/// Drops reciprocal facts, recovering the original list.
std::vector<Quadruple> strip_reciprocal(std::span<const Quadruple> quads,
                                        std::int32_t num_relations);

enum class SplitScheme { TrainValidTest, TrainTest };

SplitScheme parse_split_scheme(const std::string& text);

struct ChronoSplit {
  std::vector<Quadruple> train, valid, test;
  // Snapshot indices where valid and test begin. For TrainTest, both equal.
  std::int64_t valid_begin = 0;
  std::int64_t test_begin = 0;
};

/// Splits on snapshot boundaries with fact-count proportions as close to
/// 80/10/10 (or 80/20) as possible. Ties go to the earliest boundaries.
ChronoSplit chronological_split(std::span<const Quadruple> quads,
                                SplitScheme scheme = SplitScheme::TrainValidTest);

/// Squared deviation of the split fractions from the scheme's targets.
double split_deviation(std::span<const std::size_t> split_counts, SplitScheme scheme);

/// Groups normalized facts by time. `num_snapshots` pads the tail with empty
/// snapshots; by default the sequence ends at the largest index present.
SnapshotSequence group_snapshots(std::span<const Quadruple> quads,
                                 std::optional<std::int64_t> num_snapshots = {});

/// Removes repeated quadruples, keeping the first occurrence.
std::vector<Quadruple> deduplicate(std::span<const Quadruple> quads);

/// A prepared dataset as consumed by training and evaluation. Splits are
/// normalized jointly and, when `reciprocal` is set, augmented.
struct Dataset {
  std::string name;
  DatasetMeta meta;
  bool reciprocal = true;
  std::int32_t num_relations_aug = 0;
  std::vector<Quadruple> train, valid, test;
};

struct LoadOptions {
  std::int64_t granularity = 1;
  bool reciprocal = true;
};

/// Loads train.txt, valid.txt (optional), test.txt and stat.txt from `dir`.
Dataset load_dataset(const std::filesystem::path& dir, const LoadOptions& options = {});

/// Writes train.txt, valid.txt (unless empty), test.txt and stat.txt.
void write_dataset_dir(const std::filesystem::path& dir, const ChronoSplit& split,
                       const DatasetMeta& meta);

std::vector<Quadruple> read_quadruple_file(const std::filesystem::path& path,
                                           const DatasetMeta* meta = nullptr);
void write_quadruple_file(const std::filesystem::path& path,
                          std::span<const Quadruple> quads);

}  // namespace cygnet
