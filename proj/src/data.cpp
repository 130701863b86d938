#include "cygnet/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include "cygnet/error.hpp"

namespace cygnet {

std::size_t SnapshotSequence::num_facts() const noexcept {
  std::size_t total = 0;
  for (const auto& s : snapshots) total += s.size();
  return total;
}

namespace {

bool parse_int(std::string_view field, std::int64_t& value) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == '\t' || line[pos] == ' ')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != '\t' && line[end] != ' ') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

}  // namespace

std::vector<Quadruple> parse_quadruple_file(std::istream& in, const DatasetMeta* meta) {
  std::vector<Quadruple> quads;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 4) {
      throw ParseError(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    }
    std::int64_t v[4];
    for (int i = 0; i < 4; ++i) {
      if (!parse_int(fields[i], v[i])) {
        throw ParseError(line_no, "non-integer field '" + std::string(fields[i]) + "'");
      }
    }
    const std::int64_t max_id = std::numeric_limits<std::int32_t>::max();
    for (int i = 0; i < 3; ++i) {
      if (v[i] < 0 || v[i] > max_id) {
        throw BoundsError("line " + std::to_string(line_no) + ": id out of range");
      }
    }
    if (v[3] < 0) throw BoundsError("line " + std::to_string(line_no) + ": negative time");
    if (meta) {
      if (v[0] >= meta->num_entities || v[2] >= meta->num_entities) {
        throw BoundsError("line " + std::to_string(line_no) + ": entity id >= " +
                          std::to_string(meta->num_entities));
      }
      if (v[1] >= meta->num_relations) {
        throw BoundsError("line " + std::to_string(line_no) + ": relation id >= " +
                          std::to_string(meta->num_relations));
      }
    }
    quads.push_back({static_cast<EntityId>(v[0]), static_cast<RelationId>(v[1]),
                     static_cast<EntityId>(v[2]), v[3]});
  }
  return quads;
}

void write_quadruple_file(std::ostream& out, std::span<const Quadruple> quads) {
  for (const auto& q : quads) {
    out << q.subject << '\t' << q.relation << '\t' << q.object << '\t' << q.time << '\n';
  }
}

std::vector<Quadruple> read_quadruple_file(const std::filesystem::path& path,
                                           const DatasetMeta* meta) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return parse_quadruple_file(in, meta);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.filename().string() + ": " + e.what());
  }
}

void write_quadruple_file(const std::filesystem::path& path,
                          std::span<const Quadruple> quads) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_quadruple_file(out, quads);
}

DatasetMeta read_stat_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  DatasetMeta meta;
  if (!(in >> meta.num_entities >> meta.num_relations)) {
    throw FormatError(path.string() + ": expected 'N R'");
  }
  if (meta.num_entities <= 0 || meta.num_relations <= 0) {
    throw FormatError(path.string() + ": N and R must be positive");
  }
  return meta;
}

void write_stat_file(const std::filesystem::path& path, const DatasetMeta& meta) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << meta.num_entities << '\t' << meta.num_relations << '\n';
}

NormalizedFacts normalize_timestamps(std::span<const Quadruple> quads,
                                     std::int64_t granularity) {
  if (granularity <= 0) throw ParameterError("granularity must be positive");
  NormalizedFacts out;
  out.quads.assign(quads.begin(), quads.end());
  if (quads.empty()) return out;
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = 0;
  for (auto& q : out.quads) {
    q.time /= granularity;
    lo = std::min(lo, q.time);
    hi = std::max(hi, q.time);
  }
  for (auto& q : out.quads) q.time -= lo;
  out.num_snapshots = hi - lo + 1;
  return out;
}

AugmentedFacts augment_reciprocal(std::span<const Quadruple> quads,
                                  std::int32_t num_relations) {
  AugmentedFacts out;
  out.num_relations = 2 * num_relations;
  out.quads.reserve(2 * quads.size());
  for (const auto& q : quads) {
    if (q.relation < 0 || q.relation >= num_relations) {
      throw BoundsError("relation id " + std::to_string(q.relation) +
                        " not below R=" + std::to_string(num_relations));
    }
    out.quads.push_back(q);
    out.quads.push_back({q.object, q.relation + num_relations, q.subject, q.time});
  }
  return out;
}

std::vector<Quadruple> strip_reciprocal(std::span<const Quadruple> quads,
                                        std::int32_t num_relations) {
  std::vector<Quadruple> out;
  out.reserve(quads.size() / 2);
  for (const auto& q : quads) {
    if (q.relation < num_relations) out.push_back(q);
  }
  return out;
}

SplitScheme parse_split_scheme(const std::string& text) {
  if (text == "80/10/10") return SplitScheme::TrainValidTest;
  if (text == "80/20") return SplitScheme::TrainTest;
  throw ParameterError("unknown split '" + text + "' (expected 80/10/10 or 80/20)");
}

double split_deviation(std::span<const std::size_t> split_counts, SplitScheme scheme) {
  static constexpr double kThreeWay[] = {0.8, 0.1, 0.1};
  static constexpr double kTwoWay[] = {0.8, 0.2};
  std::span<const double> target =
      scheme == SplitScheme::TrainValidTest ? std::span<const double>(kThreeWay)
                                            : std::span<const double>(kTwoWay);
  if (split_counts.size() != target.size()) throw ParameterError("split arity mismatch");
  double total = 0;
  for (auto c : split_counts) total += static_cast<double>(c);
  double dev = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double frac = total > 0 ? static_cast<double>(split_counts[i]) / total : 0.0;
    dev += (frac - target[i]) * (frac - target[i]);
  }
  return dev;
}

ChronoSplit chronological_split(std::span<const Quadruple> quads, SplitScheme scheme) {
  std::int64_t num_snapshots = 0;
  for (const auto& q : quads) {
    if (q.time < 0) throw SplitError("facts must be normalized before splitting");
    num_snapshots = std::max(num_snapshots, q.time + 1);
  }
  const std::int64_t needed = scheme == SplitScheme::TrainValidTest ? 3 : 2;
  if (num_snapshots < needed) {
    throw SplitError("need at least " + std::to_string(needed) + " snapshots, got " +
                     std::to_string(num_snapshots));
  }

  // prefix[k] = facts in snapshots [0, k)
  std::vector<std::size_t> prefix(num_snapshots + 1, 0);
  for (const auto& q : quads) ++prefix[q.time + 1];
  std::partial_sum(prefix.begin(), prefix.end(), prefix.begin());
  const std::size_t total = prefix.back();

  ChronoSplit split;
  double best = std::numeric_limits<double>::infinity();
  if (scheme == SplitScheme::TrainValidTest) {
    for (std::int64_t b1 = 1; b1 + 1 < num_snapshots; ++b1) {
      for (std::int64_t b2 = b1 + 1; b2 < num_snapshots; ++b2) {
        const std::size_t counts[] = {prefix[b1], prefix[b2] - prefix[b1], total - prefix[b2]};
        const double dev = split_deviation(counts, scheme);
        if (dev < best) {
          best = dev;
          split.valid_begin = b1;
          split.test_begin = b2;
        }
      }
    }
  } else {
    for (std::int64_t b = 1; b < num_snapshots; ++b) {
      const std::size_t counts[] = {prefix[b], total - prefix[b]};
      const double dev = split_deviation(counts, scheme);
      if (dev < best) {
        best = dev;
        split.valid_begin = b;
        split.test_begin = b;
      }
    }
  }

  for (const auto& q : quads) {
    if (q.time < split.valid_begin) {
      split.train.push_back(q);
    } else if (q.time < split.test_begin) {
      split.valid.push_back(q);
    } else {
      split.test.push_back(q);
    }
  }
  return split;
}

SnapshotSequence group_snapshots(std::span<const Quadruple> quads,
                                 std::optional<std::int64_t> num_snapshots) {
  std::int64_t length = 0;
  for (const auto& q : quads) {
    if (q.time < 0) throw BoundsError("negative snapshot index");
    length = std::max(length, q.time + 1);
  }
  if (num_snapshots) {
    if (*num_snapshots < length) throw BoundsError("snapshot index beyond declared count");
    length = *num_snapshots;
  }
  SnapshotSequence seq;
  seq.snapshots.resize(length);
  for (const auto& q : quads) {
    seq.snapshots[q.time].push_back({q.subject, q.relation, q.object});
  }
  for (auto& snap : seq.snapshots) {
    std::sort(snap.begin(), snap.end());
    snap.erase(std::unique(snap.begin(), snap.end()), snap.end());
  }
  return seq;
}

std::vector<Quadruple> deduplicate(std::span<const Quadruple> quads) {
  std::set<Quadruple> seen;
  std::vector<Quadruple> out;
  out.reserve(quads.size());
  for (const auto& q : quads) {
    if (seen.insert(q).second) out.push_back(q);
  }
  return out;
}

void write_dataset_dir(const std::filesystem::path& dir, const ChronoSplit& split,
                       const DatasetMeta& meta) {
  std::filesystem::create_directories(dir);
  write_quadruple_file(dir / "train.txt", split.train);
  if (!split.valid.empty()) write_quadruple_file(dir / "valid.txt", split.valid);
  write_quadruple_file(dir / "test.txt", split.test);
  write_stat_file(dir / "stat.txt", meta);
}

Dataset load_dataset(const std::filesystem::path& dir, const LoadOptions& options) {
  Dataset ds;
  ds.name = std::filesystem::absolute(dir).lexically_normal().filename().string();
  if (ds.name.empty()) ds.name = std::filesystem::absolute(dir).parent_path().filename().string();
  ds.meta = read_stat_file(dir / "stat.txt");
  ds.meta.granularity = options.granularity;
  ds.reciprocal = options.reciprocal;

  auto train = deduplicate(read_quadruple_file(dir / "train.txt", &ds.meta));
  std::vector<Quadruple> valid;
  if (std::filesystem::exists(dir / "valid.txt")) {
    valid = deduplicate(read_quadruple_file(dir / "valid.txt", &ds.meta));
  }
  auto test = deduplicate(read_quadruple_file(dir / "test.txt", &ds.meta));

  // Normalize jointly so the three splits share one time axis.
  std::vector<Quadruple> all;
  all.reserve(train.size() + valid.size() + test.size());
  all.insert(all.end(), train.begin(), train.end());
  all.insert(all.end(), valid.begin(), valid.end());
  all.insert(all.end(), test.begin(), test.end());
  auto norm = normalize_timestamps(all, options.granularity);
  ds.meta.num_snapshots = norm.num_snapshots;

  auto take = [&](std::size_t offset, std::size_t count) {
    std::vector<Quadruple> part(norm.quads.begin() + offset,
                                norm.quads.begin() + offset + count);
    if (options.reciprocal) part = augment_reciprocal(part, ds.meta.num_relations).quads;
    return part;
  };
  ds.train = take(0, train.size());
  ds.valid = take(train.size(), valid.size());
  ds.test = take(train.size() + valid.size(), test.size());
  ds.num_relations_aug = options.reciprocal ? 2 * ds.meta.num_relations : ds.meta.num_relations;
  return ds;
}

}  // namespace cygnet
