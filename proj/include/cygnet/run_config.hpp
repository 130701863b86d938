// Resolved command-line configuration with per-field provenance, and the
// line-based `key = value` configuration file format.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cygnet {

inline constexpr const char* kToolVersion = "cygnet 0.1.0";

enum class Provenance { Default, ConfigFile, Flag };

std::string to_string(Provenance p);

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// skipped; a repeated key keeps its last value. Throws FormatError with the
/// line number on a line without '='.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

struct ConfigField {
  std::string key;
  std::string value;
  Provenance source = Provenance::Default;
};

class RunConfig {
 public:
  RunConfig() = default;
  explicit RunConfig(std::string command) : command_(std::move(command)) {}

  void set(const std::string& key, const std::string& value, Provenance source);
  const ConfigField* find(const std::string& key) const;
  const std::vector<ConfigField>& fields() const noexcept { return fields_; }
  const std::string& command() const noexcept { return command_; }

  /// `key = value` lines, preceded by the tool version and command. Every
  /// line is prefixed with `prefix` (e.g. "# " for CSV preambles).
  std::string render(const std::string& prefix = "") const;

 private:
  std::string command_;
  std::vector<ConfigField> fields_;
};

}  // namespace cygnet
