#include "cygnet/run_config.hpp"

#include <fstream>
#include <sstream>

#include "cygnet/error.hpp"

namespace cygnet {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Default: return "default";
    case Provenance::ConfigFile: return "config-file";
    case Provenance::Flag: return "flag";
  }
  return "?";
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw FormatError("config line " + std::to_string(line_no) + ": empty key");
    std::string value = t.substr(eq + 1);
    // Inline comments, as written by RunConfig::render.
    if (auto hash = value.find(" #"); hash != std::string::npos) value = value.substr(0, hash);
    out[key] = trim(value);
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void RunConfig::set(const std::string& key, const std::string& value, Provenance source) {
  for (auto& f : fields_) {
    if (f.key == key) {
      f.value = value;
      f.source = source;
      return;
    }
  }
  fields_.push_back({key, value, source});
}

const ConfigField* RunConfig::find(const std::string& key) const {
  for (const auto& f : fields_) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

std::string RunConfig::render(const std::string& prefix) const {
  std::ostringstream out;
  out << prefix << "tool = " << kToolVersion << '\n';
  out << prefix << "command = " << command_ << '\n';
  for (const auto& f : fields_) {
    out << prefix << f.key << " = " << f.value << "  # " << to_string(f.source) << '\n';
  }
  return out.str();
}

}  // namespace cygnet
