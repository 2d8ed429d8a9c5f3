#include "depscope/config.hpp"

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace depscope::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

// "value", 123, or [1, 2, 3]
struct TomlValue {
  std::string str;
  std::optional<long long> integer;
  std::vector<double> array;
  bool is_array = false;
};

std::optional<TomlValue> parse_value(const std::string& raw) {
  std::string v = trim(raw);
  if (v.empty()) return std::nullopt;
  TomlValue out;
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') return std::nullopt;
    out.str = v.substr(1, v.size() - 2);
    return out;
  }
  if (v.front() == '[') {
    if (v.back() != ']') return std::nullopt;
    out.is_array = true;
    std::istringstream items(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        out.array.push_back(std::stod(item));
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
    return out;
  }
  try {
    std::size_t used = 0;
    out.integer = std::stoll(v, &used);
    if (used != v.size()) return std::nullopt;
  } catch (const std::exception&) {
    out.str = v;  // bare word
  }
  return out;
}

void apply_key(WorkspaceConfig& cfg, const std::string& section, const std::string& key,
               const TomlValue& value, DiagnosticSink& sink) {
  if (section == "bins") {
    if (!value.is_array) {
      sink.warn("config-bad-value", key, "bin edges must be an array");
      return;
    }
    cfg.bin_edges[key] = value.array;
    return;
  }
  if (!section.empty()) {
    sink.warn("config-unknown-key", section + "." + key, "unknown table ignored");
    return;
  }
  if (key == "cache_root") cfg.cache_root = value.str;
  else if (key == "mode") apply_mode_string(cfg, value.str, sink);
  else if (key == "fixture_dir") cfg.fixture_dir = value.str;
  else if (key == "crawl_date" && value.integer) cfg.crawl_date = *value.integer;
  else if (key == "parallelism" && value.integer) cfg.parallelism = static_cast<int>(*value.integer);
  else if (key == "bugdb") cfg.bugdb_path = value.str;
  else if (key == "out") cfg.out_dir = value.str;
  else sink.warn("config-unknown-key", key, "unknown key ignored");
}

}  // namespace

registry::ClientConfig WorkspaceConfig::registry_config() const {
  registry::ClientConfig rc;
  rc.mode = registry_mode;
  rc.fixture_dir = fixture_dir;
  rc.cache_root = cache_root;
  rc.max_inflight = parallelism;
  return rc;
}

WorkspaceConfig parse_config(const std::string& toml_text, DiagnosticSink& sink) {
  WorkspaceConfig cfg;
  std::istringstream in(toml_text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        sink.warn("config-parse-error", "line " + std::to_string(line_no), "malformed table header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      sink.warn("config-parse-error", "line " + std::to_string(line_no), "expected key = value");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    auto value = parse_value(line.substr(eq + 1));
    if (key.empty() || !value) {
      sink.warn("config-parse-error", "line " + std::to_string(line_no), "malformed value");
      continue;
    }
    apply_key(cfg, section, key, *value, sink);
  }
  return cfg;
}

WorkspaceConfig load_config_file(const std::string& path, DiagnosticSink& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    sink.error("config-io-error", path, "cannot open config file");
    return WorkspaceConfig{};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), sink);
}

bool apply_mode_string(WorkspaceConfig& cfg, const std::string& mode, DiagnosticSink& sink) {
  if (mode == "network") {
    cfg.registry_mode = registry::Mode::Network;
    return true;
  }
  if (mode == "offline") {
    cfg.registry_mode = registry::Mode::Offline;
    return true;
  }
  if (mode == "fixture" || mode.rfind("fixture:", 0) == 0) {
    cfg.registry_mode = registry::Mode::Fixture;
    if (mode.size() > 8) cfg.fixture_dir = mode.substr(8);
    return true;
  }
  sink.error("config-bad-mode", mode, "expected network, fixture:<path> or offline");
  return false;
}

void apply_env(WorkspaceConfig& cfg, DiagnosticSink& sink) {
  auto get = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = get("DEPSCOPE_CACHE_ROOT")) cfg.cache_root = *v;
  if (auto v = get("DEPSCOPE_MODE")) apply_mode_string(cfg, *v, sink);
  if (auto v = get("DEPSCOPE_FIXTURE_DIR")) cfg.fixture_dir = *v;
  if (auto v = get("DEPSCOPE_CRAWL_DATE")) {
    try {
      cfg.crawl_date = std::stoll(*v);
    } catch (const std::exception&) {
      sink.warn("config-bad-value", "DEPSCOPE_CRAWL_DATE", "not an integer, ignored");
    }
  }
  if (auto v = get("DEPSCOPE_PARALLELISM")) {
    try {
      cfg.parallelism = std::stoi(*v);
    } catch (const std::exception&) {
      sink.warn("config-bad-value", "DEPSCOPE_PARALLELISM", "not an integer, ignored");
    }
  }
  if (auto v = get("DEPSCOPE_BUGDB")) cfg.bugdb_path = *v;
  if (auto v = get("DEPSCOPE_OUT")) cfg.out_dir = *v;
}

bool validate(const WorkspaceConfig& cfg, DiagnosticSink& sink) {
  bool ok = true;
  if (cfg.parallelism < 1) {
    sink.error("config-invalid", "parallelism", "must be >= 1");
    ok = false;
  }
  if (cfg.registry_mode == registry::Mode::Fixture) {
    if (cfg.fixture_dir.empty() || !std::filesystem::is_directory(cfg.fixture_dir)) {
      sink.error("config-invalid", "fixture_dir",
                 "fixture mode requires an existing fixture directory");
      ok = false;
    }
  }
  return ok;
}

}  // namespace depscope::config
