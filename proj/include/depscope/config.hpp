#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "depscope/diagnostics.hpp"
#include "depscope/registry.hpp"

namespace depscope::config {

struct WorkspaceConfig {
  std::string cache_root = "depscope-cache";
  registry::Mode registry_mode = registry::Mode::Offline;
  std::string fixture_dir;
  std::optional<std::int64_t> crawl_date;  // UTC seconds; default is run time
  std::map<std::string, std::vector<double>> bin_edges;
  int parallelism = 1;
  std::string bugdb_path;
  std::string out_dir = "depscope-out";

  registry::ClientConfig registry_config() const;
};

// Parses the supported TOML subset: top-level `key = value` pairs, one
// `[bins]` table of numeric arrays, `#` comments, quoted strings, integers.
// Unknown keys are diagnostics, not errors.
WorkspaceConfig parse_config(const std::string& toml_text, DiagnosticSink& sink);
WorkspaceConfig load_config_file(const std::string& path, DiagnosticSink& sink);

// Environment overrides (highest precedence): DEPSCOPE_CACHE_ROOT,
// DEPSCOPE_MODE, DEPSCOPE_FIXTURE_DIR, DEPSCOPE_CRAWL_DATE,
// DEPSCOPE_PARALLELISM, DEPSCOPE_BUGDB, DEPSCOPE_OUT.
void apply_env(WorkspaceConfig& cfg, DiagnosticSink& sink);

// "network", "fixture:<path>" or "offline".
bool apply_mode_string(WorkspaceConfig& cfg, const std::string& mode, DiagnosticSink& sink);

// Checks the invariants (fixture dir exists in fixture mode, parallelism
// >= 1); returns false with error diagnostics on violation.
bool validate(const WorkspaceConfig& cfg, DiagnosticSink& sink);

}  // namespace depscope::config
