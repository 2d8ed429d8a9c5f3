#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "depscope/alert.hpp"
#include "depscope/bugdb.hpp"
#include "depscope/bytecode/api.hpp"
#include "depscope/bytecode/callgraph.hpp"
#include "depscope/config.hpp"
#include "depscope/filetree.hpp"
#include "depscope/history.hpp"
#include "depscope/manifest.hpp"
#include "depscope/metrics.hpp"
#include "depscope/registry.hpp"
#include "depscope/reporting.hpp"
#include "depscope/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace depscope;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAnalysisError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnsafe = 3;

struct CommonOpts {
  std::string config_file;
  std::string out;
  std::string mode;
  std::string fixture_dir;
  std::string cache_root;
  std::string bugdb;
  long long crawl_date = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_file, "TOML config file");
  cmd->add_option("--out", opts.out, "output directory (default ./depscope-out)");
  cmd->add_option("--mode", opts.mode, "registry mode: network, fixture:<path>, offline");
  cmd->add_option("--fixture-dir", opts.fixture_dir, "registry fixture directory");
  cmd->add_option("--cache-root", opts.cache_root, "registry cache directory");
  cmd->add_option("--crawl-date", opts.crawl_date, "crawl date override (UTC seconds)");
}

// Precedence: TOML file < flags < DEPSCOPE_* environment.
config::WorkspaceConfig resolve_config(const CommonOpts& opts, DiagnosticSink& sink) {
  config::WorkspaceConfig cfg;
  if (!opts.config_file.empty()) cfg = config::load_config_file(opts.config_file, sink);
  if (!opts.out.empty()) cfg.out_dir = opts.out;
  if (!opts.mode.empty()) config::apply_mode_string(cfg, opts.mode, sink);
  if (!opts.fixture_dir.empty()) cfg.fixture_dir = opts.fixture_dir;
  if (!opts.cache_root.empty()) cfg.cache_root = opts.cache_root;
  if (!opts.bugdb.empty()) cfg.bugdb_path = opts.bugdb;
  if (opts.crawl_date >= 0) cfg.crawl_date = opts.crawl_date;
  config::apply_env(cfg, sink);
  return cfg;
}

bool has_errors(const DiagnosticSink& sink) {
  for (const auto& d : sink.items())
    if (d.severity == Severity::Error) return true;
  return false;
}

void write_diagnostics(const config::WorkspaceConfig& cfg, const DiagnosticSink& sink) {
  reporting::write_report((fs::path(cfg.out_dir) / "diagnostics.json").string(), "diagnostics",
                          reporting::to_json(sink));
}

CommitRef head_commit(const std::string& dir) {
  CommitRef head{"WORKTREE", 0};
  std::string cmd = "git -C '" + dir + "' log -1 --format='%H %ct' 2>/dev/null";
  if (FILE* pipe = popen(cmd.c_str(), "r")) {
    char buf[160] = {};
    if (fgets(buf, sizeof(buf), pipe)) {
      std::istringstream line(buf);
      std::string id;
      long long date = 0;
      if (line >> id >> date) head = CommitRef{id, date};
    }
    pclose(pipe);
  }
  return head;
}

std::optional<LibraryVersionRef> parse_lib_version(const std::string& spec) {
  auto first = spec.find(':');
  auto last = spec.rfind(':');
  if (first == std::string::npos || last == first) return std::nullopt;
  LibraryVersionRef ref;
  ref.library.group = spec.substr(0, first);
  ref.library.name = spec.substr(first + 1, last - first - 1);
  ref.version.raw = spec.substr(last + 1);
  if (ref.library.group.empty() || ref.library.name.empty() || ref.version.raw.empty())
    return std::nullopt;
  return ref;
}

std::optional<json> read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) return std::nullopt;
  return doc;
}

// Accepts both a raw array and a report wrapper holding one under `key`.
json unwrap_report(const json& doc, const std::string& key) {
  if (doc.is_array()) return doc;
  if (doc.is_object() && doc.contains(key)) return doc[key];
  return json::array();
}

std::optional<LibraryDependency> dep_from_json(const json& j) {
  if (!j.is_object()) return std::nullopt;
  LibraryDependency d;
  d.project_id = j.value("project", std::string());
  d.config_file = j.value("config_file", std::string());
  d.commit = CommitRef{j.value("commit", std::string()), j.value("commit_date", std::int64_t(0))};
  d.version_ref.library.group = j.value("group", std::string());
  d.version_ref.library.name = j.value("name", std::string());
  d.version_ref.version.raw = j.value("version", std::string());
  std::string set = j.value("source_set", std::string("unknown"));
  d.source_set = set == "main" ? SourceSet::Main : set == "test" ? SourceSet::Test
                                                                 : SourceSet::Unknown;
  d.optional_flag = j.value("optional", false);
  if (d.version_ref.library.group.empty() || d.version_ref.library.name.empty())
    return std::nullopt;
  return d;
}

std::optional<VersionUpdate> update_from_json(const json& j) {
  if (!j.is_object()) return std::nullopt;
  VersionUpdate u;
  u.project_id = j.value("project", std::string());
  u.config_file = j.value("config_file", std::string());
  u.commit = CommitRef{j.value("commit", std::string()), j.value("commit_date", std::int64_t(0))};
  u.library.group = j.value("group", std::string());
  u.library.name = j.value("name", std::string());
  u.ver_from.raw = j.value("from", std::string());
  u.ver_to.raw = j.value("to", std::string());
  u.classification = version::classify_update(u.ver_from, u.ver_to);
  if (u.library.group.empty() || u.library.name.empty()) return std::nullopt;
  return u;
}

// Loads and keeps library artifacts (parsed jar + call graph) for the alert
// pipeline; also hands out an ArtifactLookup bound to this store.
class ArtifactStore {
 public:
  ArtifactStore(registry::RegistryClient& client, DiagnosticSink& sink)
      : client_(client), sink_(sink) {}

  std::optional<alert::LibraryArtifact> get(const LibraryVersionRef& ref) {
    auto it = loaded_.find(ref.key());
    if (it != loaded_.end()) {
      if (!it->second) return std::nullopt;
      return alert::LibraryArtifact{&it->second->jar, &it->second->graph};
    }
    auto res = client_.fetch_artifact(ref, sink_);
    if (res.status != registry::FetchStatus::Ok) {
      loaded_[ref.key()] = nullptr;
      return std::nullopt;
    }
    auto load = bytecode::load_jar_file(res.handle.cache_path, sink_);
    if (!load.ok) {
      loaded_[ref.key()] = nullptr;
      return std::nullopt;
    }
    auto entry = std::make_unique<Loaded>();
    entry->jar = std::move(load.jar);
    entry->jar.label = ref.key();
    entry->graph = bytecode::build_call_graph(entry->jar, sink_);
    auto [pos, inserted] = loaded_.emplace(ref.key(), std::move(entry));
    (void)inserted;
    return alert::LibraryArtifact{&pos->second->jar, &pos->second->graph};
  }

  alert::ArtifactLookup lookup() {
    return [this](const LibraryVersionRef& ref) { return get(ref); };
  }

 private:
  struct Loaded {
    bytecode::JarModel jar;
    bytecode::CallGraph graph;
  };
  registry::RegistryClient& client_;
  DiagnosticSink& sink_;
  std::map<std::string, std::unique_ptr<Loaded>> loaded_;
};

struct ProjectClasses {
  std::vector<std::unique_ptr<bytecode::JarModel>> storage;
  std::vector<std::pair<const bytecode::JarModel*, SourceSet>> sets;
};

// Compiled classes are read from the conventional build-output directories,
// or from explicit --classes/--test-classes overrides.
ProjectClasses load_project_classes(const std::string& project_dir,
                                    const std::vector<std::string>& main_dirs,
                                    const std::vector<std::string>& test_dirs,
                                    DiagnosticSink& sink) {
  ProjectClasses out;
  auto add = [&](const std::string& dir, SourceSet set) {
    if (!fs::is_directory(dir)) return;
    auto load = bytecode::load_class_dir(dir, sink);
    if (!load.ok || load.jar.classes.empty()) return;
    out.storage.push_back(std::make_unique<bytecode::JarModel>(std::move(load.jar)));
    out.sets.emplace_back(out.storage.back().get(), set);
  };
  if (!main_dirs.empty() || !test_dirs.empty()) {
    for (const auto& d : main_dirs) add(d, SourceSet::Main);
    for (const auto& d : test_dirs) add(d, SourceSet::Test);
    return out;
  }
  for (const char* d : {"classes", "target/classes", "build/classes/java/main"})
    add((fs::path(project_dir) / d).string(), SourceSet::Main);
  for (const char* d : {"test-classes", "target/test-classes", "build/classes/java/test"})
    add((fs::path(project_dir) / d).string(), SourceSet::Test);
  return out;
}

alert::ProjectCalls extract_project_calls(const std::string& project_id,
                                          const ProjectClasses& classes,
                                          const bytecode::ApiUniverse& universe,
                                          DiagnosticSink& sink) {
  auto extraction = bytecode::extract_calls(classes.sets, project_id, universe, sink);
  alert::ProjectCalls calls;
  calls.project_id = project_id;
  calls.calls = std::move(extraction.calls);
  return calls;
}

int finish(const config::WorkspaceConfig& cfg, DiagnosticSink& sink, int code) {
  write_diagnostics(cfg, sink);
  if (code == kExitOk && has_errors(sink)) return kExitAnalysisError;
  return code;
}

// --- subcommands ---

int cmd_extract_deps(const std::string& project_dir, const CommonOpts& opts) {
  DiagnosticSink sink;
  auto cfg = resolve_config(opts, sink);
  fs::create_directories(cfg.out_dir);
  if (!fs::is_directory(project_dir)) {
    sink.error("io-error", project_dir, "project directory not found");
    return finish(cfg, sink, kExitAnalysisError);
  }
  DiskTree tree(project_dir);
  std::string project_id = fs::path(project_dir).filename().string();
  auto deps = manifest::extract_dependencies(tree, head_commit(project_dir), project_id, sink);

  json arr = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& d : deps) {
    arr.push_back(reporting::to_json(d));
    rows.push_back({d.project_id, d.config_file, d.version_ref.library.group,
                    d.version_ref.library.name, d.version_ref.version.raw,
                    to_string(d.source_set)});
  }
  reporting::write_report((fs::path(cfg.out_dir) / "deps.json").string(), "dependencies", arr);
  reporting::write_csv((fs::path(cfg.out_dir) / "deps.csv").string(),
                       {"project", "config_file", "group", "name", "version", "source_set"}, rows);
  std::cout << deps.size() << " dependencies from " << project_id << "\n";
  return finish(cfg, sink, kExitOk);
}

int cmd_mine_updates(const std::string& project_dir, const std::string& jsonl,
                     const CommonOpts& opts) {
  DiagnosticSink sink;
  auto cfg = resolve_config(opts, sink);
  fs::create_directories(cfg.out_dir);
  std::string project_id = fs::path(project_dir).filename().string();
  std::unique_ptr<history::CommitSource> source;
  if (!jsonl.empty()) source = std::make_unique<history::JsonlCommitSource>(jsonl);
  else source = std::make_unique<history::GitCommitSource>(project_dir);
  auto updates = history::mine_updates(*source, project_id, sink);

  json arr = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& u : updates) {
    arr.push_back(reporting::to_json(u));
    rows.push_back({u.project_id, u.config_file, u.commit.id, std::to_string(u.commit.date),
                    u.library.group, u.library.name, u.ver_from.raw, u.ver_to.raw,
                    version::to_string(u.classification.direction),
                    version::to_string(u.classification.magnitude)});
  }
  reporting::write_report((fs::path(cfg.out_dir) / "updates.json").string(), "updates", arr);
  reporting::write_csv((fs::path(cfg.out_dir) / "updates.csv").string(),
                       {"project", "config_file", "commit", "commit_date", "group", "name", "from",
                        "to", "direction", "magnitude"},
                       rows);
  std::cout << updates.size() << " updates mined from " << project_id << "\n";
  return finish(cfg, sink, kExitOk);
}

int cmd_metrics(const std::string& manifest_path, const CommonOpts& opts) {
  DiagnosticSink sink;
  auto cfg = resolve_config(opts, sink);
  fs::create_directories(cfg.out_dir);
  auto doc = read_json_file(manifest_path);
  if (!doc || !doc->is_object()) {
    sink.error("manifest-parse-error", manifest_path, "corpus manifest must be a JSON object");
    return finish(cfg, sink, kExitAnalysisError);
  }
  fs::path base = fs::path(manifest_path).parent_path();
  std::vector<LibraryDependency> deps;
  std::vector<VersionUpdate> updates;
  for (const auto& p : doc->value("projects", json::array())) {
    if (!p.is_object()) continue;
    if (p.contains("deps")) {
      auto d = read_json_file((base / p["deps"].get<std::string>()).string());
      if (!d) {
        sink.warn("io-error", p.value("id", std::string()), "deps file unreadable");
      } else {
        for (const auto& e : unwrap_report(*d, "dependencies"))
          if (auto dep = dep_from_json(e)) deps.push_back(*dep);
      }
    }
    if (p.contains("updates")) {
      auto u = read_json_file((base / p["updates"].get<std::string>()).string());
      if (!u) {
        sink.warn("io-error", p.value("id", std::string()), "updates file unreadable");
      } else {
        for (const auto& e : unwrap_report(*u, "updates"))
          if (auto up = update_from_json(e)) updates.push_back(*up);
      }
    }
  }

  std::int64_t crawl_date = cfg.crawl_date.value_or(static_cast<std::int64_t>(std::time(nullptr)));
  registry::RegistryClient client(cfg.registry_config());

  auto usi = metrics::usage_intensity_lib(deps);
  auto multi = metrics::multiple_version_stats(deps);
  auto snapshots = metrics::snapshot_stats(deps);
  auto upi = metrics::update_intensity(deps, updates);

  // release lists fetched once per library
  std::map<std::string, std::vector<VersionRelease>> releases;
  auto releases_for = [&](const Library& lib) -> const std::vector<VersionRelease>& {
    auto it = releases.find(lib.key());
    if (it != releases.end()) return it->second;
    auto res = client.fetch_releases(lib, sink);
    return releases.emplace(lib.key(), std::move(res.releases)).first->second;
  };

  std::map<std::string, std::vector<std::optional<double>>> uso_by_project;
  std::map<std::string, std::vector<std::optional<double>>> uso_by_library;
  for (const auto& d : deps) {
    const auto& rel = releases_for(d.version_ref.library);
    std::optional<double> value;
    if (!rel.empty()) {
      auto uso = metrics::usage_outdatedness(d, rel, crawl_date);
      if (!uso.version_known)
        sink.warn("uso-unknown-version", d.version_ref.key(), "declared version not in registry");
      value = static_cast<double>(uso.count);
    }
    uso_by_project[d.project_id].push_back(value);
    uso_by_library[d.version_ref.library.key()].push_back(value);
  }

  std::map<std::string, std::vector<std::optional<double>>> upd_by_project;
  std::map<std::string, std::vector<std::optional<double>>> upd_by_library;
  std::vector<std::optional<double>> upd_all;
  for (const auto& u : updates) {
    auto delay = metrics::update_delay(u, releases_for(u.library));
    if (!delay) sink.info("upd-unresolvable", u.library.key() + ":" + u.ver_to.raw,
                          "release date unavailable, excluded from aggregates");
    upd_by_project[u.project_id].push_back(delay);
    upd_by_library[u.library.key()].push_back(delay);
    upd_all.push_back(delay);
  }

  json projects = json::object();
  std::vector<std::vector<std::string>> rows;
  std::vector<std::optional<double>> uso_project_means;
  for (const auto& [project, count] : usi.per_project) {
    json p;
    p["usi1"] = count;
    auto uso_mean = metrics::mean_of(uso_by_project[project]);
    if (uso_mean.mean) p["uso"] = *uso_mean.mean;
    p["uso_excluded"] = uso_mean.excluded;
    uso_project_means.push_back(uso_mean.mean);
    auto upi_it = upi.per_project.find(project);
    if (upi_it != upi.per_project.end() && upi_it->second) p["upi"] = *upi_it->second;
    auto upd_mean = metrics::mean_of(upd_by_project[project]);
    if (upd_mean.mean) p["upd_days"] = *upd_mean.mean;
    p["upd_excluded"] = upd_mean.excluded;
    auto multi_it = multi.find(project);
    p["multi_version_libraries"] = multi_it == multi.end() ? 0 : multi_it->second.size();
    auto snap_it = snapshots.find(project);
    p["snapshot_versions"] = snap_it == snapshots.end() ? 0 : snap_it->second;
    projects[project] = p;
    rows.push_back({project, std::to_string(count),
                    uso_mean.mean ? std::to_string(*uso_mean.mean) : "",
                    upi_it != upi.per_project.end() && upi_it->second
                        ? std::to_string(*upi_it->second)
                        : "",
                    upd_mean.mean ? std::to_string(*upd_mean.mean) : ""});
  }

  json libraries = json::object();
  for (const auto& [lib, count] : usi.per_library) {
    json l;
    l["usi1"] = count;
    auto uso_mean = metrics::mean_of(uso_by_library[lib.key()]);
    if (uso_mean.mean) l["uso"] = *uso_mean.mean;
    auto upi_it = upi.per_library.find(lib);
    if (upi_it != upi.per_library.end() && upi_it->second) l["upi"] = *upi_it->second;
    auto upd_mean = metrics::mean_of(upd_by_library[lib.key()]);
    if (upd_mean.mean) l["upd_days"] = *upd_mean.mean;
    libraries[lib.key()] = l;
  }

  std::vector<double> delay_bins = {30, 60, 120, 180};
  if (auto it = cfg.bin_edges.find("upd_days"); it != cfg.bin_edges.end()) delay_bins = it->second;
  std::vector<double> uso_bins = {1, 5, 10, 20};
  if (auto it = cfg.bin_edges.find("uso"); it != cfg.bin_edges.end()) uso_bins = it->second;

  json body;
  body["crawl_date"] = crawl_date;
  body["projects"] = projects;
  body["libraries"] = libraries;
  body["distributions"] = json::array(
      {reporting::to_json(metrics::emit_distribution("upd_days", upd_all, delay_bins)),
       reporting::to_json(metrics::emit_distribution("uso_p", uso_project_means, uso_bins))});
  reporting::write_report((fs::path(cfg.out_dir) / "metrics.json").string(), "metrics", body);
  reporting::write_csv((fs::path(cfg.out_dir) / "metrics.csv").string(),
                       {"project", "usi1", "uso", "upi", "upd_days"}, rows);
  std::cout << "metrics over " << usi.per_project.size() << " projects, "
            << usi.per_library.size() << " libraries\n";
  return finish(cfg, sink, kExitOk);
}

int cmd_bugdb_ingest(const std::string& issues_file, const std::string& lib_spec,
                     const std::string& tracker, const CommonOpts& opts) {
  DiagnosticSink sink;
  auto cfg = resolve_config(opts, sink);
  fs::create_directories(cfg.out_dir);
  if (tracker != "jira") {
    sink.error("bugdb-unknown-tracker", tracker, "only jira ingestion is supported");
    return finish(cfg, sink, kExitUsage);
  }
  auto colon = lib_spec.find(':');
  if (colon == std::string::npos) {
    sink.error("bugdb-bad-library", lib_spec, "expected group:name");
    return finish(cfg, sink, kExitUsage);
  }
  Library lib{lib_spec.substr(0, colon), lib_spec.substr(colon + 1)};
  std::ifstream in(issues_file, std::ios::binary);
  if (!in) {
    sink.error("io-error", issues_file, "cannot open issue stream");
    return finish(cfg, sink, kExitAnalysisError);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  auto records = bugdb::ingest_jira(buf.str(), lib, sink);

  std::string db_path = cfg.bugdb_path.empty()
                            ? (fs::path(cfg.out_dir) / "bugdb.json").string()
                            : cfg.bugdb_path;
  bugdb::BugDatabase db;
  if (fs::exists(db_path)) db = bugdb::BugDatabase::load(db_path, sink);
  for (auto& r : records) db.add(std::move(r), sink);
  db.save(db_path);
  std::cout << records.size() << " severe bugs ingested into " << db_path << "\n";
  return finish(cfg, sink, kExitOk);
}

int cmd_bugdb_validate(const CommonOpts& opts) {
  DiagnosticSink sink;
  auto cfg = resolve_config(opts, sink);
  fs::create_directories(cfg.out_dir);
  if (cfg.bugdb_path.empty()) {
    sink.error("bugdb-missing", "", "no bug database configured");
    return finish(cfg, sink, kExitUsage);
  }
  auto db = bugdb::BugDatabase::load(cfg.bugdb_path, sink);

  // resolve buggy methods against artifacts where the registry has them
  registry::RegistryClient client(cfg.registry_config());
  std::map<std::string, bytecode::JarModel> jars;
  std::map<std::string, const bytecode::JarModel*> jar_ptrs;
  for (const auto& r : db.records()) {
    for (const auto& [ver, methods] : r.buggy_methods) {
      (void)methods;
      LibraryVersionRef ref{r.library, VersionString{ver}};
      if (jars.count(ref.key())) continue;
      auto res = client.fetch_artifact(ref, sink);
      if (res.status != registry::FetchStatus::Ok) continue;
      auto load = bytecode::load_jar_file(res.handle.cache_path, sink);
      if (!load.ok) continue;
      jar_ptrs[ref.key()] = &jars.emplace(ref.key(), std::move(load.jar)).first->second;
    }
  }
  auto result = bugdb::validate(db, jar_ptrs, sink);
  std::cout << db.records().size() << " records, " << db.pair_count() << " bug-release pairs, "
            << result.methods_checked << " methods checked, " << result.unresolved
            << " unresolved\n";
  return finish(cfg, sink, kExitOk);
}

int cmd_risk(const std::string& project_dir, const std::string& lib_spec,
             const std::vector<std::string>& classes_dirs,
             const std::vector<std::string>& test_dirs, const CommonOpts& opts) {
  DiagnosticSink sink;
  auto cfg = resolve_config(opts, sink);
  fs::create_directories(cfg.out_dir);
  auto ref = parse_lib_version(lib_spec);
  if (!ref) {
    sink.error("bad-library-spec", lib_spec, "expected group:name:version");
    return finish(cfg, sink, kExitUsage);
  }
  if (cfg.bugdb_path.empty()) {
    sink.error("bugdb-missing", "", "risk analysis requires --bugdb");
    return finish(cfg, sink, kExitUsage);
  }
  auto db = bugdb::BugDatabase::load(cfg.bugdb_path, sink);

  registry::RegistryClient client(cfg.registry_config());
  ArtifactStore store(client, sink);
  auto artifact = store.get(*ref);
  if (!artifact) {
    sink.error("artifact-unavailable", ref->key(), "library version cannot be assessed");
    return finish(cfg, sink, kExitAnalysisError);
  }

  bytecode::ApiUniverse universe;
  universe.add_library(*artifact->jar, *ref, sink);
  std::string project_id = fs::path(project_dir).filename().string();
  auto classes = load_project_classes(project_dir, classes_dirs, test_dirs, sink);
  auto calls = extract_project_calls(project_id, classes, universe, sink);

  auto outcome = alert::risk_analysis(calls, *ref, db, store.lookup());
  if (!outcome.available) {
    sink.error("artifact-unavailable", ref->key(), "library version cannot be assessed");
    return finish(cfg, sink, kExitAnalysisError);
  }
  reporting::write_report((fs::path(cfg.out_dir) / "risk.json").string(), "risk",
                          reporting::to_json(outcome.report));
  const auto& r = outcome.report;
  std::cout << (r.safe() ? "safe" : "unsafe") << " " << r.library_version.key() << " NB "
            << r.nb.render() << " NA " << r.na.render() << " NC " << r.nc.render() << "\n";
  return finish(cfg, sink, r.safe() ? kExitOk : kExitUnsafe);
}

int cmd_effort(const std::string& project_dir, const std::string& lib_spec,
               const std::vector<std::string>& classes_dirs,
               const std::vector<std::string>& test_dirs, bool include_snapshots,
               const CommonOpts& opts) {
  DiagnosticSink sink;
  auto cfg = resolve_config(opts, sink);
  fs::create_directories(cfg.out_dir);
  auto ref = parse_lib_version(lib_spec);
  if (!ref) {
    sink.error("bad-library-spec", lib_spec, "expected group:name:version");
    return finish(cfg, sink, kExitUsage);
  }
  if (cfg.bugdb_path.empty()) {
    sink.error("bugdb-missing", "", "effort analysis requires --bugdb");
    return finish(cfg, sink, kExitUsage);
  }
  auto db = bugdb::BugDatabase::load(cfg.bugdb_path, sink);

  registry::RegistryClient client(cfg.registry_config());
  ArtifactStore store(client, sink);
  auto artifact = store.get(*ref);
  if (!artifact) {
    sink.error("artifact-unavailable", ref->key(), "current version cannot be loaded");
    return finish(cfg, sink, kExitAnalysisError);
  }
  auto releases = client.fetch_releases(ref->library, sink);
  if (releases.status != registry::FetchStatus::Ok) {
    sink.error("releases-unavailable", ref->library.key(), "release list cannot be fetched");
    return finish(cfg, sink, kExitAnalysisError);
  }

  bytecode::ApiUniverse universe;
  universe.add_library(*artifact->jar, *ref, sink);
  std::string project_id = fs::path(project_dir).filename().string();
  auto classes = load_project_classes(project_dir, classes_dirs, test_dirs, sink);
  auto calls = extract_project_calls(project_id, classes, universe, sink);

  alert::EffortOptions options;
  options.include_snapshots = include_snapshots;
  auto result =
      alert::effort_analysis(calls, *ref, db, releases.releases, store.lookup(), options, sink);
  reporting::write_report((fs::path(cfg.out_dir) / "effort.json").string(), "effort",
                          reporting::to_json(result));
  if (result.empty_candidate_set) {
    sink.error("empty-candidate-set", ref->key(), "no higher versions to suggest");
    return finish(cfg, sink, kExitAnalysisError);
  }
  std::cout << "SL " << result.sl << " of " << result.reports.size() << " candidates above "
            << ref->key() << "\n";
  return finish(cfg, sink, kExitOk);
}

int cmd_update_matters(const std::string& project_dir, const std::string& commit_id,
                       const std::string& jsonl, const std::vector<std::string>& classes_dirs,
                       const std::vector<std::string>& test_dirs, const CommonOpts& opts) {
  DiagnosticSink sink;
  auto cfg = resolve_config(opts, sink);
  fs::create_directories(cfg.out_dir);
  std::string project_id = fs::path(project_dir).filename().string();
  std::unique_ptr<history::CommitSource> source;
  if (!jsonl.empty()) source = std::make_unique<history::JsonlCommitSource>(jsonl);
  else source = std::make_unique<history::GitCommitSource>(project_dir);
  auto updates = history::mine_updates(*source, project_id, sink);

  std::vector<VersionUpdate> at_commit;
  for (const auto& u : updates)
    if (u.commit.id.rfind(commit_id, 0) == 0) at_commit.push_back(u);
  if (at_commit.empty()) {
    sink.error("commit-without-updates", commit_id, "no version updates at this commit");
    return finish(cfg, sink, kExitAnalysisError);
  }

  registry::RegistryClient client(cfg.registry_config());
  ArtifactStore store(client, sink);
  auto classes = load_project_classes(project_dir, classes_dirs, test_dirs, sink);

  json results = json::array();
  for (const auto& u : at_commit) {
    json entry = reporting::to_json(u);
    LibraryVersionRef from_ref{u.library, u.ver_from};
    auto from_artifact = store.get(from_ref);
    alert::UpdateVerdict verdict = alert::UpdateVerdict::Indeterminate;
    if (from_artifact) {
      bytecode::ApiUniverse universe;
      universe.add_library(*from_artifact->jar, from_ref, sink);
      auto calls = extract_project_calls(project_id, classes, universe, sink);
      verdict = alert::update_matters(calls, u, store.lookup());
    }
    entry["verdict"] = verdict == alert::UpdateVerdict::Matters ? "matters"
                       : verdict == alert::UpdateVerdict::DoesNotMatter ? "does_not_matter"
                                                                        : "indeterminate";
    results.push_back(entry);
  }
  reporting::write_report((fs::path(cfg.out_dir) / "update-matters.json").string(),
                          "update_matters", results);
  std::cout << results.size() << " updates checked at " << commit_id << "\n";
  return finish(cfg, sink, kExitOk);
}

int cmd_report(const std::string& results_dir, const CommonOpts& opts) {
  DiagnosticSink sink;
  auto cfg = resolve_config(opts, sink);
  fs::create_directories(cfg.out_dir);
  if (!fs::is_directory(results_dir)) {
    sink.error("io-error", results_dir, "results directory not found");
    return finish(cfg, sink, kExitAnalysisError);
  }

  std::vector<reporting::AlertRow> rows;
  std::map<std::string, alert::EffortResult> efforts;  // library_version -> effort
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(results_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());

  for (const auto& file : files) {
    auto doc = read_json_file(file);
    if (!doc || !doc->is_object() || !doc->contains("effort")) continue;
    const json& e = (*doc)["effort"];
    alert::EffortResult result;
    result.sl = e.value("sl", 0);
    for (const auto& c : e.value("candidates", json::array())) {
      alert::EffortReport r;
      r.candidate_version.raw = c.value("candidate", std::string());
      r.skipped = c.value("skipped", false);
      if (r.skipped)
        r.reason = c.value("reason", std::string()) == "still_buggy"
                       ? alert::SkipReason::StillBuggy
                       : alert::SkipReason::ArtifactUnavailable;
      r.nad = c.value("nad", 0);
      r.nac = c.value("nac", 0);
      r.ncd = c.value("ncd", 0);
      r.ncc = c.value("ncc", 0);
      result.reports.push_back(std::move(r));
    }
    efforts[fs::path(file).stem().string()] = std::move(result);
  }

  json combined = json::array();
  for (const auto& file : files) {
    auto doc = read_json_file(file);
    if (!doc || !doc->is_object() || !doc->contains("risk")) continue;
    const json& r = (*doc)["risk"];
    reporting::AlertRow row;
    row.project = r.value("project", std::string());
    row.library_version = r.value("library_version", std::string());
    row.risk.project_id = row.project;
    auto read_pair = [&r](const char* key) {
      alert::CountPair p;
      if (r.contains(key) && r[key].is_object()) {
        p.hit = r[key].value("hit", 0);
        p.total = r[key].value("total", 0);
      }
      return p;
    };
    row.risk.nb = read_pair("nb");
    row.risk.na = read_pair("na");
    row.risk.nc = read_pair("nc");
    // pair with the effort file for the same stem suffix when present
    std::string stem = fs::path(file).stem().string();
    auto effort_key = stem.rfind("risk", 0) == 0 ? "effort" + stem.substr(4) : stem;
    auto it = efforts.find(effort_key);
    if (it != efforts.end()) row.effort = it->second;
    combined.push_back(r);
    rows.push_back(std::move(row));
  }

  std::string table = reporting::render_alert_table(rows);
  std::ofstream txt((fs::path(cfg.out_dir) / "alert-table.txt").string(),
                    std::ios::binary | std::ios::trunc);
  txt << table;
  reporting::write_report((fs::path(cfg.out_dir) / "report.json").string(), "reports", combined);
  std::cout << table;
  return finish(cfg, sink, kExitOk);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dependency-health analyzer and bug-driven update alerting for JVM projects"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string project_dir, manifest_path, lib_spec, jsonl, commit_id, issues_file, tracker = "jira";
  std::string results_dir;
  std::vector<std::string> classes_dirs, test_dirs;
  bool include_snapshots = false;
  int rc = kExitOk;

  auto* extract = app.add_subcommand("extract-deps", "extract declared dependencies");
  extract->add_option("project-dir", project_dir, "project checkout")->required();
  add_common(extract, opts);
  extract->callback([&] { rc = cmd_extract_deps(project_dir, opts); });

  auto* mine = app.add_subcommand("mine-updates", "mine version updates from history");
  mine->add_option("project-dir", project_dir, "project checkout")->required();
  mine->add_option("--jsonl", jsonl, "pre-exported commit stream instead of git");
  add_common(mine, opts);
  mine->callback([&] { rc = cmd_mine_updates(project_dir, jsonl, opts); });

  auto* met = app.add_subcommand("metrics", "compute usage and update metrics over a corpus");
  met->add_option("corpus-manifest", manifest_path, "corpus manifest JSON")->required();
  add_common(met, opts);
  met->callback([&] { rc = cmd_metrics(manifest_path, opts); });

  auto* bug = app.add_subcommand("bugdb", "bug database maintenance");
  bug->require_subcommand(1);
  auto* ingest = bug->add_subcommand("ingest", "ingest severe bugs from an issue tracker export");
  ingest->add_option("--tracker", tracker, "issue tracker type (jira)");
  ingest->add_option("--issues", issues_file, "issue stream JSON file")->required();
  ingest->add_option("--library", lib_spec, "library coordinates group:name")->required();
  ingest->add_option("--bugdb", opts.bugdb, "bug database file");
  add_common(ingest, opts);
  ingest->callback([&] { rc = cmd_bugdb_ingest(issues_file, lib_spec, tracker, opts); });
  auto* validate = bug->add_subcommand("validate", "check bug database invariants");
  validate->add_option("--bugdb", opts.bugdb, "bug database file")->required();
  add_common(validate, opts);
  validate->callback([&] { rc = cmd_bugdb_validate(opts); });

  auto* risk = app.add_subcommand("risk", "bug risk analysis for a used library version");
  risk->add_option("project-dir", project_dir, "project checkout")->required();
  risk->add_option("--library", lib_spec, "library group:name:version")->required();
  risk->add_option("--bugdb", opts.bugdb, "bug database file")->required();
  risk->add_option("--classes", classes_dirs, "compiled main classes directory");
  risk->add_option("--test-classes", test_dirs, "compiled test classes directory");
  add_common(risk, opts);
  risk->callback([&] { rc = cmd_risk(project_dir, lib_spec, classes_dirs, test_dirs, opts); });

  auto* effort = app.add_subcommand("effort", "integration effort for bug-free higher versions");
  effort->add_option("project-dir", project_dir, "project checkout")->required();
  effort->add_option("--library", lib_spec, "library group:name:version")->required();
  effort->add_option("--bugdb", opts.bugdb, "bug database file")->required();
  effort->add_option("--classes", classes_dirs, "compiled main classes directory");
  effort->add_option("--test-classes", test_dirs, "compiled test classes directory");
  effort->add_flag("--include-snapshots", include_snapshots, "consider snapshot candidates");
  add_common(effort, opts);
  effort->callback([&] {
    rc = cmd_effort(project_dir, lib_spec, classes_dirs, test_dirs, include_snapshots, opts);
  });

  auto* matters = app.add_subcommand("update-matters", "check whether an observed update matters");
  matters->add_option("project-dir", project_dir, "project checkout")->required();
  matters->add_option("--commit", commit_id, "commit id (prefix) of the update")->required();
  matters->add_option("--jsonl", jsonl, "pre-exported commit stream instead of git");
  matters->add_option("--classes", classes_dirs, "compiled main classes directory");
  matters->add_option("--test-classes", test_dirs, "compiled test classes directory");
  add_common(matters, opts);
  matters->callback([&] {
    rc = cmd_update_matters(project_dir, commit_id, jsonl, classes_dirs, test_dirs, opts);
  });

  auto* report = app.add_subcommand("report", "combine risk/effort results into the alert table");
  report->add_option("results-dir", results_dir, "directory with risk/effort JSON files")
      ->required();
  add_common(report, opts);
  report->callback([&] { rc = cmd_report(results_dir, opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysisError;
  }
  return rc;
}
