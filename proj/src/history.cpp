#include "depscope/history.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "depscope/filetree.hpp"
#include "depscope/manifest.hpp"

namespace depscope::history {
namespace {

std::string run_command(const std::string& cmd, bool* ok) {
  std::array<char, 4096> buf;
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    *ok = false;
    return out;
  }
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  *ok = pclose(pipe) == 0;
  return out;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  out += "'";
  return out;
}

}  // namespace

std::vector<CommitManifests> GitCommitSource::walk(DiagnosticSink& sink) {
  std::vector<CommitManifests> out;
  bool ok = false;
  std::string q = shell_quote(repo_dir_);
  std::string log = run_command("git -C " + q + " log --first-parent --reverse --format='%H %ct' HEAD 2>/dev/null", &ok);
  if (!ok) {
    sink.error("git-error", repo_dir_, "git log failed (not a repository?)");
    return out;
  }
  std::istringstream lines(log);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream ls(line);
    CommitManifests cm;
    ls >> cm.commit.id >> cm.commit.date;
    if (cm.commit.id.empty()) continue;
    std::string tree = run_command(
        "git -C " + q + " ls-tree -r --name-only " + cm.commit.id + " 2>/dev/null", &ok);
    if (!ok) {
      sink.warn("git-error", cm.commit.id, "ls-tree failed; commit skipped");
      continue;
    }
    std::istringstream paths(tree);
    std::string path;
    while (std::getline(paths, path)) {
      if (!manifest::is_config_file(path)) continue;
      bool show_ok = false;
      std::string content = run_command(
          "git -C " + q + " show " + cm.commit.id + ":" + shell_quote(path) + " 2>/dev/null",
          &show_ok);
      if (show_ok) cm.config_files[path] = std::move(content);
    }
    out.push_back(std::move(cm));
  }
  return out;
}

std::vector<CommitManifests> JsonlCommitSource::walk(DiagnosticSink& sink) {
  std::vector<CommitManifests> out;
  std::ifstream in(path_);
  if (!in) {
    sink.error("io-error", path_, "cannot open commit stream");
    return out;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("commit_id") || !j.contains("date")) {
      sink.warn("jsonl-parse-error", path_ + ":" + std::to_string(lineno), "line skipped");
      continue;
    }
    std::string id = j["commit_id"].get<std::string>();
    if (out.empty() || out.back().commit.id != id) {
      CommitManifests cm;
      cm.commit.id = id;
      cm.commit.date = j["date"].get<std::int64_t>();
      out.push_back(std::move(cm));
    }
    if (j.contains("path"))
      out.back().config_files[j["path"].get<std::string>()] = j.value("content", std::string());
  }
  return out;
}

std::vector<VersionUpdate> mine_updates(const std::vector<CommitManifests>& stream,
                                        const std::string& project_id, DiagnosticSink& sink) {
  using DepKey = std::tuple<std::string, std::string, std::string>;  // file, group, name
  std::vector<VersionUpdate> out;
  std::map<std::string, std::string> prev_contents;
  std::map<DepKey, std::set<std::string>> prev_deps;
  bool have_prev = false;

  for (const auto& cm : stream) {
    if (have_prev && cm.config_files == prev_contents) continue;  // byte-identical manifests

    MemoryTree tree(cm.config_files);
    auto deps = manifest::extract_dependencies(tree, cm.commit, project_id, sink);
    std::map<DepKey, std::set<std::string>> cur_deps;
    for (const auto& d : deps)
      cur_deps[{d.config_file, d.version_ref.library.group, d.version_ref.library.name}].insert(
          d.version_ref.version.raw);

    if (have_prev) {
      for (const auto& [key, old_versions] : prev_deps) {
        auto it = cur_deps.find(key);
        if (it == cur_deps.end()) continue;  // removal or renamed file: no update
        const auto& new_versions = it->second;
        if (old_versions.size() != 1 || new_versions.size() != 1) {
          if (old_versions != new_versions)
            sink.info("multi-version-declaration", std::get<0>(key),
                      std::get<1>(key) + ":" + std::get<2>(key) +
                          " declared with several versions; change not counted as update");
          continue;
        }
        const std::string& v1 = *old_versions.begin();
        const std::string& v2 = *new_versions.begin();
        if (v1 == v2) continue;
        VersionUpdate u;
        u.project_id = project_id;
        u.config_file = std::get<0>(key);
        u.commit = cm.commit;
        u.library = {std::get<1>(key), std::get<2>(key)};
        u.ver_from = {v1};
        u.ver_to = {v2};
        u.classification = version::classify_update(u.ver_from, u.ver_to);
        out.push_back(std::move(u));
      }
    }
    prev_contents = cm.config_files;
    prev_deps = std::move(cur_deps);
    have_prev = true;
  }

  std::stable_sort(out.begin(), out.end(), [](const VersionUpdate& a, const VersionUpdate& b) {
    return std::tie(a.commit.date, a.config_file, a.library.group, a.library.name) <
           std::tie(b.commit.date, b.config_file, b.library.group, b.library.name);
  });
  return out;
}

std::vector<VersionUpdate> mine_updates(CommitSource& source, const std::string& project_id,
                                        DiagnosticSink& sink) {
  return mine_updates(source.walk(sink), project_id, sink);
}

}  // namespace depscope::history
