#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "depscope/diagnostics.hpp"
#include "depscope/model.hpp"

namespace depscope::history {

// One commit on the first-parent line with the full set of build manifests
// present in its tree.
struct CommitManifests {
  CommitRef commit;
  std::map<std::string, std::string> config_files;  // path -> content
};

// Source of the commit stream, ascending by commit date.
class CommitSource {
 public:
  virtual ~CommitSource() = default;
  virtual std::vector<CommitManifests> walk(DiagnosticSink& sink) = 0;
};

// Walks a local checkout by shelling out to git (first-parent, default HEAD).
class GitCommitSource final : public CommitSource {
 public:
  explicit GitCommitSource(std::string repo_dir) : repo_dir_(std::move(repo_dir)) {}
  std::vector<CommitManifests> walk(DiagnosticSink& sink) override;

 private:
  std::string repo_dir_;
};

// Reads a pre-exported JSON Lines stream; each line carries commit_id, date
// and optionally path + content. Adjacent lines with the same commit_id form
// one commit snapshot holding the complete manifest set at that commit.
class JsonlCommitSource final : public CommitSource {
 public:
  explicit JsonlCommitSource(std::string file_path) : path_(std::move(file_path)) {}
  std::vector<CommitManifests> walk(DiagnosticSink& sink) override;

 private:
  std::string path_;
};

// Diffs dependency sets of adjacent commits keyed by (file, group, name) and
// emits one VersionUpdate per changed version, classified via the version
// module. Output ordered by (commit_date, config_file, group, name).
std::vector<VersionUpdate> mine_updates(const std::vector<CommitManifests>& stream,
                                        const std::string& project_id, DiagnosticSink& sink);

std::vector<VersionUpdate> mine_updates(CommitSource& source, const std::string& project_id,
                                        DiagnosticSink& sink);

}  // namespace depscope::history
