#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "depscope/bugdb.hpp"
#include "depscope/bytecode/apidiff.hpp"
#include "depscope/diagnostics.hpp"
#include "depscope/model.hpp"

namespace depscope::alert {

// Rendered as "hit(total)", e.g. NB 1(18).
struct CountPair {
  int hit = 0;
  int total = 0;
  std::string render() const { return std::to_string(hit) + "(" + std::to_string(total) + ")"; }
  bool operator==(const CountPair&) const = default;
};

struct PerApiDetail {
  bytecode::ApiElement api;
  int reaching_bugs = 0;
  int sites_main = 0;
  int sites_test = 0;
  std::vector<std::string> bug_ids;  // sorted
  int sites_total() const { return sites_main + sites_test; }
};

struct RiskReport {
  std::string project_id;
  LibraryVersionRef library_version;
  CountPair nb;  // affecting bugs / severe bugs in version
  CountPair na;  // buggy called APIs / called APIs
  CountPair nc;  // call sites to buggy APIs / call sites to this library
  int nc_buggy_main = 0;
  int nc_buggy_test = 0;
  // buggy APIs first, sorted by descending call-site count then name
  std::vector<PerApiDetail> per_api;

  bool safe() const { return nb.hit == 0; }
};

enum class SkipReason { None, StillBuggy, ArtifactUnavailable };

struct EffortReport {
  VersionString candidate_version;
  bool skipped = false;
  SkipReason reason = SkipReason::None;
  int nad = 0;  // called APIs deleted
  int nac = 0;  // called APIs changed
  int ncd = 0;  // call sites over deleted APIs
  int ncc = 0;  // call sites over changed APIs
};

struct EffortResult {
  int sl = 0;  // suggested (non-skipped) candidate count
  std::vector<EffortReport> reports;  // ascending by candidate version
  bool empty_candidate_set = false;
};

// Calls a project makes into library APIs, as extracted at some commit.
struct ProjectCalls {
  std::string project_id;
  std::vector<bytecode::ApiCall> calls;
};

struct LibraryArtifact {
  const bytecode::JarModel* jar = nullptr;
  const bytecode::CallGraph* graph = nullptr;
};
// Empty optional means the artifact is unavailable.
using ArtifactLookup =
    std::function<std::optional<LibraryArtifact>(const LibraryVersionRef&)>;

struct RiskOutcome {
  bool available = false;  // false: artifact missing, report meaningless
  RiskReport report;
};

RiskOutcome risk_analysis(const ProjectCalls& project, const LibraryVersionRef& version,
                          const bugdb::BugDatabase& db, const ArtifactLookup& artifacts);

struct EffortOptions {
  bool include_snapshots = false;
};

EffortResult effort_analysis(const ProjectCalls& project, const LibraryVersionRef& current,
                             const bugdb::BugDatabase& db,
                             const std::vector<VersionRelease>& releases,
                             const ArtifactLookup& artifacts, const EffortOptions& options,
                             DiagnosticSink& sink);

enum class UpdateVerdict { Matters, DoesNotMatter, Indeterminate };

// True relevance check for an observed version update: does any API the
// project called in ver_from disappear or change its closure in ver_to?
UpdateVerdict update_matters(const ProjectCalls& project, const VersionUpdate& update,
                             const ArtifactLookup& artifacts);

}  // namespace depscope::alert
