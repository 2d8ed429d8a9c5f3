#include "depscope/alert.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "depscope/bytecode/callgraph.hpp"
#include "depscope/version.hpp"

namespace depscope::alert {

namespace {

struct CalledApi {
  bytecode::ApiElement api;
  int sites_main = 0;
  int sites_test = 0;
  int sites() const { return sites_main + sites_test; }
};

// Aggregates the project's calls into this library version by callee API.
std::map<bytecode::ApiKey, CalledApi> collect_called(const ProjectCalls& project,
                                                     const LibraryVersionRef& version) {
  std::map<bytecode::ApiKey, CalledApi> out;
  for (const auto& call : project.calls) {
    if (call.callee.version_ref.key() != version.key()) continue;
    auto& entry = out[call.callee.key];
    entry.api = call.callee;
    if (call.caller.source_set == SourceSet::Test) entry.sites_test += call.site_count;
    else entry.sites_main += call.site_count;
  }
  return out;
}

// Methods this API can execute: its CHA closure when the graph knows it,
// otherwise just the member itself.
std::set<bytecode::MethodId> api_closure(const bytecode::CallGraph& graph,
                                         const bytecode::ApiKey& key) {
  if (key.kind == bytecode::ApiKind::Field) return {};
  if (graph.has_node(key.member)) return bytecode::reachable_from(graph, key.member);
  return {key.member};
}

}  // namespace

RiskOutcome risk_analysis(const ProjectCalls& project, const LibraryVersionRef& version,
                          const bugdb::BugDatabase& db, const ArtifactLookup& artifacts) {
  RiskOutcome outcome;
  auto artifact = artifacts(version);
  if (!artifact.has_value()) return outcome;
  outcome.available = true;

  RiskReport& report = outcome.report;
  report.project_id = project.project_id;
  report.library_version = version;

  auto bugs = db.bugs_affecting(version);
  report.nb.total = static_cast<int>(bugs.size());

  // buggy method -> ids of bugs whose fixing patch touched it
  std::map<bytecode::MethodId, std::set<std::string>> bug_by_method;
  for (const bugdb::BugRecord* bug : bugs) {
    for (const auto& [ver, methods] : bug->buggy_methods) {
      if (!version::version_equal(VersionString{ver}, version.version)) continue;
      for (const auto& m : methods) bug_by_method[m].insert(bug->issue_id);
    }
  }

  auto called = collect_called(project, version);
  report.na.total = static_cast<int>(called.size());

  std::set<std::string> affecting_bugs;
  for (const auto& [key, info] : called) {
    report.nc.total += info.sites();
    std::set<std::string> reached_bugs;
    for (const auto& m : api_closure(*artifact->graph, key)) {
      auto it = bug_by_method.find(m);
      if (it != bug_by_method.end()) reached_bugs.insert(it->second.begin(), it->second.end());
    }
    PerApiDetail detail;
    detail.api = info.api;
    detail.reaching_bugs = static_cast<int>(reached_bugs.size());
    detail.sites_main = info.sites_main;
    detail.sites_test = info.sites_test;
    detail.bug_ids.assign(reached_bugs.begin(), reached_bugs.end());
    if (!reached_bugs.empty()) {
      ++report.na.hit;
      report.nc.hit += info.sites();
      report.nc_buggy_main += info.sites_main;
      report.nc_buggy_test += info.sites_test;
      affecting_bugs.insert(reached_bugs.begin(), reached_bugs.end());
    }
    report.per_api.push_back(std::move(detail));
  }
  report.nb.hit = static_cast<int>(affecting_bugs.size());

  std::sort(report.per_api.begin(), report.per_api.end(),
            [](const PerApiDetail& a, const PerApiDetail& b) {
              bool a_buggy = a.reaching_bugs > 0;
              bool b_buggy = b.reaching_bugs > 0;
              if (a_buggy != b_buggy) return a_buggy;
              if (a.sites_total() != b.sites_total()) return a.sites_total() > b.sites_total();
              return a.api.key.display() < b.api.key.display();
            });
  return outcome;
}

EffortResult effort_analysis(const ProjectCalls& project, const LibraryVersionRef& current,
                             const bugdb::BugDatabase& db,
                             const std::vector<VersionRelease>& releases,
                             const ArtifactLookup& artifacts, const EffortOptions& options,
                             DiagnosticSink& sink) {
  EffortResult result;

  std::vector<VersionRelease> candidates;
  for (const auto& r : releases) {
    if (!version::version_less(current.version, r.version_ref.version)) continue;
    if (!options.include_snapshots && version::parse_version(r.version_ref.version).is_snapshot) {
      sink.info("effort-snapshot-excluded", r.version_ref.key(), "snapshot candidate skipped");
      continue;
    }
    candidates.push_back(r);
  }
  std::sort(candidates.begin(), candidates.end(), [](const VersionRelease& a,
                                                     const VersionRelease& b) {
    return version::version_less(a.version_ref.version, b.version_ref.version);
  });
  if (candidates.empty()) {
    result.empty_candidate_set = true;
    return result;
  }

  auto current_artifact = artifacts(current);
  auto called = collect_called(project, current);

  for (const auto& cand : candidates) {
    EffortReport report;
    report.candidate_version = cand.version_ref.version;

    auto cand_artifact = artifacts(cand.version_ref);
    if (!cand_artifact.has_value() || !current_artifact.has_value()) {
      report.skipped = true;
      report.reason = SkipReason::ArtifactUnavailable;
      sink.warn("effort-artifact-unavailable", cand.version_ref.key(),
                "candidate cannot be assessed");
      result.reports.push_back(std::move(report));
      continue;
    }

    auto candidate_apis = bytecode::extract_apis(*cand_artifact->jar);
    auto buggy = db.buggy_methods_in(cand.version_ref);

    bool still_buggy = false;
    if (!buggy.empty()) {
      for (const auto& [key, info] : called) {
        (void)info;
        if (!candidate_apis.count(key)) continue;  // deleted APIs cannot reach anything
        for (const auto& m : api_closure(*cand_artifact->graph, key)) {
          if (buggy.count(m)) {
            still_buggy = true;
            break;
          }
        }
        if (still_buggy) break;
      }
    }
    if (still_buggy) {
      report.skipped = true;
      report.reason = SkipReason::StillBuggy;
      result.reports.push_back(std::move(report));
      continue;
    }

    std::set<bytecode::ApiKey> called_keys;
    for (const auto& [key, info] : called) {
      (void)info;
      called_keys.insert(key);
    }
    bytecode::VersionedJar old_v{current_artifact->jar, current_artifact->graph};
    bytecode::VersionedJar new_v{cand_artifact->jar, cand_artifact->graph};
    auto diff = bytecode::diff_apis(old_v, new_v, called_keys);
    report.nad = static_cast<int>(diff.deleted.size());
    report.nac = static_cast<int>(diff.changed.size());
    for (const auto& key : diff.deleted) report.ncd += called.at(key).sites();
    for (const auto& key : diff.changed) report.ncc += called.at(key).sites();
    ++result.sl;
    result.reports.push_back(std::move(report));
  }
  return result;
}

UpdateVerdict update_matters(const ProjectCalls& project, const VersionUpdate& update,
                             const ArtifactLookup& artifacts) {
  LibraryVersionRef from_ref{update.library, update.ver_from};
  LibraryVersionRef to_ref{update.library, update.ver_to};
  auto from_artifact = artifacts(from_ref);
  auto to_artifact = artifacts(to_ref);
  if (!from_artifact.has_value() || !to_artifact.has_value())
    return UpdateVerdict::Indeterminate;

  auto called = collect_called(project, from_ref);
  std::set<bytecode::ApiKey> called_keys;
  for (const auto& [key, info] : called) {
    (void)info;
    called_keys.insert(key);
  }
  if (called_keys.empty()) return UpdateVerdict::DoesNotMatter;

  bytecode::VersionedJar old_v{from_artifact->jar, from_artifact->graph};
  bytecode::VersionedJar new_v{to_artifact->jar, to_artifact->graph};
  auto diff = bytecode::diff_apis(old_v, new_v, called_keys);
  if (!diff.deleted.empty() || !diff.changed.empty()) return UpdateVerdict::Matters;
  return UpdateVerdict::DoesNotMatter;
}

}  // namespace depscope::alert
