#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "depscope/bytecode/api.hpp"
#include "depscope/bytecode/classfile.hpp"
#include "depscope/diagnostics.hpp"
#include "depscope/model.hpp"

namespace depscope::bugdb {

enum class Priority { Major, Critical, Blocker };
enum class RecordSource { Jira, Local };

std::string to_string(Priority p);
std::optional<Priority> parse_priority(const std::string& s);

struct BugRecord {
  std::string issue_id;
  Priority priority = Priority::Major;
  Library library;
  std::vector<VersionString> affected_versions;
  // version raw string -> methods changed by the fixing patch
  std::map<std::string, std::set<bytecode::MethodId>> buggy_methods;
  RecordSource source = RecordSource::Local;

  bool affects(const VersionString& version) const;
};

struct BugReleasePair {
  const BugRecord* bug = nullptr;
  VersionRelease release;
};

class BugDatabase {
 public:
  BugDatabase() = default;

  static BugDatabase load(const std::string& path, DiagnosticSink& sink);
  void save(const std::string& path) const;

  // Returns false (with a diagnostic) for records violating the invariants;
  // valid records are appended, duplicates by (issue_id, library) replaced.
  bool add(BugRecord record, DiagnosticSink& sink);

  const std::vector<BugRecord>& records() const { return records_; }

  std::vector<const BugRecord*> bugs_affecting(const LibraryVersionRef& version) const;
  std::set<bytecode::MethodId> buggy_methods_in(const LibraryVersionRef& version) const;
  int potential_risk(const Library& library, const VersionRelease& release) const;
  long pair_count() const;  // total bug-release pairs across the db

 private:
  std::vector<BugRecord> records_;
};

// Filters a Jira-style issue stream down to severe fixed bugs: type Bug,
// priority Major/Critical/Blocker, status Closed, resolution Fixed, with a
// non-empty affected-versions list. Input is the JSON text of an issue array.
std::vector<BugRecord> ingest_jira(const std::string& issues_json, const Library& library,
                                   DiagnosticSink& sink);

struct MethodSpan {
  bytecode::MethodId method;
  int start_line = 0;  // inclusive
  int end_line = 0;    // inclusive
};
using ClassIndex = std::map<std::string, std::vector<MethodSpan>>;  // source path -> spans

std::set<bytecode::MethodId> buggy_methods_from_patch(const std::string& diff_text,
                                                      const ClassIndex& index,
                                                      DiagnosticSink& sink);

// Checks each buggy method descriptor against the version's parsed jar when
// one is supplied; unresolved descriptors are flagged, never fatal.
struct ValidationResult {
  long records_checked = 0;
  long methods_checked = 0;
  long unresolved = 0;
};
ValidationResult validate(const BugDatabase& db,
                          const std::map<std::string, const bytecode::JarModel*>& jars_by_version_key,
                          DiagnosticSink& sink);

}  // namespace depscope::bugdb
