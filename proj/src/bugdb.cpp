#include "depscope/bugdb.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "depscope/version.hpp"

namespace depscope::bugdb {

using nlohmann::json;

std::string to_string(Priority p) {
  switch (p) {
    case Priority::Major: return "major";
    case Priority::Critical: return "critical";
    case Priority::Blocker: return "blocker";
  }
  return "major";
}

std::optional<Priority> parse_priority(const std::string& s) {
  std::string lower;
  lower.reserve(s.size());
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "major") return Priority::Major;
  if (lower == "critical") return Priority::Critical;
  if (lower == "blocker") return Priority::Blocker;
  return std::nullopt;
}

bool BugRecord::affects(const VersionString& version) const {
  for (const auto& v : affected_versions)
    if (version::version_equal(v, version)) return true;
  return false;
}

namespace {

json method_to_json(const bytecode::MethodId& m) {
  return json{{"owner", m.owner}, {"name", m.name}, {"descriptor", m.descriptor}};
}

std::optional<bytecode::MethodId> method_from_json(const json& j) {
  if (!j.is_object() || !j.contains("owner") || !j.contains("name") || !j.contains("descriptor"))
    return std::nullopt;
  return bytecode::MethodId{j["owner"].get<std::string>(), j["name"].get<std::string>(),
                            j["descriptor"].get<std::string>()};
}

bool record_valid(const BugRecord& r, std::string& why) {
  if (r.issue_id.empty()) {
    why = "missing issue id";
    return false;
  }
  if (r.affected_versions.empty()) {
    why = "empty affected_versions";
    return false;
  }
  for (const auto& [ver, methods] : r.buggy_methods) {
    (void)methods;
    bool found = false;
    for (const auto& v : r.affected_versions)
      if (v.raw == ver) found = true;
    if (!found) {
      why = "buggy_methods key " + ver + " not in affected_versions";
      return false;
    }
  }
  return true;
}

}  // namespace

BugDatabase BugDatabase::load(const std::string& path, DiagnosticSink& sink) {
  BugDatabase db;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    sink.error("bugdb-io-error", path, "cannot open bug database");
    return db;
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    sink.error("bugdb-parse-error", path, "bug database must be a JSON array");
    return db;
  }
  for (const auto& entry : doc) {
    if (!entry.is_object()) {
      sink.warn("bugdb-bad-record", path, "non-object entry skipped");
      continue;
    }
    BugRecord r;
    r.issue_id = entry.value("issue_id", std::string());
    auto pri = parse_priority(entry.value("priority", std::string()));
    if (!pri) {
      sink.warn("bugdb-bad-record", r.issue_id, "unknown priority, record skipped");
      continue;
    }
    r.priority = *pri;
    r.library.group = entry.value("group", std::string());
    r.library.name = entry.value("name", std::string());
    for (const auto& v : entry.value("affected_versions", json::array()))
      if (v.is_string()) r.affected_versions.push_back(VersionString{v.get<std::string>()});
    if (entry.contains("buggy_methods") && entry["buggy_methods"].is_object()) {
      for (const auto& [ver, arr] : entry["buggy_methods"].items()) {
        std::set<bytecode::MethodId> methods;
        for (const auto& mj : arr) {
          auto m = method_from_json(mj);
          if (m) methods.insert(*m);
          else sink.warn("bugdb-bad-method", r.issue_id, "malformed method descriptor skipped");
        }
        r.buggy_methods[ver] = std::move(methods);
      }
    }
    r.source = entry.value("source", std::string("local")) == "jira" ? RecordSource::Jira
                                                                     : RecordSource::Local;
    db.add(std::move(r), sink);
  }
  return db;
}

void BugDatabase::save(const std::string& path) const {
  json doc = json::array();
  for (const auto& r : records_) {
    json entry;
    entry["issue_id"] = r.issue_id;
    entry["priority"] = to_string(r.priority);
    entry["group"] = r.library.group;
    entry["name"] = r.library.name;
    json vers = json::array();
    for (const auto& v : r.affected_versions) vers.push_back(v.raw);
    entry["affected_versions"] = vers;
    json methods = json::object();
    for (const auto& [ver, set] : r.buggy_methods) {
      json arr = json::array();
      for (const auto& m : set) arr.push_back(method_to_json(m));
      methods[ver] = arr;
    }
    entry["buggy_methods"] = methods;
    entry["source"] = r.source == RecordSource::Jira ? "jira" : "local";
    doc.push_back(entry);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write bug database: " + path);
  out << doc.dump(2) << '\n';
}

bool BugDatabase::add(BugRecord record, DiagnosticSink& sink) {
  std::string why;
  if (!record_valid(record, why)) {
    sink.warn("bugdb-invalid-record", record.issue_id, why);
    return false;
  }
  for (auto& existing : records_) {
    if (existing.issue_id == record.issue_id && existing.library.key() == record.library.key()) {
      existing = std::move(record);
      return true;
    }
  }
  records_.push_back(std::move(record));
  return true;
}

std::vector<const BugRecord*> BugDatabase::bugs_affecting(const LibraryVersionRef& version) const {
  std::vector<const BugRecord*> out;
  for (const auto& r : records_) {
    if (r.library.key() != version.library.key()) continue;
    if (r.affects(version.version)) out.push_back(&r);
  }
  return out;
}

std::set<bytecode::MethodId> BugDatabase::buggy_methods_in(const LibraryVersionRef& version) const {
  std::set<bytecode::MethodId> out;
  for (const BugRecord* r : bugs_affecting(version)) {
    for (const auto& [ver, methods] : r->buggy_methods) {
      if (!version::version_equal(VersionString{ver}, version.version)) continue;
      out.insert(methods.begin(), methods.end());
    }
  }
  return out;
}

int BugDatabase::potential_risk(const Library& library, const VersionRelease& release) const {
  int count = 0;
  for (const auto& r : records_) {
    if (r.library.key() != library.key()) continue;
    if (r.affects(release.version_ref.version)) ++count;
  }
  return count;
}

long BugDatabase::pair_count() const {
  long n = 0;
  for (const auto& r : records_) n += static_cast<long>(r.affected_versions.size());
  return n;
}

std::vector<BugRecord> ingest_jira(const std::string& issues_json, const Library& library,
                                   DiagnosticSink& sink) {
  std::vector<BugRecord> out;
  json doc = json::parse(issues_json, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    sink.error("jira-parse-error", library.key(), "issue stream must be a JSON array");
    return out;
  }
  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  for (const auto& issue : doc) {
    if (!issue.is_object()) continue;
    const std::string id = issue.value("key", issue.value("issue_id", std::string()));
    if (lower(issue.value("type", std::string())) != "bug") continue;
    auto pri = parse_priority(issue.value("priority", std::string()));
    if (!pri) continue;
    if (lower(issue.value("status", std::string())) != "closed") continue;
    if (lower(issue.value("resolution", std::string())) != "fixed") continue;
    std::vector<VersionString> affected;
    const char* field = issue.contains("affected_versions") ? "affected_versions" : "affects";
    for (const auto& v : issue.value(field, json::array()))
      if (v.is_string()) affected.push_back(VersionString{v.get<std::string>()});
    if (affected.empty()) {
      sink.warn("jira-no-affected-versions", id, "severe bug without affected versions skipped");
      continue;
    }
    BugRecord r;
    r.issue_id = id;
    r.priority = *pri;
    r.library = library;
    r.affected_versions = std::move(affected);
    r.source = RecordSource::Jira;
    out.push_back(std::move(r));
  }
  return out;
}

std::set<bytecode::MethodId> buggy_methods_from_patch(const std::string& diff_text,
                                                      const ClassIndex& index,
                                                      DiagnosticSink& sink) {
  std::set<bytecode::MethodId> out;
  static const std::regex kHunk(R"(^@@ -\d+(?:,\d+)? \+(\d+)(?:,(\d+))? @@)");
  std::istringstream in(diff_text);
  std::string line;
  std::string current_file;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("+++ ", 0) == 0) {
      current_file = line.substr(4);
      if (current_file.rfind("b/", 0) == 0) current_file = current_file.substr(2);
      if (current_file == "/dev/null") current_file.clear();
      continue;
    }
    std::smatch m;
    if (!std::regex_search(line, m, kHunk)) continue;
    if (current_file.empty()) continue;
    auto it = index.find(current_file);
    if (it == index.end()) {
      sink.warn("patch-unindexed-file", current_file, "hunk skipped, file not in class index");
      continue;
    }
    int start = std::stoi(m[1].str());
    int len = m[2].matched ? std::stoi(m[2].str()) : 1;
    int end = len > 0 ? start + len - 1 : start;
    for (const auto& span : it->second) {
      if (span.start_line <= end && start <= span.end_line) out.insert(span.method);
    }
  }
  return out;
}

ValidationResult validate(const BugDatabase& db,
                          const std::map<std::string, const bytecode::JarModel*>& jars_by_version_key,
                          DiagnosticSink& sink) {
  ValidationResult res;
  for (const auto& r : db.records()) {
    ++res.records_checked;
    for (const auto& [ver, methods] : r.buggy_methods) {
      LibraryVersionRef ref{r.library, VersionString{ver}};
      auto jar_it = jars_by_version_key.find(ref.key());
      if (jar_it == jars_by_version_key.end()) continue;  // artifact not available
      const bytecode::JarModel* jar = jar_it->second;
      for (const auto& m : methods) {
        ++res.methods_checked;
        if (!jar->find_method(m)) {
          ++res.unresolved;
          sink.warn("bugdb-unresolved-method", r.issue_id,
                    m.display() + " not found in " + ref.key());
        }
      }
    }
  }
  return res;
}

}  // namespace depscope::bugdb
