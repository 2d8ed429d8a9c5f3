#include <doctest.h>

#include <filesystem>
#include <string>

#include <json.hpp>

#include "depscope/bugdb.hpp"
#include "support/classbuilder.hpp"
#include "support/fixtures.hpp"

using namespace depscope;
using namespace depscope::bugdb;
using bytecode::MethodId;
using testsupport::ClassBuilder;
namespace fs = std::filesystem;

namespace {

constexpr std::uint16_t kPublic = 0x0001;
constexpr std::uint8_t kReturn = 0xb1;

const Library kLib{"com.example", "corelib"};

BugRecord record(const std::string& id, Priority pri,
                 std::vector<std::string> versions,
                 std::map<std::string, std::set<MethodId>> buggy = {}) {
  BugRecord r;
  r.issue_id = id;
  r.priority = pri;
  r.library = kLib;
  for (auto& v : versions) r.affected_versions.push_back(VersionString{std::move(v)});
  r.buggy_methods = std::move(buggy);
  return r;
}

std::string jira_issue(const std::string& key, const std::string& type,
                       const std::string& priority, const std::string& status,
                       const std::string& resolution, std::vector<std::string> affects) {
  nlohmann::json j{{"key", key},       {"type", type},
                   {"priority", priority}, {"status", status},
                   {"resolution", resolution}};
  j["affects"] = affects;
  return j.dump();
}

}  // namespace

TEST_CASE("jira ingestion keeps only severe fixed bugs") {
  std::string issues = "[" +
      jira_issue("LIB-1", "Bug", "Critical", "Closed", "Fixed", {"1.0", "1.1"}) + "," +
      jira_issue("LIB-2", "Bug", "Blocker", "closed", "fixed", {"2.0"}) + "," +  // case folded
      jira_issue("LIB-3", "Improvement", "Critical", "Closed", "Fixed", {"1.0"}) + "," +
      jira_issue("LIB-4", "Bug", "Minor", "Closed", "Fixed", {"1.0"}) + "," +
      jira_issue("LIB-5", "Bug", "Critical", "Open", "Fixed", {"1.0"}) + "," +
      jira_issue("LIB-6", "Bug", "Critical", "Closed", "Won't Fix", {"1.0"}) + "," +
      jira_issue("LIB-7", "Bug", "Major", "Closed", "Fixed", {}) + "]";
  DiagnosticSink sink;
  auto records = ingest_jira(issues, kLib, sink);
  REQUIRE(records.size() == 2);
  CHECK(records[0].issue_id == "LIB-1");
  CHECK(records[0].priority == Priority::Critical);
  CHECK(records[0].affected_versions.size() == 2);
  CHECK(records[0].source == RecordSource::Jira);
  CHECK(records[1].issue_id == "LIB-2");
  CHECK(sink.count("jira-no-affected-versions") == 1);
}

TEST_CASE("record invariants are enforced on add") {
  BugDatabase db;
  DiagnosticSink sink;
  CHECK_FALSE(db.add(record("B-1", Priority::Major, {}), sink));
  CHECK(sink.count("bugdb-invalid-record") == 1);

  // buggy_methods keyed by a version outside the affected set
  auto bad = record("B-2", Priority::Major, {"1.0"},
                    {{"2.0", {MethodId{"a/B", "m", "()V"}}}});
  CHECK_FALSE(db.add(bad, sink));
  CHECK(db.records().empty());

  auto good = record("B-3", Priority::Major, {"1.0", "2.0"},
                     {{"2.0", {MethodId{"a/B", "m", "()V"}}}});
  CHECK(db.add(good, sink));
  CHECK(db.records().size() == 1);

  // duplicate (issue, library) replaces in place
  auto replacement = record("B-3", Priority::Blocker, {"1.0"});
  CHECK(db.add(replacement, sink));
  REQUIRE(db.records().size() == 1);
  CHECK(db.records()[0].priority == Priority::Blocker);
}

TEST_CASE("save and load round trip is lossless") {
  BugDatabase db;
  DiagnosticSink sink;
  db.add(record("B-1", Priority::Critical, {"1.0", "1.1"},
                {{"1.0", {MethodId{"lib/A", "f", "(I)V"}, MethodId{"lib/A", "g", "()V"}}}}),
         sink);
  db.add(record("B-2", Priority::Major, {"2.0"}), sink);

  fs::path tmp = fs::temp_directory_path() / "depscope-bugdb-test.json";
  db.save(tmp.string());
  auto loaded = BugDatabase::load(tmp.string(), sink);
  fs::remove(tmp);
  REQUIRE(loaded.records().size() == 2);
  CHECK(loaded.records()[0].issue_id == "B-1");
  CHECK(loaded.records()[0].priority == Priority::Critical);
  CHECK(loaded.records()[0].buggy_methods.at("1.0").size() == 2);
  CHECK(loaded.records()[1].affected_versions[0].raw == "2.0");
  CHECK(loaded.pair_count() == db.pair_count());

  // a second ingest of the same records is idempotent
  for (const auto& r : db.records()) loaded.add(r, sink);
  CHECK(loaded.records().size() == 2);
}

TEST_CASE("affecting-bug queries use version equivalence") {
  BugDatabase db;
  DiagnosticSink sink;
  db.add(record("B-1", Priority::Major, {"1.0"},
                {{"1.0", {MethodId{"lib/A", "f", "()V"}}}}),
         sink);
  db.add(record("B-2", Priority::Major, {"1.0", "2.0"}), sink);
  db.add(record("B-3", Priority::Major, {"2.0"}), sink);

  // "1" and "1.0" denote the same version
  LibraryVersionRef v1{kLib, {"1"}};
  auto bugs = db.bugs_affecting(v1);
  REQUIRE(bugs.size() == 2);
  CHECK(db.buggy_methods_in(v1).count(MethodId{"lib/A", "f", "()V"}) == 1);

  // another library with the same version is unaffected
  CHECK(db.bugs_affecting({{"other", "lib"}, {"1.0"}}).empty());
}

TEST_CASE("potential risk sums to the bug-release pair count") {
  BugDatabase db;
  DiagnosticSink sink;
  db.add(record("B-1", Priority::Major, {"1.0", "1.1", "2.0"}), sink);
  db.add(record("B-2", Priority::Critical, {"1.1"}), sink);
  db.add(record("B-3", Priority::Blocker, {"2.0", "2.1"}), sink);

  std::vector<std::string> all_versions{"1.0", "1.1", "2.0", "2.1", "3.0"};
  long sum = 0;
  for (const auto& v : all_versions) {
    VersionRelease rel{{kLib, {v}}, 0};
    sum += db.potential_risk(kLib, rel);
  }
  CHECK(db.pair_count() == 6);
  CHECK(sum == db.pair_count());
  CHECK(db.potential_risk(kLib, {{kLib, {"1.1"}}, 0}) == 2);
  CHECK(db.potential_risk(kLib, {{kLib, {"3.0"}}, 0}) == 0);
}

TEST_CASE("patch hunks map to the methods whose lines they touch") {
  ClassIndex index;
  index["src/main/java/lib/A.java"] = {
      {{"lib/A", "f", "()V"}, 10, 20},
      {{"lib/A", "g", "()V"}, 22, 40},
      {{"lib/A", "h", "()V"}, 42, 60},
  };

  SUBCASE("hunk inside one method") {
    std::string diff =
        "--- a/src/main/java/lib/A.java\n"
        "+++ b/src/main/java/lib/A.java\n"
        "@@ -12,3 +12,4 @@ class A {\n";
    DiagnosticSink sink;
    auto got = buggy_methods_from_patch(diff, index, sink);
    REQUIRE(got.size() == 1);
    CHECK(got.count({"lib/A", "f", "()V"}));
  }

  SUBCASE("hunk spanning a method boundary hits both") {
    std::string diff =
        "+++ b/src/main/java/lib/A.java\n"
        "@@ -18,8 +18,8 @@\n";
    DiagnosticSink sink;
    auto got = buggy_methods_from_patch(diff, index, sink);
    CHECK(got.size() == 2);
    CHECK(got.count({"lib/A", "f", "()V"}));
    CHECK(got.count({"lib/A", "g", "()V"}));
  }

  SUBCASE("single-line hunk without a length suffix") {
    std::string diff =
        "+++ b/src/main/java/lib/A.java\n"
        "@@ -42 +42 @@\n";
    DiagnosticSink sink;
    auto got = buggy_methods_from_patch(diff, index, sink);
    REQUIRE(got.size() == 1);
    CHECK(got.count({"lib/A", "h", "()V"}));
  }

  SUBCASE("import-only change outside every span hits nothing") {
    std::string diff =
        "+++ b/src/main/java/lib/A.java\n"
        "@@ -1,2 +1,3 @@\n";
    DiagnosticSink sink;
    CHECK(buggy_methods_from_patch(diff, index, sink).empty());
  }

  SUBCASE("unindexed file is a warning, not a match") {
    std::string diff =
        "+++ b/docs/README.md\n"
        "@@ -1,2 +1,3 @@\n";
    DiagnosticSink sink;
    CHECK(buggy_methods_from_patch(diff, index, sink).empty());
    CHECK(sink.count("patch-unindexed-file") == 1);
  }

  SUBCASE("file deletion hunks are ignored") {
    std::string diff =
        "--- a/src/main/java/lib/A.java\n"
        "+++ /dev/null\n"
        "@@ -12,3 +0,0 @@\n";
    DiagnosticSink sink;
    CHECK(buggy_methods_from_patch(diff, index, sink).empty());
  }

  SUBCASE("multi-file patch tracks the current file") {
    std::string diff =
        "+++ b/docs/README.md\n"
        "@@ -1 +1 @@\n"
        "+++ b/src/main/java/lib/A.java\n"
        "@@ -30,2 +30,2 @@\n";
    DiagnosticSink sink;
    auto got = buggy_methods_from_patch(diff, index, sink);
    REQUIRE(got.size() == 1);
    CHECK(got.count({"lib/A", "g", "()V"}));
  }
}

TEST_CASE("validation resolves buggy methods against parsed jars") {
  ClassBuilder cls("lib/A");
  cls.method(kPublic, "f", "()V").op(kReturn);
  auto lib = testsupport::build_lib({&cls}, "corelib-1.0");

  BugDatabase db;
  DiagnosticSink sink;
  db.add(record("B-1", Priority::Major, {"1.0"},
                {{"1.0",
                  {MethodId{"lib/A", "f", "()V"}, MethodId{"lib/A", "ghost", "()V"}}}}),
         sink);
  db.add(record("B-2", Priority::Major, {"9.9"},
                {{"9.9", {MethodId{"lib/A", "f", "()V"}}}}),
         sink);

  std::map<std::string, const bytecode::JarModel*> jars{
      {LibraryVersionRef{kLib, {"1.0"}}.key(), &lib->jar}};
  auto res = validate(db, jars, sink);
  CHECK(res.records_checked == 2);
  // the 9.9 artifact is absent, so only the two 1.0 methods are checked
  CHECK(res.methods_checked == 2);
  CHECK(res.unresolved == 1);
  CHECK(sink.count("bugdb-unresolved-method") == 1);
}
