#include <doctest.h>

#include <memory>
#include <string>

#include "depscope/alert.hpp"
#include "support/classbuilder.hpp"
#include "support/fixtures.hpp"

using namespace depscope;
using namespace depscope::alert;
using bytecode::MethodId;
using testsupport::ClassBuilder;
using testsupport::FixtureArtifacts;

namespace {

constexpr std::uint16_t kPublic = 0x0001;
constexpr std::uint16_t kStatic = 0x0008;
constexpr std::uint8_t kReturn = 0xb1;
constexpr std::uint8_t kNop = 0x00;

const Library kLib{"com.example", "corelib"};
const MethodId kGood{"corelib/Api", "good", "()V"};
const MethodId kBad{"corelib/Api", "bad", "()V"};
const MethodId kBuggy{"corelib/Impl", "buggy", "()V"};

// Library layout shared by the suites: Api.good is self-contained, Api.bad
// reaches Impl.buggy through a static call.
std::shared_ptr<testsupport::BuiltLib> build_corelib(const std::string& label,
                                                     bool delete_good = false,
                                                     bool change_buggy = false,
                                                     bool debug_info = false,
                                                     std::uint64_t seed = 0) {
  ClassBuilder api("corelib/Api");
  api.method(kPublic, "good", "()V").op(kReturn);
  api.method(kPublic, "bad", "()V").invoke_static(kBuggy).op(kReturn);
  if (delete_good) {
    ClassBuilder trimmed("corelib/Api");
    trimmed.method(kPublic, "bad", "()V").invoke_static(kBuggy).op(kReturn);
    api = std::move(trimmed);
  }
  ClassBuilder impl("corelib/Impl");
  auto& buggy = impl.method(kPublic | kStatic, "buggy", "()V");
  if (change_buggy) buggy.op(kNop);
  buggy.op(kReturn);
  if (debug_info) {
    api.source_file("Api.java").line_numbers(true);
    impl.source_file("Impl.java").line_numbers(true);
  }
  return testsupport::build_lib({&api, &impl}, label, seed);
}

struct Scenario {
  FixtureArtifacts artifacts;
  std::shared_ptr<testsupport::BuiltLib> v10;
  LibraryVersionRef ref10{kLib, {"1.0"}};
  bugdb::BugDatabase db;
  ProjectCalls calls;

  Scenario() {
    v10 = build_corelib("corelib-1.0");
    artifacts.put(ref10, v10);

    DiagnosticSink sink;
    bugdb::BugRecord bug;
    bug.issue_id = "CORE-1";
    bug.priority = bugdb::Priority::Critical;
    bug.library = kLib;
    bug.affected_versions = {VersionString{"1.0"}, VersionString{"1.1"}};
    bug.buggy_methods["1.0"] = {kBuggy};
    bug.buggy_methods["1.1"] = {kBuggy};
    REQUIRE(db.add(bug, sink));

    // main: good twice, bad three times; test: bad once
    ClassBuilder main_cls("app/Main");
    main_cls.method(kPublic, "m1", "()V")
        .invoke_virtual(kGood)
        .invoke_virtual(kGood)
        .invoke_virtual(kBad)
        .op(kReturn);
    main_cls.method(kPublic, "m2", "()V").invoke_virtual(kBad).invoke_virtual(kBad).op(kReturn);
    ClassBuilder test_cls("app/MainTest");
    test_cls.method(kPublic, "t1", "()V").invoke_virtual(kBad).op(kReturn);

    calls = testsupport::project_calls({&main_cls}, "app", *v10, ref10, SourceSet::Main);
    auto test_calls =
        testsupport::project_calls({&test_cls}, "app", *v10, ref10, SourceSet::Test);
    calls.calls.insert(calls.calls.end(), test_calls.calls.begin(), test_calls.calls.end());
  }

  VersionRelease release(const std::string& v) const { return {{kLib, {v}}, 0}; }
};

}  // namespace

TEST_CASE("risk analysis counts bugs, APIs and call sites") {
  Scenario s;
  auto outcome = risk_analysis(s.calls, s.ref10, s.db, s.artifacts.lookup());
  REQUIRE(outcome.available);
  const RiskReport& r = outcome.report;
  CHECK(r.nb == CountPair{1, 1});
  CHECK(r.na == CountPair{1, 2});
  CHECK(r.nc == CountPair{4, 6});
  CHECK(r.nc_buggy_main == 3);
  CHECK(r.nc_buggy_test == 1);
  CHECK(r.nb.render() == "1(1)");
  CHECK_FALSE(r.safe());

  // buggy APIs sort first
  REQUIRE(r.per_api.size() == 2);
  CHECK(r.per_api[0].api.key.member == kBad);
  CHECK(r.per_api[0].reaching_bugs == 1);
  CHECK(r.per_api[0].bug_ids == std::vector<std::string>{"CORE-1"});
  CHECK(r.per_api[1].api.key.member == kGood);
  CHECK(r.per_api[1].reaching_bugs == 0);
}

TEST_CASE("no calls into the buggy version is safe") {
  Scenario s;
  ProjectCalls none{"app", {}};
  auto outcome = risk_analysis(none, s.ref10, s.db, s.artifacts.lookup());
  REQUIRE(outcome.available);
  CHECK(outcome.report.nb == CountPair{0, 1});
  CHECK(outcome.report.na == CountPair{0, 0});
  CHECK(outcome.report.safe());
}

TEST_CASE("missing artifact makes the risk outcome unavailable") {
  Scenario s;
  CHECK_FALSE(risk_analysis(s.calls, {kLib, {"9.9"}}, s.db, s.artifacts.lookup()).available);
}

TEST_CASE("risk counters are monotone under added bug records") {
  Scenario s;
  auto before = risk_analysis(s.calls, s.ref10, s.db, s.artifacts.lookup()).report;

  DiagnosticSink sink;
  bugdb::BugRecord extra;
  extra.issue_id = "CORE-2";
  extra.library = kLib;
  extra.affected_versions = {VersionString{"1.0"}};
  extra.buggy_methods["1.0"] = {kGood};
  REQUIRE(s.db.add(extra, sink));

  auto after = risk_analysis(s.calls, s.ref10, s.db, s.artifacts.lookup()).report;
  CHECK(after.nb.hit >= before.nb.hit);
  CHECK(after.na.hit >= before.na.hit);
  CHECK(after.nc.hit >= before.nc.hit);
  CHECK(after.nb == CountPair{2, 2});
  CHECK(after.na == CountPair{2, 2});
  CHECK(after.nc == CountPair{6, 6});
}

TEST_CASE("effort analysis applies the skip rules and counts adaptations") {
  Scenario s;
  // 1.1 still carries the bug; 1.2 fixes it but deletes good and reworks the
  // buggy callee; 1.3 has no artifact; 2.0 is bug-free and byte-identical
  s.artifacts.put({kLib, {"1.1"}}, build_corelib("corelib-1.1"));
  s.artifacts.put({kLib, {"1.2"}},
                  build_corelib("corelib-1.2", /*delete_good=*/true, /*change_buggy=*/true));
  s.artifacts.put({kLib, {"2.0"}}, build_corelib("corelib-2.0"));

  std::vector<VersionRelease> releases{
      s.release("0.9"),          s.release("2.0"), s.release("1.1"),
      s.release("2.1-SNAPSHOT"), s.release("1.2"), s.release("1.3"),
  };
  DiagnosticSink sink;
  auto result =
      effort_analysis(s.calls, s.ref10, s.db, releases, s.artifacts.lookup(), {}, sink);

  CHECK_FALSE(result.empty_candidate_set);
  CHECK(result.sl == 2);
  REQUIRE(result.reports.size() == 4);
  CHECK(sink.count("effort-snapshot-excluded") == 1);

  // ascending by candidate version, older releases never considered
  CHECK(result.reports[0].candidate_version.raw == "1.1");
  CHECK(result.reports[0].skipped);
  CHECK(result.reports[0].reason == SkipReason::StillBuggy);

  CHECK(result.reports[1].candidate_version.raw == "1.2");
  CHECK_FALSE(result.reports[1].skipped);
  CHECK(result.reports[1].nad == 1);  // good deleted
  CHECK(result.reports[1].ncd == 2);
  CHECK(result.reports[1].nac == 1);  // bad's closure changed through Impl.buggy
  CHECK(result.reports[1].ncc == 4);

  CHECK(result.reports[2].candidate_version.raw == "1.3");
  CHECK(result.reports[2].skipped);
  CHECK(result.reports[2].reason == SkipReason::ArtifactUnavailable);
  CHECK(sink.count("effort-artifact-unavailable") == 1);

  CHECK(result.reports[3].candidate_version.raw == "2.0");
  CHECK_FALSE(result.reports[3].skipped);
  CHECK(result.reports[3].nad == 0);
  CHECK(result.reports[3].nac == 0);
  CHECK(result.reports[3].ncd == 0);
  CHECK(result.reports[3].ncc == 0);

  // SL equals the number of non-skipped reports
  int non_skipped = 0;
  for (const auto& r : result.reports)
    if (!r.skipped) ++non_skipped;
  CHECK(result.sl == non_skipped);
}

TEST_CASE("effort with no newer release reports an empty candidate set") {
  Scenario s;
  DiagnosticSink sink;
  auto result = effort_analysis(s.calls, s.ref10, s.db, {s.release("0.9"), s.release("1.0")},
                                s.artifacts.lookup(), {}, sink);
  CHECK(result.empty_candidate_set);
  CHECK(result.sl == 0);
  CHECK(result.reports.empty());
}

TEST_CASE("snapshot candidates join in only on request") {
  Scenario s;
  s.artifacts.put({kLib, {"2.1-SNAPSHOT"}}, build_corelib("corelib-2.1-SNAPSHOT"));
  DiagnosticSink sink;
  EffortOptions opts;
  opts.include_snapshots = true;
  auto result = effort_analysis(s.calls, s.ref10, s.db, {s.release("2.1-SNAPSHOT")},
                                s.artifacts.lookup(), opts, sink);
  CHECK_FALSE(result.empty_candidate_set);
  REQUIRE(result.reports.size() == 1);
  CHECK(result.reports[0].candidate_version.raw == "2.1-SNAPSHOT");
  CHECK(result.sl == 1);
}

TEST_CASE("update relevance verdicts") {
  Scenario s;
  s.artifacts.put({kLib, {"2.0"}}, build_corelib("corelib-2.0"));
  s.artifacts.put({kLib, {"2.1"}},
                  build_corelib("corelib-2.1", false, /*change_buggy=*/true));
  s.artifacts.put({kLib, {"2.2"}},
                  build_corelib("corelib-2.2", false, false, /*debug_info=*/true,
                                /*seed=*/1234));
  s.artifacts.put({kLib, {"3.0"}}, build_corelib("corelib-3.0", /*delete_good=*/true));
  s.artifacts.put({kLib, {"0.9"}}, build_corelib("corelib-0.9"));

  auto update_to = [&](const std::string& from, const std::string& to) {
    VersionUpdate u;
    u.project_id = "app";
    u.library = kLib;
    u.ver_from = {from};
    u.ver_to = {to};
    return u;
  };
  auto lookup = s.artifacts.lookup();

  // byte-identical rebuild
  CHECK(update_matters(s.calls, update_to("1.0", "2.0"), lookup) ==
        UpdateVerdict::DoesNotMatter);
  // only a transitive callee of a called API changed
  CHECK(update_matters(s.calls, update_to("1.0", "2.1"), lookup) == UpdateVerdict::Matters);
  // recompile with debug info and a permuted constant pool
  CHECK(update_matters(s.calls, update_to("1.0", "2.2"), lookup) ==
        UpdateVerdict::DoesNotMatter);
  // a called API disappeared
  CHECK(update_matters(s.calls, update_to("1.0", "3.0"), lookup) == UpdateVerdict::Matters);
  // the project never called into the old version
  CHECK(update_matters(s.calls, update_to("0.9", "2.0"), lookup) ==
        UpdateVerdict::DoesNotMatter);
  // either artifact missing: no verdict
  CHECK(update_matters(s.calls, update_to("1.0", "9.9"), lookup) ==
        UpdateVerdict::Indeterminate);
  CHECK(update_matters(s.calls, update_to("9.8", "2.0"), lookup) ==
        UpdateVerdict::Indeterminate);
}
