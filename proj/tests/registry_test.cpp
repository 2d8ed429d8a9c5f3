#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "depscope/bytecode/api.hpp"
#include "depscope/registry.hpp"
#include "support/classbuilder.hpp"
#include "support/oracle.hpp"

using namespace depscope;
using namespace depscope::registry;
using testsupport::ClassBuilder;
namespace fs = std::filesystem;

namespace {

constexpr std::uint16_t kPublic = 0x0001;
constexpr std::uint8_t kReturn = 0xb1;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
}

std::string sample_index() {
  nlohmann::json idx;
  idx["junit:junit"] = {
      {{"version", "4.12"}, {"release_date", 1417737600}},
      {{"version", "4.11"}, {"release_date", 1353196800}},
      {{"version", "4.13-SNAPSHOT"}, {"release_date", 1500000000}},
      {{"version", "4.13-SNAPSHOT"}, {"release_date", 1500100000}},
  };
  return idx.dump(2);
}

std::vector<std::uint8_t> tiny_jar() {
  ClassBuilder cb("lib/A");
  cb.method(kPublic, "f", "()V").op(kReturn);
  return testsupport::jar_bytes({&cb});
}

}  // namespace

TEST_CASE("fixture releases are ascending and deduplicated") {
  TempDir dir("depscope-registry-fix1");
  write_file(dir.path / "index.json", sample_index());
  RegistryClient client({Mode::Fixture, dir.str(), ""});
  DiagnosticSink sink;
  auto res = client.fetch_releases({"junit", "junit"}, sink);
  REQUIRE(res.status == FetchStatus::Ok);
  CHECK_FALSE(res.stale);
  REQUIRE(res.releases.size() == 3);
  CHECK(res.releases[0].version_ref.version.raw == "4.11");
  CHECK(res.releases[1].version_ref.version.raw == "4.12");
  CHECK(res.releases[2].version_ref.version.raw == "4.13-SNAPSHOT");
  // rebuilt snapshot keeps the latest timestamp and carries the ambiguity flag
  CHECK(res.releases[2].release_date == 1500100000);
  CHECK(res.releases[2].snapshot_date_ambiguous);
  CHECK(sink.count("duplicate-release-timestamp") == 1);
  CHECK_FALSE(res.releases[0].snapshot_date_ambiguous);
}

TEST_CASE("unknown library and missing index") {
  TempDir dir("depscope-registry-fix2");
  write_file(dir.path / "index.json", sample_index());
  RegistryClient client({Mode::Fixture, dir.str(), ""});
  DiagnosticSink sink;
  CHECK(client.fetch_releases({"nope", "nope"}, sink).status == FetchStatus::NotFound);

  RegistryClient empty({Mode::Fixture, dir.str() + "/absent", ""});
  CHECK(empty.fetch_releases({"junit", "junit"}, sink).status == FetchStatus::Unavailable);
  CHECK(sink.count("registry-index-missing") == 1);
}

TEST_CASE("fixture artifact round trip") {
  TempDir dir("depscope-registry-fix3");
  LibraryVersionRef ref{{"com.example", "lib"}, {"1.0"}};
  CHECK(jar_file_name(ref) == "com.example__lib__1.0.jar");
  write_bytes(dir.path / "jars" / jar_file_name(ref), tiny_jar());
  RegistryClient client({Mode::Fixture, dir.str(), ""});
  DiagnosticSink sink;
  auto res = client.fetch_artifact(ref, sink);
  REQUIRE(res.status == FetchStatus::Ok);
  CHECK(res.handle.version_ref == ref);
  CHECK_FALSE(res.handle.checksum.empty());
  // the cached path parses through the production jar loader
  auto load = bytecode::load_jar_file(res.handle.cache_path, sink);
  REQUIRE(load.ok);
  CHECK(load.jar.find_class("lib/A") != nullptr);
}

TEST_CASE("unavailable artifacts distinguish snapshots from releases") {
  TempDir dir("depscope-registry-fix4");
  fs::create_directories(dir.path / "jars");
  RegistryClient client({Mode::Fixture, dir.str(), ""});
  DiagnosticSink sink;
  auto rel = client.fetch_artifact({{"g", "n"}, {"1.0"}}, sink);
  CHECK(rel.status == FetchStatus::Unavailable);
  CHECK(rel.reason == UnavailableReason::Missing);
  auto snap = client.fetch_artifact({{"g", "n"}, {"1.0-SNAPSHOT"}}, sink);
  CHECK(snap.status == FetchStatus::Unavailable);
  CHECK(snap.reason == UnavailableReason::SnapshotGone);
  CHECK(sink.count("artifact-unavailable") == 2);
}

TEST_CASE("corrupt jar is reported as corrupt") {
  TempDir dir("depscope-registry-fix5");
  LibraryVersionRef ref{{"g", "n"}, {"1.0"}};
  write_file(dir.path / "jars" / jar_file_name(ref), "this is not a zip archive");
  RegistryClient client({Mode::Fixture, dir.str(), ""});
  DiagnosticSink sink;
  CHECK(client.fetch_artifact(ref, sink).status == FetchStatus::Corrupt);
  CHECK(sink.count("artifact-corrupt") == 1);
}

TEST_CASE("offline mode serves the cache and marks it stale") {
  TempDir dir("depscope-registry-off1");
  write_file(dir.path / "index.json", sample_index());
  LibraryVersionRef ref{{"com.example", "lib"}, {"1.0"}};
  write_bytes(dir.path / "jars" / jar_file_name(ref), tiny_jar());
  RegistryClient client({Mode::Offline, "", dir.str()});
  DiagnosticSink sink;
  auto res = client.fetch_releases({"junit", "junit"}, sink);
  REQUIRE(res.status == FetchStatus::Ok);
  CHECK(res.stale);
  CHECK(res.releases.size() == 3);
  CHECK(client.fetch_artifact(ref, sink).status == FetchStatus::Ok);
}

TEST_CASE("fixture and offline modes never touch the network") {
  RegistryClient::reset_network_attempts();
  TempDir dir("depscope-registry-net0");
  write_file(dir.path / "index.json", sample_index());
  DiagnosticSink sink;
  RegistryClient fixture({Mode::Fixture, dir.str(), ""});
  RegistryClient offline({Mode::Offline, "", dir.str()});
  for (int i = 0; i < 5; ++i) {
    fixture.fetch_releases({"junit", "junit"}, sink);
    fixture.fetch_artifact({{"g", "n"}, {"1.0"}}, sink);
    offline.fetch_releases({"junit", "junit"}, sink);
    offline.fetch_artifact({{"g", "n"}, {"1.0"}}, sink);
  }
  CHECK(RegistryClient::network_attempts() == 0);
}
