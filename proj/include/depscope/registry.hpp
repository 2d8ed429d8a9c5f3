#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "depscope/diagnostics.hpp"
#include "depscope/model.hpp"

namespace depscope::registry {

enum class Mode { Network, Fixture, Offline };

struct ClientConfig {
  Mode mode = Mode::Fixture;
  std::string fixture_dir;                          // required in Fixture mode
  std::string cache_root;                           // required in Network/Offline mode
  std::string base_url = "http://repo1.maven.org/maven2";
  int max_retries = 3;
  int max_inflight = 4;
};

enum class FetchStatus { Ok, NotFound, Unavailable, Corrupt };
enum class UnavailableReason { None, SnapshotGone, Missing, NetworkDown };

struct ReleasesResult {
  FetchStatus status = FetchStatus::Unavailable;
  std::vector<VersionRelease> releases;  // strictly ascending, no duplicates
  bool stale = false;                    // served from cache with network disabled
};

struct ArtifactHandle {
  LibraryVersionRef version_ref;
  std::string cache_path;  // local path of the validated jar
  std::string checksum;    // content digest, hex
};

struct ArtifactResult {
  FetchStatus status = FetchStatus::Unavailable;
  UnavailableReason reason = UnavailableReason::None;
  ArtifactHandle handle;
};

// Release-metadata and artifact client with a fixture mode for hermetic runs.
// Fixture layout: <dir>/index.json mapping "group:name" to a list of
// {version, release_date}, and <dir>/jars/<group>__<name>__<version>.jar.
// The cache under cache_root mirrors that layout; writes go through an
// atomic rename so concurrent readers never observe partial files.
class RegistryClient {
 public:
  explicit RegistryClient(ClientConfig config);

  ReleasesResult fetch_releases(const Library& library, DiagnosticSink& sink);
  ArtifactResult fetch_artifact(const LibraryVersionRef& version, DiagnosticSink& sink);

  const ClientConfig& config() const { return config_; }

  // Process-wide count of network connection attempts; the offline test
  // harness asserts this stays at zero.
  static long network_attempts();
  static void reset_network_attempts();

 private:
  ReleasesResult releases_from_index(const std::string& index_path, const Library& library,
                                     bool stale, DiagnosticSink& sink);
  ArtifactResult artifact_from_dir(const std::string& dir, const LibraryVersionRef& version,
                                   DiagnosticSink& sink);

  ClientConfig config_;
  std::mutex cache_write_mutex_;
};

std::string jar_file_name(const LibraryVersionRef& version);

}  // namespace depscope::registry
