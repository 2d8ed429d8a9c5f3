#include "depscope/registry.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "depscope/bytecode/zip.hpp"
#include "depscope/digest.hpp"
#include "depscope/xml.hpp"

namespace depscope::registry {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<long> g_network_attempts{0};

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == '/' || c == '\\') c = '_';
  return out;
}

std::optional<json> read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

struct UrlParts {
  bool ok = false;
  bool https = false;
  std::string host;  // host[:port]
  std::string path;  // leading component of the request path, no trailing '/'
};

UrlParts split_url(const std::string& url) {
  UrlParts p;
  std::string rest;
  if (url.rfind("http://", 0) == 0) rest = url.substr(7);
  else if (url.rfind("https://", 0) == 0) {
    p.https = true;
    rest = url.substr(8);
  } else {
    return p;
  }
  auto slash = rest.find('/');
  p.host = slash == std::string::npos ? rest : rest.substr(0, slash);
  p.path = slash == std::string::npos ? "" : rest.substr(slash);
  while (!p.path.empty() && p.path.back() == '/') p.path.pop_back();
  p.ok = !p.host.empty();
  return p;
}

std::string repo_dir_path(const UrlParts& base, const Library& lib) {
  std::string group_path = lib.group;
  for (char& c : group_path)
    if (c == '.') c = '/';
  return base.path + "/" + group_path + "/" + lib.name;
}

// "Wed, 21 Oct 2015 07:28:00 GMT" -> UTC seconds
std::int64_t parse_http_date(const std::string& s) {
  struct tm tm {};
  if (strptime(s.c_str(), "%a, %d %b %Y %H:%M:%S", &tm) == nullptr) return 0;
  return static_cast<std::int64_t>(timegm(&tm));
}

class HttpFetcher {
 public:
  HttpFetcher(const UrlParts& base, int max_retries) : base_(base), retries_(max_retries) {}

  // GET with exponential backoff; every attempt counts as a network attempt.
  std::optional<std::string> get(const std::string& path, std::string* last_modified = nullptr) {
    for (int attempt = 0; attempt <= retries_; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
      g_network_attempts.fetch_add(1);
      httplib::Client client(base_.host);
      client.set_follow_location(true);
      client.set_connection_timeout(10);
      client.set_read_timeout(30);
      auto res = client.Get(path);
      if (!res) continue;
      if (res->status == 404) return std::nullopt;
      if (res->status != 200) continue;
      if (last_modified && res->has_header("Last-Modified"))
        *last_modified = res->get_header_value("Last-Modified");
      return res->body;
    }
    return std::nullopt;
  }

 private:
  UrlParts base_;
  int retries_;
};

// Atomic cache update: read-modify-write of index.json via a temp file rename.
void merge_into_cache_index(const std::string& cache_root, const Library& lib,
                            const std::vector<VersionRelease>& releases, std::mutex& mutex) {
  std::lock_guard<std::mutex> lock(mutex);
  fs::create_directories(cache_root);
  std::string index_path = cache_root + "/index.json";
  json idx = read_json_file(index_path).value_or(json::object());
  json list = json::array();
  for (const auto& r : releases)
    list.push_back({{"version", r.version_ref.version.raw}, {"release_date", r.release_date}});
  idx[lib.key()] = list;
  idx["__meta__"][lib.key()] = {{"fetch_date", static_cast<std::int64_t>(::time(nullptr))}};
  std::string tmp = index_path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << idx.dump(2) << "\n";
  }
  fs::rename(tmp, index_path);
}

}  // namespace

std::string jar_file_name(const LibraryVersionRef& version) {
  return sanitize(version.library.group) + "__" + sanitize(version.library.name) + "__" +
         sanitize(version.version.raw) + ".jar";
}

RegistryClient::RegistryClient(ClientConfig config) : config_(std::move(config)) {}

long RegistryClient::network_attempts() { return g_network_attempts.load(); }
void RegistryClient::reset_network_attempts() { g_network_attempts.store(0); }

ReleasesResult RegistryClient::releases_from_index(const std::string& index_path,
                                                   const Library& library, bool stale,
                                                   DiagnosticSink& sink) {
  ReleasesResult res;
  auto idx = read_json_file(index_path);
  if (!idx) {
    res.status = FetchStatus::Unavailable;
    sink.warn("registry-index-missing", index_path, library.key());
    return res;
  }
  auto it = idx->find(library.key());
  if (it == idx->end()) {
    res.status = FetchStatus::NotFound;
    return res;
  }

  // one release per version; snapshots rebuilt several times keep the latest
  // published timestamp and carry an ambiguity flag
  std::map<std::string, VersionRelease> by_version;
  for (const auto& entry : *it) {
    if (!entry.contains("version") || !entry.contains("release_date")) continue;
    VersionRelease rel;
    rel.version_ref = {library, {entry["version"].get<std::string>()}};
    rel.release_date = entry["release_date"].get<std::int64_t>();
    auto [pos, inserted] = by_version.emplace(rel.version_ref.version.raw, rel);
    if (!inserted) {
      pos->second.release_date = std::max(pos->second.release_date, rel.release_date);
      pos->second.snapshot_date_ambiguous = true;
      sink.info("duplicate-release-timestamp", library.key(), rel.version_ref.version.raw);
    }
  }
  for (auto& [v, rel] : by_version) res.releases.push_back(std::move(rel));
  std::sort(res.releases.begin(), res.releases.end(),
            [](const VersionRelease& a, const VersionRelease& b) {
              return version::version_less(a.version_ref.version.raw, b.version_ref.version.raw);
            });
  res.status = FetchStatus::Ok;
  res.stale = stale;
  return res;
}

ReleasesResult RegistryClient::fetch_releases(const Library& library, DiagnosticSink& sink) {
  switch (config_.mode) {
    case Mode::Fixture:
      return releases_from_index(config_.fixture_dir + "/index.json", library, false, sink);
    case Mode::Offline:
      return releases_from_index(config_.cache_root + "/index.json", library, true, sink);
    case Mode::Network:
      break;
  }

  // Network mode: serve from cache when present, otherwise fetch the version
  // list from the repository metadata and persist it.
  {
    auto cached = releases_from_index(config_.cache_root + "/index.json", library, false, sink);
    if (cached.status == FetchStatus::Ok && !cached.releases.empty()) return cached;
  }

  ReleasesResult res;
  UrlParts base = split_url(config_.base_url);
  if (!base.ok || base.https) {
    sink.error("registry-url", config_.base_url,
               base.https ? "https endpoints are not supported by this build; use an http mirror"
                          : "malformed base url");
    res.status = FetchStatus::Unavailable;
    return res;
  }
  HttpFetcher http(base, config_.max_retries);
  std::string dir = repo_dir_path(base, library);
  auto metadata = http.get(dir + "/maven-metadata.xml");
  if (!metadata) {
    res.status = FetchStatus::Unavailable;
    sink.warn("registry-unreachable", library.key(), "metadata fetch failed");
    return res;
  }
  auto parsed = xml::parse(*metadata);
  if (!parsed.ok || parsed.root.name != "metadata") {
    res.status = FetchStatus::NotFound;
    return res;
  }
  std::vector<std::string> versions;
  if (const auto* versioning = parsed.root.child("versioning"))
    if (const auto* vs = versioning->child("versions"))
      for (const auto* v : vs->children_named("version")) versions.push_back(v->trimmed_text());
  for (const auto& v : versions) {
    VersionRelease rel;
    rel.version_ref = {library, {v}};
    std::string last_modified;
    // the artifact timestamp is the published release date
    std::string head_path = dir + "/" + v + "/" + library.name + "-" + v + ".pom";
    http.get(head_path, &last_modified);
    rel.release_date = parse_http_date(last_modified);
    res.releases.push_back(std::move(rel));
  }
  std::sort(res.releases.begin(), res.releases.end(),
            [](const VersionRelease& a, const VersionRelease& b) {
              return version::version_less(a.version_ref.version.raw, b.version_ref.version.raw);
            });
  res.releases.erase(std::unique(res.releases.begin(), res.releases.end(),
                                 [](const VersionRelease& a, const VersionRelease& b) {
                                   return version::version_equal(a.version_ref.version.raw,
                                                                 b.version_ref.version.raw);
                                 }),
                     res.releases.end());
  res.status = FetchStatus::Ok;
  merge_into_cache_index(config_.cache_root, library, res.releases, cache_write_mutex_);
  return res;
}

ArtifactResult RegistryClient::artifact_from_dir(const std::string& dir,
                                                 const LibraryVersionRef& version,
                                                 DiagnosticSink& sink) {
  ArtifactResult res;
  std::string path = dir + "/jars/" + jar_file_name(version);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    res.status = FetchStatus::Unavailable;
    bool snap = version::parse_version(version.version).is_snapshot;
    res.reason = snap ? UnavailableReason::SnapshotGone : UnavailableReason::Missing;
    sink.info("artifact-unavailable", version.key(), snap ? "snapshot gone" : "missing");
    return res;
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  auto zip = bytecode::read_zip(bytes);
  if (!zip.ok) {
    res.status = FetchStatus::Corrupt;
    sink.warn("artifact-corrupt", version.key(), zip.error);
    return res;
  }
  res.status = FetchStatus::Ok;
  res.handle.version_ref = version;
  res.handle.cache_path = path;
  res.handle.checksum = to_hex64(Digest64::of_bytes(bytes.data(), bytes.size()));
  return res;
}

ArtifactResult RegistryClient::fetch_artifact(const LibraryVersionRef& version,
                                              DiagnosticSink& sink) {
  switch (config_.mode) {
    case Mode::Fixture:
      return artifact_from_dir(config_.fixture_dir, version, sink);
    case Mode::Offline:
      return artifact_from_dir(config_.cache_root, version, sink);
    case Mode::Network:
      break;
  }
  {
    auto cached = artifact_from_dir(config_.cache_root, version, sink);
    if (cached.status == FetchStatus::Ok || cached.status == FetchStatus::Corrupt) return cached;
  }

  ArtifactResult res;
  UrlParts base = split_url(config_.base_url);
  if (!base.ok || base.https) {
    sink.error("registry-url", config_.base_url, "unsupported base url for artifact download");
    res.status = FetchStatus::Unavailable;
    res.reason = UnavailableReason::NetworkDown;
    return res;
  }
  HttpFetcher http(base, config_.max_retries);
  std::string dir = repo_dir_path(base, version.library);
  auto body = http.get(dir + "/" + version.version.raw + "/" + version.library.name + "-" +
                       version.version.raw + ".jar");
  if (!body) {
    res.status = FetchStatus::Unavailable;
    bool snap = version::parse_version(version.version).is_snapshot;
    res.reason = snap ? UnavailableReason::SnapshotGone : UnavailableReason::Missing;
    return res;
  }
  std::vector<std::uint8_t> bytes(body->begin(), body->end());
  auto zip = bytecode::read_zip(bytes);
  if (!zip.ok) {
    res.status = FetchStatus::Corrupt;
    sink.warn("artifact-corrupt", version.key(), zip.error);
    return res;
  }
  {
    std::lock_guard<std::mutex> lock(cache_write_mutex_);
    fs::create_directories(config_.cache_root + "/jars");
    std::string path = config_.cache_root + "/jars/" + jar_file_name(version);
    std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(body->data(), static_cast<long>(body->size()));
    }
    fs::rename(tmp, path);
    res.handle.cache_path = path;
  }
  res.status = FetchStatus::Ok;
  res.handle.version_ref = version;
  res.handle.checksum = to_hex64(Digest64::of_bytes(bytes.data(), bytes.size()));
  return res;
}

}  // namespace depscope::registry
