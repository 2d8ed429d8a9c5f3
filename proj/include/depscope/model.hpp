#pragma once

#include <cstdint>
#include <string>
#include <tuple>

#include "depscope/version.hpp"

namespace depscope {

using version::VersionString;

// Library coordinates; equality is exact case-sensitive pair equality.
struct Library {
  std::string group;
  std::string name;

  bool operator==(const Library&) const = default;
  auto operator<=>(const Library&) const = default;
  std::string key() const { return group + ":" + name; }
};

struct LibraryVersionRef {
  Library library;
  version::VersionString version;

  bool operator==(const LibraryVersionRef&) const = default;
  auto operator<=>(const LibraryVersionRef&) const = default;
  std::string key() const { return library.key() + ":" + version.raw; }
};

struct CommitRef {
  std::string id;
  std::int64_t date = 0;  // UTC seconds

  bool operator==(const CommitRef&) const = default;
};

enum class SourceSet { Main, Test, Unknown };

inline const char* to_string(SourceSet s) {
  switch (s) {
    case SourceSet::Main: return "main";
    case SourceSet::Test: return "test";
    case SourceSet::Unknown: return "unknown";
  }
  return "unknown";
}

// The declared-dependency 4-tuple: project, config file, commit, library version.
struct LibraryDependency {
  std::string project_id;
  std::string config_file;  // path relative to project root
  CommitRef commit;
  LibraryVersionRef version_ref;
  SourceSet source_set = SourceSet::Unknown;
  bool optional_flag = false;

  bool operator==(const LibraryDependency&) const = default;
};

// A version-number change observed in a commit.
struct VersionUpdate {
  std::string project_id;
  std::string config_file;
  CommitRef commit;
  Library library;
  version::VersionString ver_from;
  version::VersionString ver_to;
  version::UpdateClass classification;
};

// A registry release: library version plus publication date.
struct VersionRelease {
  LibraryVersionRef version_ref;
  std::int64_t release_date = 0;  // UTC seconds
  bool snapshot_date_ambiguous = false;

  bool operator==(const VersionRelease&) const = default;
};

}  // namespace depscope
