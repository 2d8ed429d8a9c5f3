#pragma once

#include "depscope/bytecode/callgraph.hpp"

namespace depscope::bytecode {

// Partition of a called API set against a newer jar: deleted members are
// absent by (owner, name, descriptor); changed members survive with a
// differing closure digest; the rest are unchanged.
struct ApiDiff {
  std::set<ApiKey> deleted;
  std::set<ApiKey> changed;
  std::set<ApiKey> unchanged;
};

struct VersionedJar {
  const JarModel* jar = nullptr;
  const CallGraph* graph = nullptr;
};

ApiDiff diff_apis(const VersionedJar& old_version, const VersionedJar& new_version,
                  const std::set<ApiKey>& called);

// Change fingerprint of one API in one jar: closure digest for methods,
// declared type + access flags for fields.
std::uint64_t api_change_digest(const VersionedJar& v, const ApiKey& key);

}  // namespace depscope::bytecode
