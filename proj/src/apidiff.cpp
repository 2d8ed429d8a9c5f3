#include "depscope/bytecode/apidiff.hpp"

#include "depscope/digest.hpp"

namespace depscope::bytecode {

std::uint64_t api_change_digest(const VersionedJar& v, const ApiKey& key) {
  if (key.kind == ApiKind::Field) {
    const FieldModel* f = v.jar->find_field(key.member);
    if (!f) return 0;
    Digest64 dig;
    dig.update(f->descriptor);
    dig.update_u32(f->access);
    return dig.value();
  }
  auto res = closure_digest(*v.graph, key.member);
  return res.in_scope ? res.digest : 0;
}

ApiDiff diff_apis(const VersionedJar& old_version, const VersionedJar& new_version,
                  const std::set<ApiKey>& called) {
  ApiDiff diff;
  auto new_apis = extract_apis(*new_version.jar);
  for (const auto& key : called) {
    if (!new_apis.count(key)) {
      diff.deleted.insert(key);
      continue;
    }
    std::uint64_t before = api_change_digest(old_version, key);
    std::uint64_t after = api_change_digest(new_version, key);
    if (before != after) diff.changed.insert(key);
    else diff.unchanged.insert(key);
  }
  return diff;
}

}  // namespace depscope::bytecode
