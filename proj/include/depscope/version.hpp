#pragma once

#include <string>
#include <vector>

namespace depscope::version {

// Raw version string as declared in a manifest or registry index. Never
// normalized; all derived views are computed on demand.
struct VersionString {
  std::string raw;

  bool operator==(const VersionString&) const = default;
  auto operator<=>(const VersionString&) const = default;  // raw-string order, not version order
};

enum class SemverShape { XY, XYZ, Other };

// Flat token view of a version string, used for update classification and
// snapshot detection. Ordering does not go through this type; see
// compare_versions, which implements the Maven comparator on the raw string.
struct ParsedVersion {
  std::string raw;
  std::vector<long long> numeric_parts;       // leading integer tokens
  std::vector<std::string> qualifier_parts;   // lowercase tokens after the first non-integer
  bool is_snapshot = false;
  SemverShape semver_shape = SemverShape::Other;
};

enum class Ordering { Less, Equal, Greater };

enum class UpdateDirection { Upgrade, Downgrade, Unknown };
enum class UpdateMagnitude { Major, Minor, Patch, ToSnapshot, FromSnapshot, Unknown };

struct UpdateClass {
  UpdateDirection direction = UpdateDirection::Unknown;
  UpdateMagnitude magnitude = UpdateMagnitude::Unknown;

  bool operator==(const UpdateClass&) const = default;
};

// Tokenizes on '.', '-', '_' and letter/digit boundaries. Every string
// parses; fully non-numeric input yields empty numeric_parts and shape Other.
ParsedVersion parse_version(const VersionString& raw);

// Total order following Maven's ComparableVersion algorithm (case-insensitive
// tokens, qualifier ranking alpha < beta < milestone < rc < snapshot <
// release < sp < lexicographic unknowns, trailing null-value trimming).
Ordering compare_versions(const std::string& a, const std::string& b);
inline Ordering compare_versions(const VersionString& a, const VersionString& b) {
  return compare_versions(a.raw, b.raw);
}
inline Ordering compare_versions(const ParsedVersion& a, const ParsedVersion& b) {
  return compare_versions(a.raw, b.raw);
}

inline bool version_less(const std::string& a, const std::string& b) {
  return compare_versions(a, b) == Ordering::Less;
}
inline bool version_equal(const std::string& a, const std::string& b) {
  return compare_versions(a, b) == Ordering::Equal;
}
inline bool version_less(const VersionString& a, const VersionString& b) {
  return version_less(a.raw, b.raw);
}
inline bool version_equal(const VersionString& a, const VersionString& b) {
  return version_equal(a.raw, b.raw);
}

// Direction by the comparator; magnitude by the first differing X/Y/Z
// position (X.Y treated as X.Y.0 here only). Direction is Unknown when the
// numeric parts tie but the qualifiers differ outside the recognized
// qualifier set, and for identical versions.
UpdateClass classify_update(const VersionString& from, const VersionString& to);

const char* to_string(UpdateDirection d);
const char* to_string(UpdateMagnitude m);
const char* to_string(SemverShape s);

}  // namespace depscope::version
