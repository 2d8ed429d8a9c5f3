#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "depscope/version.hpp"

using namespace depscope::version;

namespace {

struct OrderVector {
  const char* a;
  const char* b;
  Ordering expected;
};

// Drawn from the documented ComparableVersion behavior: numeric segments,
// null-value trimming, qualifier ranking and alias folding.
const OrderVector kOrderVectors[] = {
    // numeric ordering and null trimming
    {"1", "1", Ordering::Equal},
    {"1", "1.0", Ordering::Equal},
    {"1", "1.0.0", Ordering::Equal},
    {"1", "1-0", Ordering::Equal},
    {"1.0", "1.0.0", Ordering::Equal},
    {"1", "2", Ordering::Less},
    {"1.0", "1.1", Ordering::Less},
    {"1.2.3", "1.2.4", Ordering::Less},
    {"1.9", "1.10", Ordering::Less},
    {"1.0.9", "1.0.10", Ordering::Less},
    {"2.0", "10.0", Ordering::Less},
    {"1.0.2", "1.1", Ordering::Less},
    {"1.1", "1.0.2", Ordering::Greater},
    {"3.8", "3.8.1", Ordering::Less},
    // big version numbers must not overflow
    {"1.99999999999999999999", "1.100000000000000000000", Ordering::Less},
    // release aliases
    {"1", "1.ga", Ordering::Equal},
    {"1", "1-ga", Ordering::Equal},
    {"1", "1.final", Ordering::Equal},
    {"1", "1.release", Ordering::Equal},
    {"1-ga", "1-final", Ordering::Equal},
    // qualifier ranking around the release point
    {"1-snapshot", "1", Ordering::Less},
    {"1", "1-sp", Ordering::Less},
    {"1-snapshot", "1-sp", Ordering::Less},
    {"1.0-alpha", "1.0", Ordering::Less},
    {"1.0-alpha", "1.0-beta", Ordering::Less},
    {"1.0-beta", "1.0-milestone", Ordering::Less},
    {"1.0-milestone", "1.0-rc", Ordering::Less},
    {"1.0-rc", "1.0-cr", Ordering::Equal},
    {"1.0-rc", "1.0-snapshot", Ordering::Less},
    {"1.0-SNAPSHOT", "1.0", Ordering::Less},
    // short aliases only bind to a following digit
    {"1-a1", "1-alpha-1", Ordering::Equal},
    {"1-b2", "1-beta-2", Ordering::Equal},
    {"1-m3", "1-milestone-3", Ordering::Equal},
    {"1.0-alpha1", "1.0-alpha2", Ordering::Less},
    {"1.0-alpha2", "1.0-beta1", Ordering::Less},
    {"1.0-beta1", "1.0", Ordering::Less},
    {"1.0", "1.0-1", Ordering::Less},
    {"1.0-1", "1.0-2", Ordering::Less},
    // unknown qualifiers sort lexically after release
    {"2.0.1", "2.0.1-xyz", Ordering::Less},
    {"2.0.1-klm", "2.0.1-lmn", Ordering::Less},
    {"1.0-xyz", "1.0-XYZ", Ordering::Equal},  // case-insensitive
    {"1.0-ALPHA", "1.0-alpha", Ordering::Equal},
    // numbers embedded in qualifiers compare numerically
    {"1-foo2", "1-foo10", Ordering::Less},
    // dot/dash transitions from the reference examples
    {"1.foo", "1-foo", Ordering::Less},
    {"1-foo", "1-1", Ordering::Less},
    {"1-1", "1.1", Ordering::Less},
    {"1.0-sp", "1.1", Ordering::Less},
    {"1.0.sp", "1.0.1", Ordering::Less},
};

struct ClassifyCase {
  const char* from;
  const char* to;
  UpdateDirection direction;
  UpdateMagnitude magnitude;
};

const ClassifyCase kClassifyCases[] = {
    {"1.2.3", "1.2.4", UpdateDirection::Upgrade, UpdateMagnitude::Patch},
    {"1.2.3", "1.3.0", UpdateDirection::Upgrade, UpdateMagnitude::Minor},
    {"1.2.3", "2.0.0", UpdateDirection::Upgrade, UpdateMagnitude::Major},
    {"1.2.4", "1.2.3", UpdateDirection::Downgrade, UpdateMagnitude::Patch},
    {"1.3.0", "1.2.9", UpdateDirection::Downgrade, UpdateMagnitude::Minor},
    {"2.0.0", "1.9.9", UpdateDirection::Downgrade, UpdateMagnitude::Major},
    {"4.11", "4.12", UpdateDirection::Upgrade, UpdateMagnitude::Minor},
    {"1.2", "1.2.1", UpdateDirection::Upgrade, UpdateMagnitude::Patch},
    {"1.2", "2.0", UpdateDirection::Upgrade, UpdateMagnitude::Major},
    {"2.0", "1.9", UpdateDirection::Downgrade, UpdateMagnitude::Major},
    {"1.2.1", "1.2", UpdateDirection::Downgrade, UpdateMagnitude::Patch},
    {"1.2.3", "1.2.3-SNAPSHOT", UpdateDirection::Downgrade, UpdateMagnitude::ToSnapshot},
    {"1.2.3-SNAPSHOT", "1.2.3", UpdateDirection::Upgrade, UpdateMagnitude::FromSnapshot},
    {"1.2.3", "1.2.4-SNAPSHOT", UpdateDirection::Upgrade, UpdateMagnitude::ToSnapshot},
    {"1.2.4-SNAPSHOT", "1.2.3", UpdateDirection::Downgrade, UpdateMagnitude::FromSnapshot},
    {"1.0-SNAPSHOT", "2.0-SNAPSHOT", UpdateDirection::Upgrade, UpdateMagnitude::Major},
    {"1.0.0", "1.0.0", UpdateDirection::Unknown, UpdateMagnitude::Unknown},
    {"1.0-alpha", "1.0-beta", UpdateDirection::Upgrade, UpdateMagnitude::Unknown},
    {"1.0-rc1", "1.0", UpdateDirection::Upgrade, UpdateMagnitude::Unknown},
    // numeric tie + unrecognized differing qualifiers: direction unknown
    {"2.0.1-klm", "2.0.1-lmn", UpdateDirection::Unknown, UpdateMagnitude::Unknown},
    {"1.0-fabric", "1.0-forge", UpdateDirection::Unknown, UpdateMagnitude::Unknown},
    {"1.2.3.4", "1.2.3.5", UpdateDirection::Upgrade, UpdateMagnitude::Unknown},
    // date-style versions still carry an X.Y shape, so the delta is a minor
    {"20030203.000129", "20030203.000130", UpdateDirection::Upgrade, UpdateMagnitude::Minor},
};

// Deliberately omits dot-attached unknown qualifiers like "1.foo": the
// reference ordering compares a bare qualifier against a dash-started
// sublist by token type, which is not transitive against plain releases.
// The pairwise vectors above still pin that behavior down.
std::vector<std::string> sample_versions() {
  return {"1",          "1.0",        "1.0.0",    "2",         "1.1",     "1.2.3",
          "1.2.4",      "1.10",       "1.9",      "1-alpha",   "1-beta",  "1-rc1",
          "1-SNAPSHOT", "1.0-sp",     "1.0-xyz",  "1.0-klm",   "2.0.1",   "1-foo2",
          "1-foo10",    "1.0.1",      "1-foo",    "1-1",       "3.8.1",   "10.0",
          "1-ga",       "1-final",    "1-a1",     "1-alpha-1", "0.9",     "0.9.1"};
}

int sign_of(Ordering o) { return o == Ordering::Less ? -1 : o == Ordering::Greater ? 1 : 0; }

}  // namespace

TEST_CASE("ordering vectors") {
  for (const auto& v : kOrderVectors) {
    CAPTURE(v.a);
    CAPTURE(v.b);
    CHECK(compare_versions(std::string(v.a), std::string(v.b)) == v.expected);
    // antisymmetry on every vector
    Ordering flipped = compare_versions(std::string(v.b), std::string(v.a));
    CHECK(sign_of(flipped) == -sign_of(v.expected));
  }
  CHECK(std::size(kOrderVectors) >= 40);
}

TEST_CASE("classification cases") {
  for (const auto& c : kClassifyCases) {
    CAPTURE(c.from);
    CAPTURE(c.to);
    auto got = classify_update(VersionString{c.from}, VersionString{c.to});
    CHECK(got.direction == c.direction);
    CHECK(got.magnitude == c.magnitude);
  }
  CHECK(std::size(kClassifyCases) >= 20);
}

TEST_CASE("total order properties") {
  auto versions = sample_versions();
  // reflexivity
  for (const auto& v : versions) CHECK(compare_versions(v, v) == Ordering::Equal);
  // antisymmetry
  for (const auto& a : versions)
    for (const auto& b : versions)
      CHECK(sign_of(compare_versions(a, b)) == -sign_of(compare_versions(b, a)));
  // transitivity over all triples
  for (const auto& a : versions)
    for (const auto& b : versions)
      for (const auto& c : versions) {
        int ab = sign_of(compare_versions(a, b));
        int bc = sign_of(compare_versions(b, c));
        if (ab != 0 && ab == bc) {
          CAPTURE(a);
          CAPTURE(b);
          CAPTURE(c);
          CHECK(sign_of(compare_versions(a, c)) == ab);
        }
      }
}

TEST_CASE("sort stability under shuffles") {
  auto versions = sample_versions();
  auto comparator = [](const std::string& a, const std::string& b) {
    return version_less(a, b);
  };
  std::vector<std::string> reference = versions;
  std::stable_sort(reference.begin(), reference.end(), comparator);
  std::mt19937 rng(42);
  for (int i = 0; i < 50; ++i) {
    auto shuffled = versions;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::stable_sort(shuffled.begin(), shuffled.end(), comparator);
    // all sorted permutations are equivalent under the order
    for (std::size_t k = 0; k < shuffled.size(); ++k)
      CHECK(compare_versions(shuffled[k], reference[k]) == Ordering::Equal);
  }
}

TEST_CASE("parse_version views") {
  auto pv = parse_version(VersionString{"1.2.3"});
  CHECK(pv.numeric_parts == std::vector<long long>{1, 2, 3});
  CHECK(pv.qualifier_parts.empty());
  CHECK(pv.semver_shape == SemverShape::XYZ);
  CHECK_FALSE(pv.is_snapshot);

  pv = parse_version(VersionString{"1.2-SNAPSHOT"});
  CHECK(pv.is_snapshot);
  CHECK(pv.semver_shape == SemverShape::XY);
  CHECK(pv.numeric_parts == std::vector<long long>{1, 2});
  CHECK(pv.qualifier_parts == std::vector<std::string>{"snapshot"});

  pv = parse_version(VersionString{"banana"});
  CHECK(pv.numeric_parts.empty());
  CHECK(pv.semver_shape == SemverShape::Other);

  pv = parse_version(VersionString{"1.2.3.4"});
  CHECK(pv.semver_shape == SemverShape::Other);
}

TEST_CASE("classification is antisymmetric in direction") {
  auto versions = sample_versions();
  for (const auto& a : versions)
    for (const auto& b : versions) {
      auto ab = classify_update(VersionString{a}, VersionString{b});
      auto ba = classify_update(VersionString{b}, VersionString{a});
      if (ab.direction == UpdateDirection::Upgrade)
        CHECK(ba.direction == UpdateDirection::Downgrade);
      if (ab.direction == UpdateDirection::Downgrade)
        CHECK(ba.direction == UpdateDirection::Upgrade);
      // magnitude ignores which side is newer, except the snapshot pair
      // which mirrors to the opposite transition
      if (ab.magnitude == UpdateMagnitude::ToSnapshot)
        CHECK(ba.magnitude == UpdateMagnitude::FromSnapshot);
      else if (ab.magnitude == UpdateMagnitude::FromSnapshot)
        CHECK(ba.magnitude == UpdateMagnitude::ToSnapshot);
      else
        CHECK(ab.magnitude == ba.magnitude);
    }
}
