#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace depscope::bytecode {

// Identifies a method or field by owner internal name, member name and
// JVM descriptor, e.g. {"com/example/Foo", "bar", "(I)V"}.
struct MethodId {
  std::string owner;
  std::string name;
  std::string descriptor;

  bool operator==(const MethodId&) const = default;
  auto operator<=>(const MethodId&) const = default;
  std::string display() const { return owner + "." + name + ":" + descriptor; }
};

enum class RefKind {
  InvokeVirtual,
  InvokeSpecial,
  InvokeStatic,
  InvokeInterface,
  GetStatic,
  PutStatic,
  GetField,
  PutField,
};

inline bool is_invoke(RefKind k) {
  return k == RefKind::InvokeVirtual || k == RefKind::InvokeSpecial ||
         k == RefKind::InvokeStatic || k == RefKind::InvokeInterface;
}

// whether the call binds to exactly one target (no CHA fan-out)
inline bool is_static_binding(RefKind k) {
  return k == RefKind::InvokeSpecial || k == RefKind::InvokeStatic;
}

struct MemberUse {
  RefKind kind;
  MethodId target;
};

namespace acc {
constexpr std::uint16_t kPublic = 0x0001;
constexpr std::uint16_t kStatic = 0x0008;
constexpr std::uint16_t kFinal = 0x0010;
constexpr std::uint16_t kInterface = 0x0200;
constexpr std::uint16_t kAbstract = 0x0400;
constexpr std::uint16_t kSynthetic = 0x1000;
constexpr std::uint16_t kBridge = 0x0040;
constexpr std::uint16_t kNative = 0x0100;
}  // namespace acc

struct FieldModel {
  std::uint16_t access = 0;
  std::string name;
  std::string descriptor;
};

struct MethodModel {
  std::uint16_t access = 0;
  std::string name;
  std::string descriptor;
  bool has_code = false;
  // digest of the normalized instruction stream; constant-pool indices are
  // replaced by symbolic strings, debug attributes never contribute
  std::uint64_t fingerprint = 0;
  std::vector<MemberUse> uses;
  int invokedynamic_sites = 0;

  bool is_abstract_or_native() const { return (access & (acc::kAbstract | acc::kNative)) != 0; }
};

struct ClassModel {
  std::uint16_t access = 0;
  std::uint16_t major_version = 0;
  std::string name;
  std::string super_name;  // empty for java/lang/Object
  std::vector<std::string> interfaces;
  std::vector<FieldModel> fields;
  std::vector<MethodModel> methods;
  // access flags from the InnerClasses attribute when this class is nested
  bool has_inner_info = false;
  std::uint16_t inner_access = 0;

  std::uint16_t effective_access() const { return has_inner_info ? inner_access : access; }
  bool is_public() const { return (effective_access() & acc::kPublic) != 0; }
  bool is_synthetic() const { return (access & acc::kSynthetic) != 0; }
  bool is_interface() const { return (access & acc::kInterface) != 0; }
};

struct ClassParseResult {
  bool ok = false;
  std::string error;
  ClassModel cls;
};

// Parses a JVM class file (magic 0xCAFEBABE). Major versions 45-61 are
// supported; newer versions parse best-effort and set `version_warning`.
struct ClassParseOutcome : ClassParseResult {
  bool version_warning = false;
};

ClassParseOutcome parse_class(const std::vector<std::uint8_t>& bytes);

// Digest assigned to abstract/native bodies.
std::uint64_t empty_body_digest();

}  // namespace depscope::bytecode
