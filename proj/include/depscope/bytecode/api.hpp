#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "depscope/bytecode/classfile.hpp"
#include "depscope/diagnostics.hpp"
#include "depscope/model.hpp"

namespace depscope::bytecode {

enum class ApiKind { Method, Field };

struct ApiKey {
  MethodId member;
  ApiKind kind = ApiKind::Method;

  bool operator==(const ApiKey&) const = default;
  auto operator<=>(const ApiKey&) const = default;
  std::string display() const { return member.display(); }
};

struct ApiElement {
  ApiKey key;
  LibraryVersionRef version_ref;

  bool operator==(const ApiElement&) const = default;
  auto operator<=>(const ApiElement&) const = default;
};

// Parsed classes of one jar (or unpacked class-file directory), keyed by
// internal class name.
struct JarModel {
  std::map<std::string, ClassModel> classes;
  std::string label;

  const ClassModel* find_class(const std::string& name) const {
    auto it = classes.find(name);
    return it == classes.end() ? nullptr : &it->second;
  }
  const MethodModel* find_method(const MethodId& id) const;
  const FieldModel* find_field(const MethodId& id) const;
};

struct JarLoadResult {
  bool ok = false;
  bool corrupt = false;
  std::string error;
  JarModel jar;
};

JarLoadResult load_jar_bytes(const std::vector<std::uint8_t>& bytes, const std::string& label,
                             DiagnosticSink& sink);
JarLoadResult load_jar_file(const std::string& path, DiagnosticSink& sink);
// Reads loose .class files under a directory (build output).
JarLoadResult load_class_dir(const std::string& dir, DiagnosticSink& sink);

// Public methods (constructors included) and public fields of public,
// non-synthetic classes; synthetic and bridge members excluded. Resource-only
// jars yield the empty set.
std::set<ApiKey> extract_apis(const JarModel& jar);

struct ProjectMethod {
  std::string project_id;
  MethodId method;
  SourceSet source_set = SourceSet::Unknown;

  bool operator==(const ProjectMethod&) const = default;
  auto operator<=>(const ProjectMethod&) const = default;
};

struct ApiCall {
  ApiElement callee;
  ProjectMethod caller;
  int site_count = 1;
};

// Library API surface with the supertype hierarchy needed to resolve a call
// whose symbolic owner is a subtype of the declaring class.
class ApiUniverse {
 public:
  void add_library(const JarModel& jar, const LibraryVersionRef& version, DiagnosticSink& sink);

  const ApiElement* resolve(RefKind kind, const MethodId& target) const;
  const std::map<ApiKey, ApiElement>& elements() const { return elements_; }
  std::size_t api_count(const LibraryVersionRef& version) const;

 private:
  std::map<ApiKey, ApiElement> elements_;
  std::map<std::string, std::vector<std::string>> supers_;  // class -> super + interfaces
};

struct CallExtraction {
  std::vector<ProjectMethod> methods;
  std::vector<ApiCall> calls;  // one per (caller, callee), site_count aggregated
};

// Scans every project method's member uses against the universe. Instructions
// that resolve to no universe member are ignored; invokedynamic sites are
// counted as diagnostics.
CallExtraction extract_calls(const std::vector<std::pair<const JarModel*, SourceSet>>& classes,
                             const std::string& project_id, const ApiUniverse& universe,
                             DiagnosticSink& sink);

}  // namespace depscope::bytecode
