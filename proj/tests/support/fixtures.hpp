#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "depscope/alert.hpp"
#include "depscope/bytecode/api.hpp"
#include "depscope/bytecode/callgraph.hpp"
#include "depscope/diagnostics.hpp"
#include "support/classbuilder.hpp"
#include "support/oracle.hpp"

namespace testsupport {

struct BuiltLib {
  depscope::bytecode::JarModel jar;
  depscope::bytecode::CallGraph graph;
};

// Assembles, writes to a jar container and re-parses through the production
// loader, so fixtures exercise the whole bytecode path.
inline std::shared_ptr<BuiltLib> build_lib(const std::vector<const ClassBuilder*>& classes,
                                           const std::string& label,
                                           std::uint64_t permutation_seed = 0) {
  depscope::DiagnosticSink sink;
  auto load = depscope::bytecode::load_jar_bytes(jar_bytes(classes, permutation_seed), label, sink);
  auto lib = std::make_shared<BuiltLib>();
  lib->jar = std::move(load.jar);
  lib->graph = depscope::bytecode::build_call_graph(lib->jar, sink);
  return lib;
}

// Artifact lookup over in-memory fixture libraries keyed by version key.
class FixtureArtifacts {
 public:
  void put(const depscope::LibraryVersionRef& ref, std::shared_ptr<BuiltLib> lib) {
    libs_[ref.key()] = std::move(lib);
  }
  depscope::alert::ArtifactLookup lookup() const {
    return [this](const depscope::LibraryVersionRef& ref)
               -> std::optional<depscope::alert::LibraryArtifact> {
      auto it = libs_.find(ref.key());
      if (it == libs_.end()) return std::nullopt;
      return depscope::alert::LibraryArtifact{&it->second->jar, &it->second->graph};
    };
  }

 private:
  std::map<std::string, std::shared_ptr<BuiltLib>> libs_;
};

// Extracts a project's calls against one library version via the production
// universe + call scanner.
inline depscope::alert::ProjectCalls project_calls(
    const std::vector<const ClassBuilder*>& project_classes, const std::string& project_id,
    const BuiltLib& lib, const depscope::LibraryVersionRef& ref,
    depscope::SourceSet set = depscope::SourceSet::Main) {
  depscope::DiagnosticSink sink;
  auto load =
      depscope::bytecode::load_jar_bytes(jar_bytes(project_classes), project_id + "-classes", sink);
  depscope::bytecode::ApiUniverse universe;
  universe.add_library(lib.jar, ref, sink);
  std::vector<std::pair<const depscope::bytecode::JarModel*, depscope::SourceSet>> sets{
      {&load.jar, set}};
  auto extraction = depscope::bytecode::extract_calls(sets, project_id, universe, sink);
  depscope::alert::ProjectCalls calls;
  calls.project_id = project_id;
  calls.calls = std::move(extraction.calls);
  return calls;
}

}  // namespace testsupport
