#pragma once

#include <map>
#include <set>
#include <string>

#include "depscope/bytecode/api.hpp"

namespace depscope::bytecode {

// Class-hierarchy-analysis call graph scoped to a single jar. Virtual and
// interface calls fan out to every non-abstract override in subtypes present
// in scope; static/special calls bind to one target. Targets outside the jar
// are diagnostics, not edges.
struct CallGraph {
  std::string scope;
  std::set<MethodId> nodes;
  std::map<MethodId, std::set<MethodId>> edges;
  std::map<MethodId, std::uint64_t> fingerprints;

  bool has_node(const MethodId& id) const { return nodes.count(id) > 0; }
};

CallGraph build_call_graph(const JarModel& jar, DiagnosticSink& sink);

// All methods reachable from `start`, including `start` itself.
std::set<MethodId> reachable_from(const CallGraph& graph, const MethodId& start);

struct ClosureDigestResult {
  bool in_scope = false;
  std::uint64_t digest = 0;
};

// Order-independent combination of the fingerprints of `api` and all methods
// reachable from it. Stable across traversal orders and graph cycles.
ClosureDigestResult closure_digest(const CallGraph& graph, const MethodId& api);

}  // namespace depscope::bytecode
