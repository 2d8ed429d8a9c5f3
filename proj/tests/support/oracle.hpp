#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "depscope/bytecode/zip.hpp"
#include "support/classbuilder.hpp"

// Independent call-graph oracle computed from the builders' declared
// instruction lists, never from parsed bytecode. Reimplements CHA resolution
// with its own traversal so production and oracle can disagree.
namespace testsupport {

struct OracleGraph {
  std::set<std::string> nodes;                         // method displays
  std::map<std::string, std::set<std::string>> edges;  // display -> callee displays
};

OracleGraph oracle_graph(const std::vector<const ClassBuilder*>& classes);

std::set<std::string> oracle_reachable(const OracleGraph& graph, const std::string& start);

// Jar container holding each builder's class file at <name>.class.
std::vector<std::uint8_t> jar_bytes(const std::vector<const ClassBuilder*>& classes,
                                    std::uint64_t permutation_seed = 0);

}  // namespace testsupport
