#pragma once

#include <string>
#include <vector>

#include "depscope/diagnostics.hpp"
#include "depscope/filetree.hpp"
#include "depscope/model.hpp"

namespace depscope::manifest {

// All Maven/Gradle build manifests in the tree, lexicographically ordered.
// build.gradle.kts files are listed and parsed best-effort.
std::vector<std::string> list_config_files(const FileTree& tree);

bool is_config_file(const std::string& path);

// Parses every manifest in the tree and resolves versions through Maven
// property expansion, the in-workspace parent chain and dependencyManagement,
// and through Gradle ext/def variables. Dependencies whose version stays
// unresolved (placeholders, ranges, omitted versions) go to diagnostics only.
// Output is sorted by (config_file, group, name, version).
std::vector<LibraryDependency> extract_dependencies(const FileTree& tree, const CommitRef& commit,
                                                    const std::string& project_id,
                                                    DiagnosticSink& sink);

}  // namespace depscope::manifest
