#include "depscope/bytecode/callgraph.hpp"

#include <algorithm>
#include <deque>

#include "depscope/digest.hpp"

namespace depscope::bytecode {
namespace {

// first class at or above `owner` declaring (name, descriptor)
const ClassModel* resolve_up(const JarModel& jar, const std::string& owner, const std::string& name,
                             const std::string& descriptor) {
  std::deque<std::string> work{owner};
  std::set<std::string> seen;
  while (!work.empty()) {
    std::string cur = work.front();
    work.pop_front();
    if (!seen.insert(cur).second) continue;
    const ClassModel* cls = jar.find_class(cur);
    if (!cls) continue;
    for (const auto& m : cls->methods)
      if (m.name == name && m.descriptor == descriptor) return cls;
    if (!cls->super_name.empty()) work.push_back(cls->super_name);
    for (const auto& i : cls->interfaces) work.push_back(i);
  }
  return nullptr;
}

}  // namespace

CallGraph build_call_graph(const JarModel& jar, DiagnosticSink& sink) {
  CallGraph g;
  g.scope = jar.label;

  // subtype index: class -> direct subclasses/implementors in scope
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& [name, cls] : jar.classes) {
    if (!cls.super_name.empty()) children[cls.super_name].push_back(name);
    for (const auto& i : cls.interfaces) children[i].push_back(name);
    for (const auto& m : cls.methods) {
      MethodId id{name, m.name, m.descriptor};
      g.nodes.insert(id);
      g.fingerprints[id] = m.has_code ? m.fingerprint : empty_body_digest();
    }
  }

  auto subtypes_of = [&](const std::string& root) {
    std::vector<std::string> out;
    std::deque<std::string> work{root};
    std::set<std::string> seen;
    while (!work.empty()) {
      std::string cur = work.front();
      work.pop_front();
      if (!seen.insert(cur).second) continue;
      if (cur != root) out.push_back(cur);
      auto it = children.find(cur);
      if (it != children.end())
        for (const auto& c : it->second) work.push_back(c);
    }
    return out;
  };

  for (const auto& [name, cls] : jar.classes) {
    for (const auto& m : cls.methods) {
      MethodId caller{name, m.name, m.descriptor};
      for (const auto& use : m.uses) {
        if (!is_invoke(use.kind)) continue;
        if (!jar.find_class(use.target.owner)) {
          sink.info("external-target", caller.display(),
                    "call to " + use.target.display() + " outside " + jar.label);
          continue;
        }
        const ClassModel* declaring =
            resolve_up(jar, use.target.owner, use.target.name, use.target.descriptor);
        std::set<MethodId> targets;
        if (declaring)
          targets.insert({declaring->name, use.target.name, use.target.descriptor});
        if (!is_static_binding(use.kind)) {
          for (const auto& sub : subtypes_of(use.target.owner)) {
            const ClassModel* sc = jar.find_class(sub);
            if (!sc) continue;
            for (const auto& sm : sc->methods)
              if (sm.name == use.target.name && sm.descriptor == use.target.descriptor &&
                  (sm.access & acc::kAbstract) == 0)
                targets.insert({sub, sm.name, sm.descriptor});
          }
        }
        if (targets.empty()) {
          sink.info("unresolved-target", caller.display(), use.target.display());
          continue;
        }
        for (const auto& t : targets)
          if (g.has_node(t)) g.edges[caller].insert(t);
      }
    }
  }
  return g;
}

std::set<MethodId> reachable_from(const CallGraph& graph, const MethodId& start) {
  std::set<MethodId> seen;
  std::deque<MethodId> work{start};
  while (!work.empty()) {
    MethodId cur = work.front();
    work.pop_front();
    if (!seen.insert(cur).second) continue;
    auto it = graph.edges.find(cur);
    if (it != graph.edges.end())
      for (const auto& next : it->second) work.push_back(next);
  }
  return seen;
}

ClosureDigestResult closure_digest(const CallGraph& graph, const MethodId& api) {
  ClosureDigestResult res;
  if (!graph.has_node(api)) return res;
  res.in_scope = true;

  auto closure = reachable_from(graph, api);
  std::vector<std::pair<std::string, std::uint64_t>> parts;
  parts.reserve(closure.size());
  for (const auto& id : closure) {
    auto it = graph.fingerprints.find(id);
    parts.emplace_back(id.display(), it != graph.fingerprints.end() ? it->second
                                                                    : empty_body_digest());
  }
  std::sort(parts.begin(), parts.end());
  Digest64 dig;
  for (const auto& [id, fp] : parts) {
    dig.update(id);
    dig.update_u64(fp);
  }
  res.digest = dig.value();
  return res;
}

}  // namespace depscope::bytecode
