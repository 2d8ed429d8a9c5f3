#include "support/oracle.hpp"

#include <array>

namespace testsupport {

namespace {

struct OracleMethod {
  std::string name;
  std::string descriptor;
  bool is_abstract = false;
  // (opcode, owner, name, descriptor) of every declared invoke instruction
  std::vector<std::array<std::string, 4>> calls;
};

struct OracleClass {
  std::string super;
  std::vector<std::string> interfaces;
  std::vector<OracleMethod> methods;
};

std::string display(const std::string& owner, const std::string& name, const std::string& desc) {
  return owner + "." + name + ":" + desc;
}

}  // namespace

OracleGraph oracle_graph(const std::vector<const ClassBuilder*>& classes) {
  std::map<std::string, OracleClass> scope;
  for (const ClassBuilder* cb : classes) {
    OracleClass oc;
    // the builder does not expose super/interfaces directly; recover them by
    // parsing nothing: keep them in the builder API instead
    oc.super = cb->super_name();
    oc.interfaces = cb->interface_names();
    for (const auto& m : cb->methods()) {
      OracleMethod om;
      om.name = m.name_;
      om.descriptor = m.descriptor_;
      om.is_abstract = (m.access_ & 0x0400) != 0 || !m.has_code_;
      for (const auto& ins : m.code_) {
        if (ins.raw) continue;
        if (ins.opcode == 0xb6 || ins.opcode == 0xb7 || ins.opcode == 0xb8 ||
            ins.opcode == 0xb9) {
          om.calls.push_back({std::to_string(ins.opcode), ins.constant.s1, ins.constant.s2,
                              ins.constant.s3});
        }
      }
      oc.methods.push_back(std::move(om));
    }
    scope[cb->name()] = std::move(oc);
  }

  // descendant sets via repeated expansion (deliberately not the production
  // worklist): child -> ancestors, inverted
  std::map<std::string, std::set<std::string>> descendants;
  for (const auto& [name, oc] : scope) {
    // every transitive ancestor of `name` gains `name` as descendant
    std::set<std::string> ancestors;
    std::vector<std::string> frontier{name};
    while (!frontier.empty()) {
      std::string cur = frontier.back();
      frontier.pop_back();
      auto it = scope.find(cur);
      if (it == scope.end()) continue;
      std::vector<std::string> ups = it->second.interfaces;
      if (!it->second.super.empty()) ups.push_back(it->second.super);
      for (const auto& up : ups) {
        if (ancestors.insert(up).second) frontier.push_back(up);
      }
    }
    for (const auto& a : ancestors) descendants[a].insert(name);
  }

  auto find_declaring_up = [&](const std::string& owner, const std::string& name,
                               const std::string& desc) -> std::string {
    std::vector<std::string> frontier{owner};
    std::set<std::string> seen;
    while (!frontier.empty()) {
      std::string cur = frontier.front();
      frontier.erase(frontier.begin());
      if (!seen.insert(cur).second) continue;
      auto it = scope.find(cur);
      if (it == scope.end()) continue;
      for (const auto& m : it->second.methods)
        if (m.name == name && m.descriptor == desc) return cur;
      if (!it->second.super.empty()) frontier.push_back(it->second.super);
      for (const auto& i : it->second.interfaces) frontier.push_back(i);
    }
    return "";
  };

  OracleGraph g;
  for (const auto& [cls_name, oc] : scope)
    for (const auto& m : oc.methods) g.nodes.insert(display(cls_name, m.name, m.descriptor));

  for (const auto& [cls_name, oc] : scope) {
    for (const auto& m : oc.methods) {
      std::string caller = display(cls_name, m.name, m.descriptor);
      for (const auto& call : m.calls) {
        int opcode = std::stoi(call[0]);
        const std::string& owner = call[1];
        const std::string& name = call[2];
        const std::string& desc = call[3];
        if (!scope.count(owner)) continue;  // external target

        std::set<std::string> targets;
        std::string declaring = find_declaring_up(owner, name, desc);
        if (!declaring.empty()) targets.insert(display(declaring, name, desc));
        bool dynamic = opcode == 0xb6 || opcode == 0xb9;
        if (dynamic) {
          auto dit = descendants.find(owner);
          if (dit != descendants.end()) {
            for (const auto& sub : dit->second) {
              for (const auto& sm : scope.at(sub).methods)
                if (sm.name == name && sm.descriptor == desc && !sm.is_abstract)
                  targets.insert(display(sub, name, desc));
            }
          }
        }
        for (const auto& t : targets)
          if (g.nodes.count(t)) g.edges[caller].insert(t);
      }
    }
  }
  return g;
}

std::set<std::string> oracle_reachable(const OracleGraph& graph, const std::string& start) {
  std::set<std::string> seen;
  std::vector<std::string> stack{start};
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    auto it = graph.edges.find(cur);
    if (it != graph.edges.end())
      for (const auto& next : it->second) stack.push_back(next);
  }
  return seen;
}

std::vector<std::uint8_t> jar_bytes(const std::vector<const ClassBuilder*>& classes,
                                    std::uint64_t permutation_seed) {
  std::vector<depscope::bytecode::ZipEntry> entries;
  for (const ClassBuilder* cb : classes)
    entries.push_back({cb->name() + ".class", cb->build(permutation_seed)});
  return depscope::bytecode::write_zip(entries);
}

}  // namespace testsupport
