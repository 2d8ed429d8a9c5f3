#include "depscope/manifest.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include "depscope/xml.hpp"

namespace depscope::manifest {
namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string basename_of(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

std::string dirname_of(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string() : path.substr(0, pos);
}

bool looks_like_range(const std::string& v) {
  if (v.empty()) return false;
  if (v.front() == '[' || v.front() == '(') return true;
  if (v == "+" || ends_with(v, ".+") || ends_with(v, "-+")) return true;  // Gradle dynamic
  if (v == "latest.release" || v == "latest.integration") return true;
  return false;
}

// ---------------------------------------------------------------------------
// Maven
// ---------------------------------------------------------------------------

struct RawDep {
  std::string group;
  std::string artifact;
  std::string version;
  bool has_version = false;
  std::string scope;
  bool optional = false;
};

struct PomModel {
  std::string path;
  bool ok = false;
  std::string group_id;
  std::string artifact_id;
  std::string version;
  bool has_parent = false;
  std::string parent_group;
  std::string parent_artifact;
  std::string parent_version;
  std::map<std::string, std::string> props;
  std::vector<RawDep> deps;
  std::vector<RawDep> dep_mgmt;
};

RawDep read_dep(const xml::Element& el) {
  RawDep d;
  d.group = el.child_text("groupId").value_or("");
  d.artifact = el.child_text("artifactId").value_or("");
  if (auto v = el.child_text("version")) {
    d.version = *v;
    d.has_version = true;
  }
  d.scope = el.child_text("scope").value_or("");
  d.optional = el.child_text("optional").value_or("") == "true";
  return d;
}

PomModel parse_pom(const std::string& path, const std::string& content, DiagnosticSink& sink) {
  PomModel pom;
  pom.path = path;
  auto parsed = xml::parse(content);
  if (!parsed.ok) {
    sink.error("xml-parse-error", path, parsed.error);
    return pom;
  }
  const xml::Element& root = parsed.root;
  if (root.name != "project") {
    sink.error("xml-parse-error", path, "root element is <" + root.name + ">, expected <project>");
    return pom;
  }
  pom.ok = true;
  pom.group_id = root.child_text("groupId").value_or("");
  pom.artifact_id = root.child_text("artifactId").value_or("");
  pom.version = root.child_text("version").value_or("");
  if (const auto* parent = root.child("parent")) {
    pom.has_parent = true;
    pom.parent_group = parent->child_text("groupId").value_or("");
    pom.parent_artifact = parent->child_text("artifactId").value_or("");
    pom.parent_version = parent->child_text("version").value_or("");
  }
  if (const auto* props = root.child("properties"))
    for (const auto& p : props->children) pom.props[p.name] = p.trimmed_text();
  if (const auto* deps = root.child("dependencies"))
    for (const auto* d : deps->children_named("dependency")) pom.deps.push_back(read_dep(*d));
  if (const auto* mgmt = root.child("dependencyManagement"))
    if (const auto* deps = mgmt->child("dependencies"))
      for (const auto* d : deps->children_named("dependency")) {
        RawDep rd = read_dep(*d);
        if (d->child_text("scope").value_or("") == "import") {
          sink.info("bom-import-ignored", path, rd.group + ":" + rd.artifact);
          continue;
        }
        pom.dep_mgmt.push_back(rd);
      }
  if (root.child("profiles")) sink.info("profiles-ignored", path, "profile sections are not evaluated");
  return pom;
}

class MavenWorkspace {
 public:
  MavenWorkspace(std::vector<PomModel> poms, DiagnosticSink& sink) : poms_(std::move(poms)), sink_(sink) {
    for (auto& p : poms_) {
      by_path_[p.path] = &p;
      if (!p.ok) continue;
      std::string g = p.group_id.empty() ? p.parent_group : p.group_id;
      if (!g.empty() && !p.artifact_id.empty()) by_coords_[g + ":" + p.artifact_id] = &p;
    }
  }

  // Parent chain starting at pom (excluded), nearest parent first, resolved
  // within the workspace only. Remote parents end the chain.
  std::vector<const PomModel*> parent_chain(const PomModel& pom) const {
    std::vector<const PomModel*> chain;
    const PomModel* cur = &pom;
    std::set<const PomModel*> seen{cur};
    while (cur->has_parent && chain.size() < 16) {
      const PomModel* parent = nullptr;
      auto it = by_coords_.find(cur->parent_group + ":" + cur->parent_artifact);
      if (it != by_coords_.end()) parent = it->second;
      if (!parent) {
        // try relativePath convention: ../pom.xml next to the module dir
        std::string dir = dirname_of(cur->path);
        std::string candidate = dir.empty() ? std::string() : dirname_of(dir);
        std::string rel = candidate.empty() ? "pom.xml" : candidate + "/pom.xml";
        auto pit = by_path_.find(rel);
        if (pit != by_path_.end() && pit->second->artifact_id == cur->parent_artifact)
          parent = pit->second;
      }
      if (!parent || seen.count(parent)) {
        if (!parent)
          sink_.info("remote-parent", cur->path,
                     cur->parent_group + ":" + cur->parent_artifact + " not in workspace");
        break;
      }
      chain.push_back(parent);
      seen.insert(parent);
      cur = parent;
    }
    return chain;
  }

  const std::vector<PomModel>& poms() const { return poms_; }

 private:
  std::vector<PomModel> poms_;
  std::map<std::string, PomModel*> by_coords_;
  std::map<std::string, PomModel*> by_path_;
  DiagnosticSink& sink_;
};

std::map<std::string, std::string> effective_properties(const PomModel& pom,
                                                        const std::vector<const PomModel*>& chain) {
  std::map<std::string, std::string> props = pom.props;
  for (const auto* parent : chain)
    for (const auto& [k, v] : parent->props) props.emplace(k, v);

  std::string version = pom.version;
  std::string group = pom.group_id;
  for (const auto* parent : chain) {
    if (version.empty()) version = parent->version;
    if (group.empty()) group = parent->group_id;
  }
  if (version.empty()) version = pom.parent_version;
  if (group.empty()) group = pom.parent_group;

  props.emplace("project.version", version);
  props.emplace("project.groupId", group);
  props.emplace("project.artifactId", pom.artifact_id);
  props.emplace("project.parent.version", pom.parent_version);
  props.emplace("pom.version", version);
  props.emplace("pom.groupId", group);
  props.emplace("version", version);
  return props;
}

// Expands ${name} references; bounded so property cycles terminate.
std::string expand_props(std::string s, const std::map<std::string, std::string>& props) {
  for (int round = 0; round < 10; ++round) {
    auto start = s.find("${");
    if (start == std::string::npos) return s;
    bool changed = false;
    std::string out;
    std::size_t pos = 0;
    while ((start = s.find("${", pos)) != std::string::npos) {
      auto end = s.find('}', start);
      if (end == std::string::npos) break;
      out += s.substr(pos, start - pos);
      std::string name = s.substr(start + 2, end - start - 2);
      auto it = props.find(name);
      if (it != props.end()) {
        out += it->second;
        changed = true;
      } else {
        out += s.substr(start, end - start + 1);
      }
      pos = end + 1;
    }
    out += s.substr(pos);
    s = std::move(out);
    if (!changed) return s;
  }
  return s;
}

bool unresolved(const std::string& s) { return s.find("${") != std::string::npos || s.find('$') != std::string::npos; }

struct Emitted {
  std::string file;
  Library lib;
  std::string version;
  SourceSet source_set;
  bool optional;
};

void extract_maven(const MavenWorkspace& ws, std::vector<Emitted>& out, DiagnosticSink& sink) {
  for (const auto& pom : ws.poms()) {
    if (!pom.ok) continue;
    auto chain = ws.parent_chain(pom);
    auto props = effective_properties(pom, chain);

    auto managed_version = [&](const std::string& g, const std::string& a) -> std::string {
      const PomModel* scopes[17];
      std::size_t n = 0;
      scopes[n++] = &pom;
      for (const auto* p : chain) scopes[n++] = p;
      for (std::size_t i = 0; i < n; ++i) {
        for (const auto& md : scopes[i]->dep_mgmt) {
          if (expand_props(md.group, props) == g && expand_props(md.artifact, props) == a &&
              md.has_version)
            return expand_props(md.version, props);
        }
      }
      return {};
    };

    for (const auto& dep : pom.deps) {
      std::string g = expand_props(dep.group, props);
      std::string a = expand_props(dep.artifact, props);
      if (g.empty() || a.empty() || unresolved(g) || unresolved(a)) {
        sink.warn("unresolved-coordinates", pom.path, dep.group + ":" + dep.artifact);
        continue;
      }
      std::string v;
      if (dep.has_version) {
        std::string raw = dep.version;
        v = expand_props(raw, props);
        if (unresolved(v)) {
          sink.warn("unresolved-property", pom.path, g + ":" + a + ":" + raw);
          continue;
        }
        if (raw != v) sink.info("resolved-property", pom.path, g + ":" + a + ": " + raw + " -> " + v);
      } else {
        v = managed_version(g, a);
        if (v.empty() || unresolved(v)) {
          sink.warn("unversioned-dependency", pom.path, g + ":" + a);
          continue;
        }
        sink.info("managed-version", pom.path, g + ":" + a + " -> " + v);
      }
      if (looks_like_range(v)) {
        sink.warn("version-range", pom.path, g + ":" + a + ":" + v);
        continue;
      }
      SourceSet ss = dep.scope == "test" ? SourceSet::Test : SourceSet::Main;
      out.push_back({pom.path, {g, a}, v, ss, dep.optional});
    }
  }
}

// ---------------------------------------------------------------------------
// Gradle (line/block subset, not a Groovy interpreter)
// ---------------------------------------------------------------------------

std::string strip_gradle_comments(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  enum { Code, Line, Block, Single, Double } state = Code;
  for (std::size_t i = 0; i < in.size(); ++i) {
    char c = in[i];
    char next = i + 1 < in.size() ? in[i + 1] : '\0';
    switch (state) {
      case Code:
        if (c == '/' && next == '/') { state = Line; ++i; }
        else if (c == '/' && next == '*') { state = Block; ++i; }
        else {
          if (c == '\'') state = Single;
          else if (c == '"') state = Double;
          out += c;
        }
        break;
      case Line:
        if (c == '\n') { state = Code; out += c; }
        break;
      case Block:
        if (c == '*' && next == '/') { state = Code; ++i; }
        else if (c == '\n') out += c;
        break;
      case Single:
        out += c;
        if (c == '\'' ) state = Code;
        break;
      case Double:
        out += c;
        if (c == '"' && (i == 0 || in[i - 1] != '\\')) state = Code;
        break;
    }
  }
  return out;
}

void collect_gradle_vars(const std::string& content, std::map<std::string, std::string>& vars) {
  static const std::regex kAssign(
      R"(^\s*(?:(?:project\.)?ext\.|def\s+|val\s+)(\w+)\s*=\s*['"]([^'"]*)['"])");
  static const std::regex kPlainAssign(R"(^\s*(\w+)\s*=\s*['"]([^'"]*)['"])");

  std::string text = strip_gradle_comments(content);
  std::vector<std::pair<std::size_t, std::size_t>> ext_blocks;
  static const std::regex kExtOpen(R"(\bext\s*\{)");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kExtOpen);
       it != std::sregex_iterator(); ++it) {
    std::size_t open = static_cast<std::size_t>(it->position()) + it->length() - 1;
    int depth = 0;
    for (std::size_t j = open; j < text.size(); ++j) {
      if (text[j] == '{') ++depth;
      else if (text[j] == '}' && --depth == 0) {
        ext_blocks.emplace_back(open + 1, j);
        break;
      }
    }
  }

  std::size_t line_start = 0;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string::npos) line_end = text.size();
    std::string line = text.substr(line_start, line_end - line_start);
    std::smatch m;
    if (std::regex_search(line, m, kAssign)) {
      vars[m[1]] = m[2];
    } else {
      bool in_ext = false;
      for (auto [b, e] : ext_blocks)
        if (line_start >= b && line_start < e) in_ext = true;
      if (in_ext && std::regex_search(line, m, kPlainAssign)) vars[m[1]] = m[2];
    }
    line_start = line_end + 1;
  }
}

// Substitutes $var / ${var} in a double-quoted Gradle string.
std::string expand_gradle(const std::string& s, const std::map<std::string, std::string>& vars,
                          bool* ok) {
  std::string out;
  *ok = true;
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] != '$') {
      out += s[i++];
      continue;
    }
    std::string name;
    std::size_t next;
    if (i + 1 < s.size() && s[i + 1] == '{') {
      auto e = s.find('}', i);
      if (e == std::string::npos) { *ok = false; return s; }
      name = s.substr(i + 2, e - i - 2);
      next = e + 1;
    } else {
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '.'))
        ++j;
      name = s.substr(i + 1, j - i - 1);
      next = j;
    }
    // allow rootProject.ext.x / project.ext.x style references
    auto dot = name.find_last_of('.');
    std::string short_name = dot == std::string::npos ? name : name.substr(dot + 1);
    auto it = vars.find(short_name);
    if (it == vars.end()) { *ok = false; return s; }
    out += it->second;
    i = next;
  }
  return out;
}

bool gradle_test_conf(const std::string& conf) { return conf.rfind("test", 0) == 0; }

bool gradle_known_conf(const std::string& conf) {
  static const std::set<std::string> kConfs = {
      "implementation", "api", "compile", "compileOnly", "compileOnlyApi", "runtime",
      "runtimeOnly", "testImplementation", "testCompile", "testCompileOnly", "testRuntime",
      "testRuntimeOnly", "annotationProcessor", "kapt", "provided", "providedCompile",
      "providedRuntime", "integrationTestImplementation"};
  return kConfs.count(conf) > 0 || gradle_test_conf(conf);
}

void extract_gradle_file(const std::string& path, const std::string& content,
                         const std::map<std::string, std::string>& root_vars,
                         std::vector<Emitted>& out, DiagnosticSink& sink) {
  std::map<std::string, std::string> vars = root_vars;
  collect_gradle_vars(content, vars);
  std::string text = strip_gradle_comments(content);

  // locate dependencies { ... } bodies (buildscript blocks included; the
  // classpath configuration is filtered below)
  std::vector<std::string> bodies;
  static const std::regex kDepsOpen(R"(\bdependencies\s*\{)");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kDepsOpen);
       it != std::sregex_iterator(); ++it) {
    std::size_t open = static_cast<std::size_t>(it->position()) + it->length() - 1;
    int depth = 0;
    for (std::size_t j = open; j < text.size(); ++j) {
      if (text[j] == '{') ++depth;
      else if (text[j] == '}' && --depth == 0) {
        bodies.push_back(text.substr(open + 1, j - open - 1));
        break;
      }
    }
  }

  static const std::regex kStringNotation(
      R"re(^\s*(\w+)\s*[\( ]\s*('([^']*)'|"([^"]*)"))re");
  static const std::regex kMapPart(
      R"re((group|name|version)\s*[:=]\s*('([^']*)'|"([^"]*)"))re");

  auto emit = [&](const std::string& conf, const std::string& g, const std::string& n,
                  const std::string& v) {
    if (v.empty()) {
      sink.warn("unversioned-dependency", path, g + ":" + n);
      return;
    }
    if (looks_like_range(v)) {
      sink.warn("version-range", path, g + ":" + n + ":" + v);
      return;
    }
    SourceSet ss = gradle_test_conf(conf) ? SourceSet::Test : SourceSet::Main;
    out.push_back({path, {g, n}, v, ss, false});
  };

  for (const auto& body : bodies) {
    std::size_t line_start = 0;
    while (line_start < body.size()) {
      std::size_t line_end = body.find('\n', line_start);
      if (line_end == std::string::npos) line_end = body.size();
      std::string line = body.substr(line_start, line_end - line_start);
      line_start = line_end + 1;

      std::smatch m;
      if (!std::regex_search(line, m, kStringNotation)) {
        // map notation without a leading quoted string
        static const std::regex kConfWord(R"(^\s*(\w+)\s*\(?\s*group)");
        std::smatch cm;
        if (std::regex_search(line, cm, kConfWord) && gradle_known_conf(cm[1])) {
          std::string conf = cm[1];
          std::map<std::string, std::string> parts;
          for (auto pit = std::sregex_iterator(line.begin(), line.end(), kMapPart);
               pit != std::sregex_iterator(); ++pit) {
            std::string value = (*pit)[3].matched ? (*pit)[3].str() : (*pit)[4].str();
            if ((*pit)[4].matched) {
              bool ok = true;
              value = expand_gradle(value, vars, &ok);
              if (!ok) {
                sink.warn("unresolved-variable", path, line);
                parts.clear();
                break;
              }
            }
            parts[(*pit)[1]] = value;
          }
          if (parts.count("group") && parts.count("name"))
            emit(conf, parts["group"], parts["name"], parts.count("version") ? parts["version"] : "");
        }
        continue;
      }
      std::string conf = m[1];
      if (conf == "classpath") continue;  // buildscript plugin classpath
      if (!gradle_known_conf(conf)) continue;
      bool double_quoted = m[4].matched;
      std::string literal = double_quoted ? m[4].str() : m[3].str();
      if (double_quoted) {
        bool ok = true;
        literal = expand_gradle(literal, vars, &ok);
        if (!ok) {
          sink.warn("unresolved-variable", path, line);
          continue;
        }
      }
      if (literal.rfind("project(", 0) == 0) continue;
      std::vector<std::string> parts;
      std::size_t p = 0;
      while (true) {
        auto c = literal.find(':', p);
        if (c == std::string::npos) { parts.push_back(literal.substr(p)); break; }
        parts.push_back(literal.substr(p, c - p));
        p = c + 1;
      }
      if (parts.size() < 2 || parts[0].empty() || parts[1].empty()) continue;
      emit(conf, parts[0], parts[1], parts.size() >= 3 ? parts[2] : "");
    }
  }
}

}  // namespace

bool is_config_file(const std::string& path) {
  std::string base = basename_of(path);
  return base == "pom.xml" || base == "build.gradle" || base == "build.gradle.kts";
}

std::vector<std::string> list_config_files(const FileTree& tree) {
  std::vector<std::string> out;
  for (const auto& f : tree.list_files())
    if (is_config_file(f)) out.push_back(f);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LibraryDependency> extract_dependencies(const FileTree& tree, const CommitRef& commit,
                                                    const std::string& project_id,
                                                    DiagnosticSink& sink) {
  std::vector<std::string> files = list_config_files(tree);

  std::vector<PomModel> poms;
  std::vector<Emitted> emitted;
  std::map<std::string, std::string> root_gradle_vars;

  for (const auto& f : files) {
    auto content = tree.read(f);
    if (!content) {
      sink.error("io-error", f, "file listed but unreadable");
      continue;
    }
    if (basename_of(f) == "pom.xml") poms.push_back(parse_pom(f, *content, sink));
  }
  MavenWorkspace ws(std::move(poms), sink);
  extract_maven(ws, emitted, sink);

  if (auto root_build = tree.read("build.gradle"))
    collect_gradle_vars(*root_build, root_gradle_vars);
  else if (auto root_kts = tree.read("build.gradle.kts"))
    collect_gradle_vars(*root_kts, root_gradle_vars);

  for (const auto& f : files) {
    std::string base = basename_of(f);
    if (base != "build.gradle" && base != "build.gradle.kts") continue;
    auto content = tree.read(f);
    if (!content) continue;
    extract_gradle_file(f, *content, root_gradle_vars, emitted, sink);
  }

  // a manifest living under src/test/** only feeds test code, whatever the
  // declared scope says
  auto in_test_path = [](const std::string& path) {
    return path.rfind("src/test/", 0) == 0 || path.find("/src/test/") != std::string::npos;
  };

  // collapse to one record per (file, group, name, version)
  std::vector<LibraryDependency> out;
  std::set<std::tuple<std::string, std::string, std::string, std::string>> seen;
  std::sort(emitted.begin(), emitted.end(), [](const Emitted& a, const Emitted& b) {
    return std::tie(a.file, a.lib.group, a.lib.name, a.version) <
           std::tie(b.file, b.lib.group, b.lib.name, b.version);
  });
  for (const auto& e : emitted) {
    auto key = std::make_tuple(e.file, e.lib.group, e.lib.name, e.version);
    if (!seen.insert(key).second) continue;
    LibraryDependency d;
    d.project_id = project_id;
    d.config_file = e.file;
    d.commit = commit;
    d.version_ref = {e.lib, {e.version}};
    d.source_set = in_test_path(e.file) ? SourceSet::Test : e.source_set;
    d.optional_flag = e.optional;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace depscope::manifest
