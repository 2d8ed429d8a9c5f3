#include "depscope/bytecode/api.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "depscope/bytecode/zip.hpp"

namespace depscope::bytecode {

namespace fs = std::filesystem;

const MethodModel* JarModel::find_method(const MethodId& id) const {
  const ClassModel* cls = find_class(id.owner);
  if (!cls) return nullptr;
  for (const auto& m : cls->methods)
    if (m.name == id.name && m.descriptor == id.descriptor) return &m;
  return nullptr;
}

const FieldModel* JarModel::find_field(const MethodId& id) const {
  const ClassModel* cls = find_class(id.owner);
  if (!cls) return nullptr;
  for (const auto& f : cls->fields)
    if (f.name == id.name && f.descriptor == id.descriptor) return &f;
  return nullptr;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

JarLoadResult from_entries(const std::vector<ZipEntry>& entries, const std::string& label,
                           DiagnosticSink& sink) {
  JarLoadResult res;
  res.jar.label = label;
  for (const auto& e : entries) {
    if (!ends_with(e.name, ".class")) continue;
    if (ends_with(e.name, "module-info.class") || ends_with(e.name, "package-info.class")) continue;
    auto parsed = parse_class(e.data);
    if (!parsed.ok) {
      sink.warn("class-parse-error", label + "!" + e.name, parsed.error);
      continue;
    }
    if (parsed.version_warning)
      sink.warn("class-version", label + "!" + e.name,
                "class file newer than supported range; parsed best-effort");
    res.jar.classes[parsed.cls.name] = std::move(parsed.cls);
  }
  res.ok = true;
  return res;
}

}  // namespace

JarLoadResult load_jar_bytes(const std::vector<std::uint8_t>& bytes, const std::string& label,
                             DiagnosticSink& sink) {
  auto zip = read_zip(bytes);
  if (!zip.ok) {
    JarLoadResult res;
    res.corrupt = true;
    res.error = zip.error;
    return res;
  }
  return from_entries(zip.entries, label, sink);
}

JarLoadResult load_jar_file(const std::string& path, DiagnosticSink& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    JarLoadResult res;
    res.error = "cannot open " + path;
    return res;
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_jar_bytes(bytes, path, sink);
}

JarLoadResult load_class_dir(const std::string& dir, DiagnosticSink& sink) {
  JarLoadResult res;
  res.jar.label = dir;
  std::error_code ec;
  std::vector<fs::path> files;
  for (fs::recursive_directory_iterator it(dir, ec), end; it != end; it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file() && it->path().extension() == ".class") files.push_back(it->path());
  }
  if (ec) {
    res.error = "cannot read " + dir + ": " + ec.message();
    return res;
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    auto parsed = parse_class(bytes);
    if (!parsed.ok) {
      sink.warn("class-parse-error", f.string(), parsed.error);
      continue;
    }
    res.jar.classes[parsed.cls.name] = std::move(parsed.cls);
  }
  res.ok = true;
  return res;
}

std::set<ApiKey> extract_apis(const JarModel& jar) {
  std::set<ApiKey> out;
  for (const auto& [name, cls] : jar.classes) {
    if (!cls.is_public() || cls.is_synthetic()) continue;
    for (const auto& m : cls.methods) {
      if ((m.access & acc::kPublic) == 0) continue;
      if (m.access & (acc::kSynthetic | acc::kBridge)) continue;
      if (m.name == "<clinit>") continue;
      out.insert({{name, m.name, m.descriptor}, ApiKind::Method});
    }
    for (const auto& f : cls.fields) {
      if ((f.access & acc::kPublic) == 0) continue;
      if (f.access & acc::kSynthetic) continue;
      out.insert({{name, f.name, f.descriptor}, ApiKind::Field});
    }
  }
  return out;
}

void ApiUniverse::add_library(const JarModel& jar, const LibraryVersionRef& version,
                              DiagnosticSink& sink) {
  for (const auto& key : extract_apis(jar)) {
    auto [it, inserted] = elements_.emplace(key, ApiElement{key, version});
    if (!inserted && !(it->second.version_ref == version))
      sink.warn("api-collision", key.display(),
                "member present in " + it->second.version_ref.key() + " and " + version.key());
  }
  for (const auto& [name, cls] : jar.classes) {
    auto& sup = supers_[name];
    if (!cls.super_name.empty()) sup.push_back(cls.super_name);
    for (const auto& i : cls.interfaces) sup.push_back(i);
  }
}

const ApiElement* ApiUniverse::resolve(RefKind kind, const MethodId& target) const {
  ApiKind want = is_invoke(kind) ? ApiKind::Method : ApiKind::Field;
  // exact owner first, then up the supertype hierarchy
  std::vector<std::string> work{target.owner};
  std::set<std::string> seen;
  while (!work.empty()) {
    std::string owner = work.front();
    work.erase(work.begin());
    if (!seen.insert(owner).second) continue;
    auto it = elements_.find({{owner, target.name, target.descriptor}, want});
    if (it != elements_.end()) return &it->second;
    auto sit = supers_.find(owner);
    if (sit != supers_.end())
      work.insert(work.end(), sit->second.begin(), sit->second.end());
  }
  return nullptr;
}

std::size_t ApiUniverse::api_count(const LibraryVersionRef& version) const {
  std::size_t n = 0;
  for (const auto& [k, e] : elements_)
    if (e.version_ref == version) ++n;
  return n;
}

CallExtraction extract_calls(const std::vector<std::pair<const JarModel*, SourceSet>>& classes,
                             const std::string& project_id, const ApiUniverse& universe,
                             DiagnosticSink& sink) {
  CallExtraction out;
  std::map<std::pair<MethodId, ApiKey>, std::size_t> call_index;  // -> index into out.calls

  for (const auto& [jar, source_set] : classes) {
    for (const auto& [cls_name, cls] : jar->classes) {
      for (const auto& m : cls.methods) {
        ProjectMethod pm{project_id, {cls_name, m.name, m.descriptor}, source_set};
        out.methods.push_back(pm);
        if (m.invokedynamic_sites > 0)
          sink.info("invokedynamic-site", pm.method.display(),
                    std::to_string(m.invokedynamic_sites) + " indy site(s) not resolved");
        for (const auto& use : m.uses) {
          const ApiElement* api = universe.resolve(use.kind, use.target);
          if (!api) continue;
          auto key = std::make_pair(pm.method, api->key);
          auto it = call_index.find(key);
          if (it == call_index.end()) {
            call_index.emplace(key, out.calls.size());
            out.calls.push_back({*api, pm, 1});
          } else {
            ++out.calls[it->second].site_count;
          }
        }
      }
    }
  }
  std::sort(out.methods.begin(), out.methods.end());
  std::sort(out.calls.begin(), out.calls.end(), [](const ApiCall& a, const ApiCall& b) {
    return std::tie(a.caller.method, a.callee.key) < std::tie(b.caller.method, b.callee.key);
  });
  return out;
}

}  // namespace depscope::bytecode
