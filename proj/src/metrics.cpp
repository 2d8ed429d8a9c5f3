#include "depscope/metrics.hpp"

#include <algorithm>
#include <set>

#include "depscope/version.hpp"

namespace depscope::metrics {

MeanResult mean_of(const std::vector<std::optional<double>>& values) {
  MeanResult res;
  double sum = 0.0;
  for (const auto& v : values) {
    if (v.has_value()) {
      sum += *v;
      ++res.included;
    } else {
      ++res.excluded;
    }
  }
  if (res.included > 0) res.mean = sum / static_cast<double>(res.included);
  return res;
}

LibUsageIntensity usage_intensity_lib(const std::vector<LibraryDependency>& deps) {
  LibUsageIntensity out;
  std::map<std::string, std::set<std::string>> libs_per_project;
  std::map<std::string, std::set<std::string>> projects_per_lib;
  std::map<std::string, Library> lib_by_key;
  for (const auto& d : deps) {
    const Library& lib = d.version_ref.library;
    libs_per_project[d.project_id].insert(lib.key());
    projects_per_lib[lib.key()].insert(d.project_id);
    lib_by_key.emplace(lib.key(), lib);
  }
  for (const auto& [project, libs] : libs_per_project)
    out.per_project[project] = static_cast<int>(libs.size());
  for (const auto& [key, projects] : projects_per_lib)
    out.per_library[lib_by_key.at(key)] = static_cast<int>(projects.size());
  return out;
}

MethodUsageResult usage_intensity_method(const MethodUsageInput& input, DiagnosticSink& sink) {
  MethodUsageResult out;

  // per project: fraction of the project's methods that call any library API
  for (const auto& [project, methods] : input.methods_by_project) {
    std::set<std::string> callers_all;
    std::set<std::string> callers_main;
    auto calls_it = input.calls_by_project.find(project);
    if (calls_it != input.calls_by_project.end()) {
      for (const auto& call : calls_it->second) {
        callers_all.insert(call.caller.method.display());
        if (call.caller.source_set == SourceSet::Main)
          callers_main.insert(call.caller.method.display());
      }
    }
    std::size_t total_all = methods.size();
    std::size_t total_main = 0;
    for (const auto& m : methods)
      if (m.source_set == SourceSet::Main) ++total_main;
    if (total_all > 0)
      out.per_project[project] =
          static_cast<double>(callers_all.size()) / static_cast<double>(total_all);
    else
      out.per_project[project] = std::nullopt;
    if (total_main > 0)
      out.per_project_main[project] =
          static_cast<double>(callers_main.size()) / static_cast<double>(total_main);
    else
      out.per_project_main[project] = std::nullopt;
  }

  // per library: for each version, the fraction of its APIs that any project
  // calls; the library takes the maximum over versions with extractable APIs
  std::map<std::string, std::set<std::string>> called_per_version;
  for (const auto& [project, calls] : input.calls_by_project) {
    (void)project;
    for (const auto& call : calls)
      called_per_version[call.callee.version_ref.key()].insert(call.callee.key.display());
  }
  std::map<std::string, std::optional<double>> best_by_lib;
  std::map<std::string, Library> lib_by_key;
  for (const auto& [ver_key, ref] : input.version_refs) {
    const std::string lib_key = ref.library.key();
    lib_by_key.emplace(lib_key, ref.library);
    best_by_lib.emplace(lib_key, std::nullopt);
    auto total_it = input.api_totals.find(ver_key);
    if (total_it == input.api_totals.end() || total_it->second == 0) {
      sink.info("api-total-unavailable", ver_key, "no extractable APIs, version skipped");
      continue;
    }
    std::size_t called = 0;
    auto called_it = called_per_version.find(ver_key);
    if (called_it != called_per_version.end()) called = called_it->second.size();
    double ratio = static_cast<double>(called) / static_cast<double>(total_it->second);
    auto& best = best_by_lib[lib_key];
    if (!best.has_value() || ratio > *best) best = ratio;
  }
  for (const auto& [lib_key, best] : best_by_lib) out.per_library[lib_by_key.at(lib_key)] = best;
  return out;
}

UsoResult usage_outdatedness(const LibraryDependency& dep,
                             const std::vector<VersionRelease>& releases,
                             std::int64_t crawl_date) {
  UsoResult res;
  const VersionString& used = dep.version_ref.version;
  res.version_known = false;
  for (const auto& r : releases) {
    if (version::version_equal(r.version_ref.version, used)) res.version_known = true;
    if (version::version_less(used, r.version_ref.version) && r.release_date < crawl_date)
      ++res.count;
  }
  return res;
}

std::map<std::string, std::vector<std::pair<Library, int>>> multiple_version_stats(
    const std::vector<LibraryDependency>& deps) {
  std::map<std::string, std::map<std::string, std::set<std::string>>> versions;
  std::map<std::string, Library> lib_by_key;
  for (const auto& d : deps) {
    versions[d.project_id][d.version_ref.library.key()].insert(d.version_ref.version.raw);
    lib_by_key.emplace(d.version_ref.library.key(), d.version_ref.library);
  }
  std::map<std::string, std::vector<std::pair<Library, int>>> out;
  for (const auto& [project, by_lib] : versions) {
    for (const auto& [lib_key, vers] : by_lib) {
      if (vers.size() > 1)
        out[project].emplace_back(lib_by_key.at(lib_key), static_cast<int>(vers.size()));
    }
  }
  return out;
}

std::map<std::string, int> snapshot_stats(const std::vector<LibraryDependency>& deps) {
  std::map<std::string, std::set<std::string>> snap;
  for (const auto& d : deps) {
    auto parsed = version::parse_version(d.version_ref.version);
    if (parsed.is_snapshot) snap[d.project_id].insert(d.version_ref.key());
  }
  std::map<std::string, int> out;
  for (const auto& [project, keys] : snap) out[project] = static_cast<int>(keys.size());
  return out;
}

UpdateIntensity update_intensity(const std::vector<LibraryDependency>& current_deps,
                                 const std::vector<VersionUpdate>& updates) {
  UpdateIntensity out;

  // keys that ever saw an update, per project
  std::map<std::string, std::set<std::string>> updated_keys;
  std::map<std::string, std::set<std::string>> updated_libs_per_project;
  for (const auto& u : updates) {
    updated_keys[u.project_id].insert(u.config_file + "\n" + u.library.key());
    updated_libs_per_project[u.project_id].insert(u.library.key());
  }

  std::map<std::string, std::size_t> dep_total;
  std::map<std::string, std::size_t> dep_updated;
  std::map<std::string, std::set<std::string>> projects_per_lib;
  std::map<std::string, Library> lib_by_key;
  for (const auto& d : current_deps) {
    ++dep_total[d.project_id];
    const std::string key = d.config_file + "\n" + d.version_ref.library.key();
    auto it = updated_keys.find(d.project_id);
    if (it != updated_keys.end() && it->second.count(key)) ++dep_updated[d.project_id];
    projects_per_lib[d.version_ref.library.key()].insert(d.project_id);
    lib_by_key.emplace(d.version_ref.library.key(), d.version_ref.library);
  }

  for (const auto& [project, total] : dep_total) {
    if (total == 0) {
      out.per_project[project] = std::nullopt;
      continue;
    }
    std::size_t upd = 0;
    auto it = dep_updated.find(project);
    if (it != dep_updated.end()) upd = it->second;
    out.per_project[project] = static_cast<double>(upd) / static_cast<double>(total);
  }

  for (const auto& [lib_key, projects] : projects_per_lib) {
    std::size_t with_update = 0;
    for (const auto& p : projects) {
      auto it = updated_libs_per_project.find(p);
      if (it != updated_libs_per_project.end() && it->second.count(lib_key)) ++with_update;
    }
    out.per_library[lib_by_key.at(lib_key)] =
        static_cast<double>(with_update) / static_cast<double>(projects.size());
  }
  return out;
}

std::optional<double> update_delay(const VersionUpdate& update,
                                   const std::vector<VersionRelease>& releases) {
  for (const auto& r : releases) {
    if (!version::version_equal(r.version_ref.version, update.ver_to)) continue;
    if (r.snapshot_date_ambiguous) return std::nullopt;
    return static_cast<double>(update.commit.date - r.release_date) / 86400.0;
  }
  return std::nullopt;
}

Distribution emit_distribution(const std::string& metric,
                               const std::vector<std::optional<double>>& values,
                               const std::vector<double>& thresholds) {
  Distribution dist;
  dist.metric = metric;
  dist.thresholds = thresholds;
  dist.counts.assign(thresholds.size() + 1, 0);
  for (const auto& v : values) {
    if (!v.has_value()) {
      ++dist.undefined_count;
      continue;
    }
    // bin index = number of thresholds <= v, so a boundary value lands in
    // the bin it opens
    std::size_t bin =
        static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), *v) -
                                 thresholds.begin());
    ++dist.counts[bin];
  }
  return dist;
}

}  // namespace depscope::metrics
