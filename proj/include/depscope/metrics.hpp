#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "depscope/bytecode/api.hpp"
#include "depscope/diagnostics.hpp"
#include "depscope/model.hpp"

namespace depscope::metrics {

struct ProjectUsageProfile {
  std::string project_id;
  int usi1 = 0;                        // distinct libraries declared
  std::optional<double> usi2;          // fraction of methods calling APIs (main+test)
  std::optional<double> usi2_main;     // main-only variant
  std::optional<double> uso;           // mean outdatedness over computable deps
  int multi_version_library_count = 0;
  std::vector<std::pair<Library, int>> multi_version_cases;  // (library, distinct versions)
  int snapshot_count = 0;
};

struct LibraryUsageProfile {
  Library library;
  int usi1 = 0;  // distinct projects using it
  std::optional<double> usi2;
  std::optional<double> uso;
};

struct UpdateProfile {
  std::string subject;  // project id or library key
  std::optional<double> upi;
  std::optional<double> upd_days;
};

// Threshold-style histogram: counts.size() == thresholds.size() + 1 with
// bins (-inf, t1), [t1, t2), ..., [tk, inf). Undefined inputs are counted
// separately and excluded from the bins.
struct Distribution {
  std::string metric;
  std::vector<double> thresholds;
  std::vector<long> counts;
  std::vector<double> annotations;  // optional, one per bin
  long undefined_count = 0;
  long population() const {
    long n = 0;
    for (long c : counts) n += c;
    return n;
  }
};

struct MeanResult {
  std::optional<double> mean;
  std::size_t included = 0;
  std::size_t excluded = 0;
};

MeanResult mean_of(const std::vector<std::optional<double>>& values);

// --- library-level usage intensity (distinct-count semantics) ---
struct LibUsageIntensity {
  std::map<std::string, int> per_project;
  std::map<Library, int> per_library;
};
LibUsageIntensity usage_intensity_lib(const std::vector<LibraryDependency>& deps);

// --- method-level usage intensity ---
struct MethodUsageInput {
  std::map<std::string, std::vector<bytecode::ProjectMethod>> methods_by_project;
  std::map<std::string, std::vector<bytecode::ApiCall>> calls_by_project;
  // total API count per library version; versions absent here had no
  // extractable class files and stay undefined
  std::map<std::string, std::size_t> api_totals;  // key: LibraryVersionRef::key()
  std::map<std::string, LibraryVersionRef> version_refs;  // key -> ref
};
struct MethodUsageResult {
  std::map<std::string, std::optional<double>> per_project;
  std::map<std::string, std::optional<double>> per_project_main;
  std::map<Library, std::optional<double>> per_library;
};
MethodUsageResult usage_intensity_method(const MethodUsageInput& input, DiagnosticSink& sink);

// --- usage outdatedness ---
struct UsoResult {
  int count = 0;
  bool version_known = true;  // declared version found in the release list
};
UsoResult usage_outdatedness(const LibraryDependency& dep,
                             const std::vector<VersionRelease>& releases,
                             std::int64_t crawl_date);

// --- multiple-version and snapshot severity ---
std::map<std::string, std::vector<std::pair<Library, int>>> multiple_version_stats(
    const std::vector<LibraryDependency>& deps);
std::map<std::string, int> snapshot_stats(const std::vector<LibraryDependency>& deps);

// --- update intensity ---
struct UpdateIntensity {
  std::map<std::string, std::optional<double>> per_project;
  std::map<Library, std::optional<double>> per_library;
};
UpdateIntensity update_intensity(const std::vector<LibraryDependency>& current_deps,
                                 const std::vector<VersionUpdate>& updates);

// --- update delay ---
// Signed days between commit date and the target version's release date;
// empty when the release date cannot be resolved.
std::optional<double> update_delay(const VersionUpdate& update,
                                   const std::vector<VersionRelease>& releases);

Distribution emit_distribution(const std::string& metric,
                               const std::vector<std::optional<double>>& values,
                               const std::vector<double>& thresholds);

}  // namespace depscope::metrics
