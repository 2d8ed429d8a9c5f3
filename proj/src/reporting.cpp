#include "depscope/reporting.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace depscope::reporting {

using nlohmann::json;

std::string report_timestamp() {
  if (const char* pinned = std::getenv("DEPSCOPE_REPORT_TIMESTAMP")) return pinned;
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_report(const std::string& path, const std::string& kind, const json& body) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["generated_at"] = report_timestamp();
  doc[kind] = body;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << doc.dump(2) << '\n';
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

const char* severity_name(Severity s) {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "warning";
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  auto emit = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(row[i]);
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
}

json to_json(const Diagnostic& d) {
  return json{{"severity", severity_name(d.severity)},
              {"code", d.code},
              {"context", d.context},
              {"message", d.message}};
}

json to_json(const DiagnosticSink& sink) {
  json arr = json::array();
  for (const auto& d : sink.items()) arr.push_back(to_json(d));
  return arr;
}

json to_json(const LibraryDependency& dep) {
  return json{{"project", dep.project_id},
              {"config_file", dep.config_file},
              {"commit", dep.commit.id},
              {"commit_date", dep.commit.date},
              {"group", dep.version_ref.library.group},
              {"name", dep.version_ref.library.name},
              {"version", dep.version_ref.version.raw},
              {"source_set", to_string(dep.source_set)},
              {"optional", dep.optional_flag}};
}

json to_json(const VersionUpdate& update) {
  return json{{"project", update.project_id},
              {"config_file", update.config_file},
              {"commit", update.commit.id},
              {"commit_date", update.commit.date},
              {"group", update.library.group},
              {"name", update.library.name},
              {"from", update.ver_from.raw},
              {"to", update.ver_to.raw},
              {"direction", version::to_string(update.classification.direction)},
              {"magnitude", version::to_string(update.classification.magnitude)}};
}

json to_json(const metrics::Distribution& dist) {
  json counts = json::array();
  for (long c : dist.counts) counts.push_back(c);
  json thresholds = json::array();
  for (double t : dist.thresholds) thresholds.push_back(t);
  json out{{"metric", dist.metric},
           {"thresholds", thresholds},
           {"counts", counts},
           {"undefined_count", dist.undefined_count},
           {"population", dist.population()}};
  if (!dist.annotations.empty()) {
    json ann = json::array();
    for (double a : dist.annotations) ann.push_back(a);
    out["annotations"] = ann;
  }
  return out;
}

namespace {

json pair_json(const alert::CountPair& p) {
  return json{{"hit", p.hit}, {"total", p.total}, {"display", p.render()}};
}

}  // namespace

json to_json(const alert::RiskReport& report) {
  json per_api = json::array();
  for (const auto& d : report.per_api) {
    per_api.push_back(json{{"api", d.api.key.display()},
                           {"reaching_bugs", d.reaching_bugs},
                           {"bug_ids", d.bug_ids},
                           {"sites_main", d.sites_main},
                           {"sites_test", d.sites_test},
                           {"sites_total", d.sites_total()}});
  }
  return json{{"project", report.project_id},
              {"library_version", report.library_version.key()},
              {"safe", report.safe()},
              {"nb", pair_json(report.nb)},
              {"na", pair_json(report.na)},
              {"nc", pair_json(report.nc)},
              {"nc_buggy_main", report.nc_buggy_main},
              {"nc_buggy_test", report.nc_buggy_test},
              {"per_api", per_api}};
}

json to_json(const alert::EffortResult& result) {
  json candidates = json::array();
  for (const auto& r : result.reports) {
    json entry{{"candidate", r.candidate_version.raw}, {"skipped", r.skipped}};
    if (r.skipped) {
      entry["reason"] =
          r.reason == alert::SkipReason::StillBuggy ? "still_buggy" : "artifact_unavailable";
    } else {
      entry["nad"] = r.nad;
      entry["nac"] = r.nac;
      entry["ncd"] = r.ncd;
      entry["ncc"] = r.ncc;
    }
    candidates.push_back(entry);
  }
  return json{{"sl", result.sl},
              {"empty_candidate_set", result.empty_candidate_set},
              {"candidates", candidates}};
}

std::string render_alert_table(const std::vector<AlertRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "P" << std::setw(32) << "BL" << std::setw(10) << "NB"
      << std::setw(10) << "NA" << std::setw(12) << "NC" << std::setw(6) << "SL" << std::setw(6)
      << "NAD" << std::setw(6) << "NAC" << std::setw(6) << "NCD" << std::setw(6) << "NCC" << '\n';
  for (const auto& row : rows) {
    // effort columns show the first suggested candidate, matching the
    // one-line-per-project table shape
    const alert::EffortReport* suggested = nullptr;
    for (const auto& r : row.effort.reports) {
      if (!r.skipped) {
        suggested = &r;
        break;
      }
    }
    out << std::left << std::setw(16) << row.project << std::setw(32) << row.library_version
        << std::setw(10) << row.risk.nb.render() << std::setw(10) << row.risk.na.render()
        << std::setw(12) << row.risk.nc.render() << std::setw(6) << row.effort.sl;
    if (suggested) {
      out << std::setw(6) << suggested->nad << std::setw(6) << suggested->nac << std::setw(6)
          << suggested->ncd << std::setw(6) << suggested->ncc;
    } else {
      out << std::setw(6) << "-" << std::setw(6) << "-" << std::setw(6) << "-" << std::setw(6)
          << "-";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace depscope::reporting
