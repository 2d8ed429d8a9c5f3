#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "depscope/alert.hpp"
#include "depscope/diagnostics.hpp"
#include "depscope/metrics.hpp"
#include "depscope/model.hpp"

namespace depscope::reporting {

constexpr int kSchemaVersion = 1;

// RFC 3339 UTC timestamp for the report header; honors the
// DEPSCOPE_REPORT_TIMESTAMP override so runs can be reproduced byte for byte.
std::string report_timestamp();

// Wraps `body` with {schema_version, generated_at, <kind>: body} and writes
// pretty-printed JSON.
void write_report(const std::string& path, const std::string& kind, const nlohmann::json& body);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

nlohmann::json to_json(const Diagnostic& d);
nlohmann::json to_json(const DiagnosticSink& sink);
nlohmann::json to_json(const LibraryDependency& dep);
nlohmann::json to_json(const VersionUpdate& update);
nlohmann::json to_json(const metrics::Distribution& dist);
nlohmann::json to_json(const alert::RiskReport& report);
nlohmann::json to_json(const alert::EffortResult& result);

// One table row in the style "P  BL  NB  NA  NC | SL  NAD NAC NCD NCC".
struct AlertRow {
  std::string project;
  std::string library_version;
  alert::RiskReport risk;
  alert::EffortResult effort;
};
std::string render_alert_table(const std::vector<AlertRow>& rows);

}  // namespace depscope::reporting
