#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace fdbss {

struct SeparationReport {
  int sources = 0;
  // Either both empty (run without references) or both of length `sources`.
  std::vector<double> per_source_sir_db;
  std::vector<double> per_source_sdr_db;
  std::map<std::string, double> stage_times_ms;
  nlohmann::ordered_json config_snapshot = nlohmann::ordered_json::object();

  void validate() const;
};

/// Canonical form: {"sources", "sir_db", "sdr_db", "stages", "config"} in that
/// order, stages sorted by name.
nlohmann::ordered_json report_to_json(const SeparationReport& report);
SeparationReport report_from_json(const nlohmann::ordered_json& j);

std::string serialize_report(const SeparationReport& report);
void write_report(const std::filesystem::path& path, const SeparationReport& report);
SeparationReport read_report(const std::filesystem::path& path);

}  // namespace fdbss
