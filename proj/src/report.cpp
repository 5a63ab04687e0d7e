#include "fdbss/report.hpp"

#include <fstream>
#include <sstream>

#include "fdbss/error.hpp"

namespace fdbss {

void SeparationReport::validate() const {
  if (sources < 0) throw InvalidArgument("negative source count");
  if (per_source_sir_db.size() != per_source_sdr_db.size())
    throw InvalidArgument("sir and sdr vectors differ in length");
  if (!per_source_sir_db.empty() && per_source_sir_db.size() != static_cast<std::size_t>(sources))
    throw InvalidArgument("metric vectors must have one entry per source");
  for (const auto& [name, ms] : stage_times_ms)
    if (!(ms >= 0.0)) throw InvalidArgument("stage time for '" + name + "' is negative");
}

nlohmann::ordered_json report_to_json(const SeparationReport& report) {
  report.validate();
  nlohmann::ordered_json j;
  j["sources"] = report.sources;
  j["sir_db"] = report.per_source_sir_db;
  j["sdr_db"] = report.per_source_sdr_db;
  nlohmann::ordered_json stages = nlohmann::ordered_json::object();
  for (const auto& [name, ms] : report.stage_times_ms) stages[name] = ms;
  j["stages"] = stages;
  j["config"] = report.config_snapshot;
  return j;
}

SeparationReport report_from_json(const nlohmann::ordered_json& j) {
  try {
    SeparationReport r;
    r.sources = j.at("sources").get<int>();
    r.per_source_sir_db = j.at("sir_db").get<std::vector<double>>();
    r.per_source_sdr_db = j.at("sdr_db").get<std::vector<double>>();
    for (const auto& [name, ms] : j.at("stages").items()) r.stage_times_ms[name] = ms.get<double>();
    r.config_snapshot = j.at("config");
    r.validate();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

std::string serialize_report(const SeparationReport& report) { return report_to_json(report).dump(2) + "\n"; }

void write_report(const std::filesystem::path& path, const SeparationReport& report) {
  const std::string text = serialize_report(report);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

SeparationReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return report_from_json(nlohmann::ordered_json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace fdbss
