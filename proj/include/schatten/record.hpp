#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "schatten/hartree.hpp"
#include "schatten/norms.hpp"

namespace schatten {

using Provenance = std::vector<std::pair<std::string, std::string>>;

/// One record per experiment invocation.
struct RunRecord {
  std::string command;
  Provenance config;  // full echo, section.key -> value
  std::uint64_t seed = 0;
  std::string version;
  double wall_time = 0.0;  // seconds
  std::vector<std::string> outputs;
  std::string status;   // "ok", "validation-error", "numeric-failure"
  std::string message;  // error text when status != "ok"
  nlohmann::json results = nlohmann::json::object();
};

std::string version_string();

nlohmann::json to_json(const RunRecord& rec);
/// Throws std::invalid_argument on a malformed record.
RunRecord record_from_json(const nlohmann::json& j);
void write_record(const std::string& path, const RunRecord& rec);
RunRecord read_record(const std::string& path);

void write_text(const std::string& path, const std::string& text);

/// Moment rows and fit as JSON (kept in records so the report can refit).
nlohmann::json moment_table_json(const MomentTable& table);

/// t, ||Q(t)||_{S^2} (when Q is present), ||rho(t)||_{L^2}, then provenance columns.
std::string trajectory_csv(const hartree::HartreeRun& run, const Provenance& prov);
std::string deltas_csv(const std::vector<double>& deltas, const Provenance& prov);
std::string ladder_csv(const hartree::ScatteringReport& rep, const Provenance& prov);

struct Report {
  std::string csv;
  std::string summary;
};
/// One row per record; slopes are refitted from the stored moment rows and must agree with the
/// recorded slope to 1e-12.
Report build_report(const std::vector<RunRecord>& records, const std::vector<std::string>& sources);

}  // namespace schatten
