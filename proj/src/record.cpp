#include "schatten/record.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef SCHATTEN_VERSION
#define SCHATTEN_VERSION "unknown"
#endif

namespace schatten {

using nlohmann::json;

namespace {

std::string provenance_header(const Provenance& prov) {
  std::string out;
  for (const auto& [k, v] : prov) out += "," + k;
  return out;
}

std::string provenance_values(const Provenance& prov) {
  std::string out;
  for (const auto& [k, v] : prov) out += "," + v;
  return out;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number_cell(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) return "";
  return format_double(j[key].get<double>());
}

}  // namespace

std::string version_string() { return SCHATTEN_VERSION; }

json to_json(const RunRecord& rec) {
  json config = json::object();
  for (const auto& [k, v] : rec.config) config[k] = v;
  return json{{"command", rec.command},   {"config", config},         {"seed", rec.seed},
              {"version", rec.version},   {"wall_time", rec.wall_time}, {"outputs", rec.outputs},
              {"status", rec.status},     {"message", rec.message},   {"results", rec.results}};
}

RunRecord record_from_json(const json& j) {
  RunRecord rec;
  try {
    rec.command = j.at("command").get<std::string>();
    for (const auto& [k, v] : j.at("config").items()) rec.config.emplace_back(k, v.get<std::string>());
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.version = j.at("version").get<std::string>();
    rec.wall_time = j.at("wall_time").get<double>();
    rec.outputs = j.at("outputs").get<std::vector<std::string>>();
    rec.status = j.at("status").get<std::string>();
    rec.message = j.value("message", "");
    rec.results = j.at("results");
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed run record: ") + e.what());
  }
  if (!rec.results.is_object()) throw std::invalid_argument("malformed run record: results must be an object");
  return rec;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_record(const std::string& path, const RunRecord& rec) { write_text(path, to_json(rec).dump(2) + "\n"); }

RunRecord read_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open run record " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed run record " + path + ": " + e.what());
  }
  return record_from_json(j);
}

json moment_table_json(const MomentTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) rows.push_back({{"r", r.r}, {"value", r.value}, {"stderr", r.std_error}});
  return json{{"rows", rows},
              {"samples", table.samples},
              {"seed", table.seed},
              {"slope", table.fit.slope},
              {"intercept", table.fit.intercept},
              {"ci_low", table.fit.ci_low},
              {"ci_high", table.fit.ci_high},
              {"monotone", moments_monotone(table)}};
}

std::string trajectory_csv(const hartree::HartreeRun& run, const Provenance& prov) {
  const bool with_q = run.q.size() == run.times.size();
  std::ostringstream out;
  out << "t" << (with_q ? ",hs_norm" : "") << ",rho_l2" << provenance_header(prov) << "\n";
  const std::string tail = provenance_values(prov);
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    out << format_double(run.times[k]);
    if (with_q) out << "," << format_double(hilbert_schmidt_norm(run.q[k]));
    out << "," << format_double(l2_norm(run.rho[k])) << tail << "\n";
  }
  return out.str();
}

std::string deltas_csv(const std::vector<double>& deltas, const Provenance& prov) {
  std::ostringstream out;
  out << "iteration,delta" << provenance_header(prov) << "\n";
  const std::string tail = provenance_values(prov);
  for (std::size_t i = 0; i < deltas.size(); ++i) out << i + 1 << "," << format_double(deltas[i]) << tail << "\n";
  return out.str();
}

std::string ladder_csv(const hartree::ScatteringReport& rep, const Provenance& prov) {
  std::ostringstream out;
  out << "t_from,t_to,distance,alpha" << provenance_header(prov) << "\n";
  const std::string tail = provenance_values(prov);
  for (const auto& p : rep.ladder)
    out << format_double(p.t_from) << "," << format_double(p.t_to) << "," << format_double(p.distance) << ","
        << format_double(rep.alpha) << tail << "\n";
  return out.str();
}

Report build_report(const std::vector<RunRecord>& records, const std::vector<std::string>& sources) {
  if (records.empty()) throw std::invalid_argument("report: at least one run record is required");
  std::ostringstream csv;
  std::ostringstream strichartz;
  std::ostringstream hartree;
  std::ostringstream other;
  csv << "section,source,command,seed,status,samples,slope,slope_refit,ci_high,T,dt,iterations,residual,c0,"
         "worst_ratio,verdict\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const json& res = rec.results;
    const std::string source = i < sources.size() ? sources[i] : std::to_string(i);
    const std::string section = rec.command.rfind("strichartz", 0) == 0 ? "strichartz"
                                : rec.command.rfind("hartree", 0) == 0    ? "hartree"
                                                                          : "other";
    std::string samples, slope, refit, ci_high;
    if (res.contains("moments")) {
      const json& m = res["moments"];
      std::vector<double> r, v;
      try {
        for (const auto& row : m.at("rows")) {
          r.push_back(row.at("r").get<double>());
          v.push_back(row.at("value").get<double>());
        }
        const double recorded = m.at("slope").get<double>();
        const double again = log_log_fit(r, v).first;
        if (std::abs(again - recorded) > 1e-12 * std::max(1.0, std::abs(recorded)))
          throw std::invalid_argument("report: recorded slope " + format_double(recorded) +
                                      " disagrees with the refit " + format_double(again) + " in " + source);
        samples = std::to_string(m.at("samples").get<std::size_t>());
        slope = format_double(recorded);
        refit = format_double(again);
        ci_high = format_double(m.at("ci_high").get<double>());
      } catch (const json::exception& e) {
        throw std::invalid_argument("malformed run record " + source + ": " + e.what());
      }
    }
    const std::string verdict = res.contains("verdict") && res["verdict"].is_string() ? res["verdict"].get<std::string>() : "";
    csv << section << "," << csv_cell(source) << "," << csv_cell(rec.command) << "," << rec.seed << "," << rec.status
        << "," << samples << "," << slope << "," << refit << "," << ci_high << "," << number_cell(res, "T") << ","
        << number_cell(res, "dt") << "," << number_cell(res, "iterations") << "," << number_cell(res, "residual")
        << "," << number_cell(res, "c0") << "," << number_cell(res, "worst_ratio") << "," << csv_cell(verdict)
        << "\n";

    auto& text = section == "strichartz" ? strichartz : section == "hartree" ? hartree : other;
    text << "  " << rec.command << " [" << rec.status << "] seed " << rec.seed;
    if (!slope.empty()) text << ", M " << samples << ", slope " << slope << " (95% upper " << ci_high << ")";
    if (res.contains("T")) text << ", T " << number_cell(res, "T");
    if (res.contains("iterations")) text << ", iterations " << number_cell(res, "iterations");
    if (res.contains("residual")) text << ", residual " << number_cell(res, "residual");
    if (res.contains("c0")) text << ", c0 " << number_cell(res, "c0");
    if (!verdict.empty()) text << ", " << verdict;
    if (!rec.message.empty()) text << ": " << rec.message;
    text << "  (" << source << ")\n";
  }
  std::string summary;
  if (!strichartz.str().empty()) summary += "strichartz\n" + strichartz.str();
  if (!hartree.str().empty()) summary += "hartree\n" + hartree.str();
  if (!other.str().empty()) summary += "other\n" + other.str();
  return {csv.str(), summary};
}

}  // namespace schatten
