#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "rab/bench.hpp"

namespace rab::bench {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << kCsvHeader << '\n';
  for (const RunRecord& r : records) {
    os << r.scenario_id << ',' << r.run_index << ',' << format_real(r.snr_db) << ',' << r.rank_Rs
       << ',' << r.method << ',' << r.uncertainty_variant << ',' << format_real(r.objective) << ','
       << format_real(r.output_sinr_db) << ',' << r.iterations << ',' << format_real(r.wall_ms)
       << ',' << r.status << ',' << r.seed << '\n';
  }
}

void write_reports(std::ostream& os, const std::vector<CheckReport>& reports) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const CheckReport& r : reports) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["result"] = r.skipped ? "skipped" : r.pass ? "pass" : "fail";
    j["samples"] = r.samples;
    j["worst_violation"] = r.worst_violation;
    j["tolerance"] = r.tolerance;
    if (!r.note.empty()) j["note"] = r.note;
    if (!r.witnesses.empty()) j["witnesses"] = r.witnesses;
    out.push_back(std::move(j));
  }
  os << out.dump(2) << '\n';
}

}  // namespace rab::bench
