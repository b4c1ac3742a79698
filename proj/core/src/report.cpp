#include "blochball/report.hpp"

#include <cstdio>

#include <json.hpp>

namespace blochball {

namespace {

using nlohmann::json;

json complex_json(const cplx& c) { return json::array({c.real(), c.imag()}); }

json points_json(const std::vector<CVec>& pts) {
  json out = json::array();
  for (const CVec& p : pts) {
    json jp = json::array();
    for (const cplx& c : p) jp.push_back(complex_json(c));
    out.push_back(jp);
  }
  return out;
}

std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string report_to_json(const verify::VerificationReport& r,
                           bool include_runtime) {
  json j;
  j["command"] = r.theorem;
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  for (const auto& [k, v] : r.str_params) params[k] = v;
  j["params"] = params;
  j["seed"] = r.seed;
  j["version"] = kVersion;
  j["statistics"] = {{"max_ratio", r.stats.max_ratio},
                     {"bound", r.stats.bound},
                     {"margin", r.stats.margin},
                     {"witness", {{"map", r.stats.map_index},
                                  {"points", points_json(r.stats.points)}}}};
  json viols = json::array();
  for (const auto& v : r.violations) {
    viols.push_back({{"what", v.what},
                     {"map", v.map_index},
                     {"points", points_json(v.points)},
                     {"computed", v.computed},
                     {"bound", v.bound},
                     {"excess", v.excess}});
  }
  j["violations"] = viols;
  j["pass"] = r.pass;
  j["applicable"] = r.applicable;
  j["notes"] = r.notes;
  if (include_runtime) j["runtime_seconds"] = r.runtime_seconds;
  return j.dump(2);
}

std::string report_to_csv(const verify::VerificationReport& r) {
  std::string out;
  out += "map";
  for (std::size_t i = 1; i < r.row_columns.size(); ++i)
    out += "," + r.row_columns[i];
  if (r.row_columns.empty()) out = "map";
  out += "\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.map_index);
    for (double v : row.values) out += "," + format17(v);
    out += "\n";
  }
  return out;
}

}  // namespace blochball
