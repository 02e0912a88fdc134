#include "rlab/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rlab/error.hpp"

namespace rlab {

bool Report::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<std::string> Report::failed() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c.name);
  return out;
}

Json graph_summary(const WeightedGraph& g, const std::string& name) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(g.hash()));
  return {{"name", name}, {"vertices", g.vertex_count()}, {"edges", g.edge_count()},
          {"hash", hash}, {"p0", validate_p0(g)}, {"total_measure", g.total_measure()},
          {"boundary", g.boundary().size()}};
}

Report assemble_report(Json meta, Json graph, Json config, std::vector<CheckResult> checks) {
  if (checks.empty()) throw InvalidArgument("a report needs at least one check");
  Report r;
  r.meta = std::move(meta);
  r.graph = std::move(graph);
  r.config = std::move(config);
  r.checks = std::move(checks);
  return r;
}

Json check_json(const CheckResult& c) {
  Json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["params"] = c.params;
  if (!c.tolerance.empty()) j["tolerance"] = c.tolerance;
  j["constants"] = c.constants;
  if (!c.note.empty()) j["note"] = c.note;
  j["witnesses"] = c.witnesses;
  return j;
}

Json report_json(const Report& r) {
  Json j;
  j["meta"] = r.meta;
  j["graph"] = r.graph;
  j["config"] = r.config;
  Json summary = {{"all_pass", r.all_pass()}, {"checks", r.checks.size()}, {"passed", r.checks.size() - r.failed().size()},
                  {"failed", r.failed()}};
  j["summary"] = summary;
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  j["checks"] = checks;
  return j;
}

std::string render_report(const Report& r) { return report_json(r).dump(2) + "\n"; }

namespace {

std::string csv_cell(const Json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

std::string check_csv(const CheckResult& c) {
  std::vector<std::string> cols;
  for (const auto& w : c.witnesses)
    for (const auto& [k, v] : w.items())
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const auto& w : c.witnesses) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ",";
      if (w.contains(cols[i])) out += csv_cell(w[cols[i]]);
    }
    out += "\n";
  }
  return out;
}

void write_report(const Report& r, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write report '" + path + "'");
  f << render_report(r);
}

void write_csv_dir(const Report& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    char prefix[8];
    std::snprintf(prefix, sizeof prefix, "%02zu_", i);
    std::ofstream f(std::filesystem::path(dir) / (prefix + r.checks[i].name + ".csv"), std::ios::binary);
    if (!f) throw InvalidArgument("cannot write CSV into '" + dir + "'");
    f << check_csv(r.checks[i]);
  }
}

}  // namespace rlab
