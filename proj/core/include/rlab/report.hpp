#pragma once

#include <string>
#include <vector>

#include "rlab/graph.hpp"
#include "rlab/verify.hpp"

namespace rlab {

struct Report {
  Json meta = Json::object();
  Json graph = Json::object();
  Json config = Json::object();
  std::vector<CheckResult> checks;

  bool all_pass() const;
  std::vector<std::string> failed() const;
};

Json graph_summary(const WeightedGraph& g, const std::string& name);

// Throws InvalidArgument when `checks` is empty.
Report assemble_report(Json meta, Json graph, Json config, std::vector<CheckResult> checks);

Json check_json(const CheckResult& c);
Json report_json(const Report& r);
// Pretty-printed JSON with a trailing newline; identical inputs give identical bytes.
std::string render_report(const Report& r);

// One row per witness; columns are the union of witness keys in first-seen order.
std::string check_csv(const CheckResult& c);

void write_report(const Report& r, const std::string& path);
void write_csv_dir(const Report& r, const std::string& dir);

}  // namespace rlab
