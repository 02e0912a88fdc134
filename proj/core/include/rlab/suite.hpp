#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rlab/config.hpp"
#include "rlab/graph.hpp"
#include "rlab/metric.hpp"
#include "rlab/report.hpp"

namespace rlab {

struct LoadedGraph {
  WeightedGraph graph;
  std::string name;
  std::vector<std::array<int, 3>> coords;  // empty for graph files
};

// From cfg.graph or cfg.generator (exactly one must be set).
LoadedGraph load_input(const RunConfig& cfg);

// Vertices the scans centre on: explicit ids, generator coordinates, or the
// double-sweep centre.
std::vector<Vertex> resolve_centers(const RunConfig& cfg, const LoadedGraph& in);

// Dyadic ladder down from the largest safe radius to the point where B(x,2r)
// is {x}; ascending.
std::vector<double> default_radii(const WeightedGraph& g, const DistanceSource& rho, Vertex x,
                                  double safe_factor);

// R_m table plus the distance the scans use.
struct MetricContext {
  int order = 1;
  double exponent = 0.5;
  std::shared_ptr<const QuasiMetricTable> table;
  std::shared_ptr<const DistanceSource> rho;
  std::optional<Metrization> metrization;  // exact all-pairs metric, V <= 1500
};

// Uses cfg.metric when given; otherwise requires cfg.auto_metric.
MetricContext build_metric(const RunConfig& cfg, const WeightedGraph& g, int m);

using CheckObserver = std::function<void(const CheckResult&)>;

// Runs the configured suites. Check-level failures (including scans with no
// admissible grid point) become failing CheckResults; capacity and input errors
// propagate.
Report run_verify(const RunConfig& cfg, const LoadedGraph& in, const CheckObserver& observer = {});

}  // namespace rlab
