#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rlab/graph.hpp"

namespace rlab {

// One experiment. Read from flat `key = value` text; command-line flags are
// applied afterwards through set_option and therefore win.
struct RunConfig {
  std::string name;
  std::string graph;      // graph file
  std::string generator;  // or a generator spec
  int m = 0;              // 0: auto
  std::string metric_mode = "half";  // half | adaptive | quasi
  std::string metric;     // metric file
  bool auto_metric = false;
  std::size_t landmarks = 64;

  std::vector<Vertex> centers;
  std::optional<std::array<int, 3>> center_coords;  // generator coordinates
  std::vector<double> radii;
  std::vector<double> harnack_radii;
  std::vector<double> parabolic_radii;
  std::vector<double> hop_radii;
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> tail_times;
  std::vector<std::size_t> ledif_times = {1, 2, 4, 8, 16};

  double safe_factor = 2.0;
  double window = 16.0;
  double harnack_window = 2.0;
  double q = 0.25;
  double delta = 0.25;
  std::optional<double> drift_max;
  std::optional<double> negative_drift_min;
  int pdiff_k = 4;
  std::size_t pdiff_n_lo = 4;
  std::size_t pdiff_n_hi = 256;
  std::size_t mc_trials = 100000;
  std::optional<std::uint64_t> seed;

  std::vector<std::string> suites = {"all"};
  std::string out;
  std::string csv_dir;
};

// Unknown keys and malformed values throw InvalidArgument.
void set_option(RunConfig& cfg, const std::string& key, const std::string& value);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::ordered_json config_json(const RunConfig& cfg);

// Smallest m with m >= d_s / 2, d_s from the return probabilities at x.
int auto_order(const WeightedGraph& g, Vertex x);

}  // namespace rlab
