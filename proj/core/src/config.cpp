#include "rlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rlab/error.hpp"
#include "rlab/scaling.hpp"
#include "rlab/walk.hpp"

namespace rlab {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || !std::isfinite(d)) throw InvalidArgument(key + ": not a number: '" + v + "'");
  return d;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw InvalidArgument(key + ": not a nonnegative integer: '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw InvalidArgument(key + ": out of range: '" + v + "'");
  }
}

double positive(const std::string& key, const std::string& v) {
  double d = to_double(key, v);
  if (!(d > 0)) throw InvalidArgument(key + " must be positive");
  return d;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidArgument(key + ": expected true or false");
}

template <class T, class Fn>
std::vector<T> list(const std::string& v, Fn fn) {
  std::vector<T> out;
  for (const auto& s : split(v)) out.push_back(fn(s));
  return out;
}

}  // namespace

void set_option(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto pos_list = [&](const std::string& s) { return positive(key, s); };
  auto time_list = [&](const std::string& s) {
    auto t = to_uint(key, s);
    if (t == 0) throw InvalidArgument(key + ": times must be positive");
    return static_cast<std::size_t>(t);
  };
  if (key == "name") {
    c.name = v;
  } else if (key == "graph") {
    c.graph = v;
  } else if (key == "generator") {
    c.generator = v;
  } else if (key == "m") {
    if (v == "auto") {
      c.m = 0;
    } else {
      auto m = to_uint(key, v);
      if (m < 1 || m > 8) throw InvalidArgument("m must be auto or in [1, 8]");
      c.m = static_cast<int>(m);
    }
  } else if (key == "metric_mode") {
    if (v != "half" && v != "adaptive" && v != "quasi")
      throw InvalidArgument("metric_mode must be half, adaptive or quasi");
    c.metric_mode = v;
  } else if (key == "metric") {
    c.metric = v;
  } else if (key == "auto") {
    c.auto_metric = to_bool(key, v);
  } else if (key == "landmarks") {
    auto k = to_uint(key, v);
    if (k < 1 || k > kMaxAllPairsVertices) throw InvalidArgument("landmarks must lie in [1, 4000]");
    c.landmarks = k;
  } else if (key == "centers") {
    c.centers = list<Vertex>(v, [&](const std::string& s) {
      auto x = to_uint(key, s);
      if (x >= kMaxVertices) throw InvalidArgument("center id out of range");
      return static_cast<Vertex>(x);
    });
  } else if (key == "center_coords") {
    auto parts = split(v);
    if (parts.empty() || parts.size() > 3) throw InvalidArgument("center_coords takes 1 to 3 integers");
    std::array<int, 3> a{0, 0, 0};
    for (std::size_t i = 0; i < parts.size(); ++i) a[i] = static_cast<int>(to_uint(key, parts[i]));
    c.center_coords = a;
  } else if (key == "radii") {
    c.radii = list<double>(v, pos_list);
  } else if (key == "harnack_radii") {
    c.harnack_radii = list<double>(v, pos_list);
  } else if (key == "parabolic_radii") {
    c.parabolic_radii = list<double>(v, pos_list);
  } else if (key == "hop_radii") {
    c.hop_radii = list<double>(v, pos_list);
  } else if (key == "n_grid") {
    c.n_grid = list<std::size_t>(v, time_list);
    std::sort(c.n_grid.begin(), c.n_grid.end());
  } else if (key == "tail_times") {
    c.tail_times = list<std::size_t>(v, time_list);
  } else if (key == "ledif_times") {
    c.ledif_times = list<std::size_t>(v, time_list);
  } else if (key == "safe_factor") {
    c.safe_factor = to_double(key, v);
    if (c.safe_factor < 1.0) throw InvalidArgument("safe_factor must be >= 1");
  } else if (key == "window") {
    c.window = to_double(key, v);
    if (c.window < 1.0) throw InvalidArgument("window must be >= 1");
  } else if (key == "harnack_window") {
    c.harnack_window = to_double(key, v);
    if (c.harnack_window < 1.0) throw InvalidArgument("harnack_window must be >= 1");
  } else if (key == "q") {
    c.q = to_double(key, v);
    if (!(c.q > 0 && c.q < 1)) throw InvalidArgument("q must lie in (0, 1)");
  } else if (key == "delta") {
    c.delta = to_double(key, v);
    if (!(c.delta > 0 && c.delta <= 1)) throw InvalidArgument("delta must lie in (0, 1]");
  } else if (key == "drift_max") {
    c.drift_max = positive(key, v);
  } else if (key == "negative_drift_min") {
    c.negative_drift_min = positive(key, v);
  } else if (key == "pdiff_k") {
    auto k = to_uint(key, v);
    if (k > 8) throw InvalidArgument("pdiff_k must lie in [0, 8]");
    c.pdiff_k = static_cast<int>(k);
  } else if (key == "pdiff_n_lo") {
    c.pdiff_n_lo = time_list(v);
  } else if (key == "pdiff_n_hi") {
    c.pdiff_n_hi = time_list(v);
  } else if (key == "mc_trials") {
    c.mc_trials = to_uint(key, v);
    if (c.mc_trials > 100'000'000) throw InvalidArgument("mc_trials must be <= 1e8");
  } else if (key == "seed") {
    c.seed = to_uint(key, v);
  } else if (key == "suites" || key == "suite") {
    auto s = split(v);
    if (s.empty()) throw InvalidArgument("empty suite list");
    for (const auto& name : s)
      if (name != "einstein" && name != "hke" && name != "harnack" && name != "exit" && name != "all")
        throw InvalidArgument("unknown suite '" + name + "'");
    c.suites = s;
  } else if (key == "out") {
    c.out = v;
  } else if (key == "csv_dir") {
    c.csv_dir = v;
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
    try {
      set_option(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  if (!c.graph.empty()) j["graph"] = c.graph;
  if (!c.generator.empty()) j["generator"] = c.generator;
  j["m"] = c.m == 0 ? nlohmann::ordered_json("auto") : nlohmann::ordered_json(c.m);
  j["metric_mode"] = c.metric_mode;
  if (!c.metric.empty()) j["metric"] = c.metric;
  j["auto"] = c.auto_metric;
  j["landmarks"] = c.landmarks;
  if (!c.centers.empty()) j["centers"] = c.centers;
  if (c.center_coords) j["center_coords"] = *c.center_coords;
  if (!c.radii.empty()) j["radii"] = c.radii;
  if (!c.harnack_radii.empty()) j["harnack_radii"] = c.harnack_radii;
  if (!c.parabolic_radii.empty()) j["parabolic_radii"] = c.parabolic_radii;
  if (!c.hop_radii.empty()) j["hop_radii"] = c.hop_radii;
  if (!c.n_grid.empty()) j["n_grid"] = c.n_grid;
  if (!c.tail_times.empty()) j["tail_times"] = c.tail_times;
  j["ledif_times"] = c.ledif_times;
  j["safe_factor"] = c.safe_factor;
  j["window"] = c.window;
  j["harnack_window"] = c.harnack_window;
  j["q"] = c.q;
  j["delta"] = c.delta;
  if (c.drift_max) j["drift_max"] = *c.drift_max;
  if (c.negative_drift_min) j["negative_drift_min"] = *c.negative_drift_min;
  j["pdiff_k"] = c.pdiff_k;
  j["pdiff_n_lo"] = c.pdiff_n_lo;
  j["pdiff_n_hi"] = c.pdiff_n_hi;
  j["mc_trials"] = c.mc_trials;
  if (c.seed) j["seed"] = *c.seed;
  j["suites"] = c.suites;
  return j;
}

int auto_order(const WeightedGraph& g, Vertex x) {
  const double total = g.total_measure();
  const std::size_t cap = 4096;
  auto diag = diagonal_series(g, x, 2 * cap);
  std::vector<double> ns, ps;
  for (std::size_t n = 4; n <= cap; n *= 2) {
    double p = diag[2 * n];
    if (p * total < 4.0) break;
    ns.push_back(static_cast<double>(n));
    ps.push_back(p);
  }
  if (ns.size() < 2) return 1;
  double ds = -2.0 * loglog_slope(ns, ps);
  return std::max(1, static_cast<int>(std::ceil(ds / 2.0 - 1e-9)));
}

}  // namespace rlab
