// rlab: generate graphs, build R_m metrics, run verification suites, dump heat kernels.
//
// Exit codes: 0 success / all checks pass, 1 some check failed, 2 usage,
// input or resource error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlab/config.hpp"
#include "rlab/error.hpp"
#include "rlab/generators.hpp"
#include "rlab/graph.hpp"
#include "rlab/metric.hpp"
#include "rlab/report.hpp"
#include "rlab/suite.hpp"
#include "rlab/walk.hpp"

namespace {

constexpr int kFail = 1;
constexpr int kUsage = 2;

struct GenArgs {
  std::string family;
  int dim = 1, side = 0, level = -1;
  double exponent = 0.0;
  bool has_exponent = false;
  std::string branching, weights = "1";
  std::string out;
};

struct MetricArgs {
  std::string graph, out, mode = "half", pair;
  int m = 1;
};

struct VerifyArgs {
  std::string config, graph, generator, metric, suite, out, csv_dir, m;
  std::vector<std::string> set;
  bool auto_metric = false, timings = false;
  std::string seed;
};

struct HeatArgs {
  std::string graph, generator, source = "center", out;
  std::size_t steps = 0;
};

std::string slashes(std::string s) {
  for (auto& c : s)
    if (c == ',') c = '/';
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw rlab::InvalidArgument("cannot write '" + path + "'");
  f << text;
}

int cmd_gen(const GenArgs& a) {
  std::ostringstream spec;
  if (a.family == "lattice") {
    if (a.side <= 0) throw rlab::InvalidArgument("lattice needs --side");
    spec << "lattice:dim=" << a.dim << ",side=" << a.side;
    if (a.has_exponent) spec << ",exponent=" << a.exponent;
  } else if (a.family == "gasket") {
    if (a.level < 0) throw rlab::InvalidArgument("gasket needs --level");
    spec << "gasket:level=" << a.level;
  } else if (a.family == "tree") {
    if (a.branching.empty()) throw rlab::InvalidArgument("tree needs --branching");
    spec << "tree:branching=" << slashes(a.branching) << ",weights=" << slashes(a.weights);
  } else {
    throw rlab::InvalidArgument("unknown family '" + a.family + "' (lattice, gasket, tree)");
  }
  auto gen = rlab::generate_from_spec(spec.str());
  std::string text = rlab::format_graph(gen.graph);
  if (a.out.empty()) {
    std::cout << text;
    std::cerr << "vertices " << gen.graph.vertex_count() << " edges " << gen.graph.edge_count() << "\n";
  } else {
    write_text(a.out, text);
    std::cout << "vertices " << gen.graph.vertex_count() << " edges " << gen.graph.edge_count() << "\n";
  }
  return 0;
}

int cmd_metric(const MetricArgs& a) {
  auto g = rlab::load_graph(a.graph);
  const std::size_t n = g.vertex_count();
  if (a.mode != "half" && a.mode != "adaptive" && a.mode != "quasi")
    throw rlab::InvalidArgument("--mode must be half, adaptive or quasi");
  if (a.mode == "quasi" && n > rlab::kMaxAllPairsVertices)
    throw rlab::CapacityError("V = " + std::to_string(n) + " exceeds the all-pairs cap of " +
                              std::to_string(rlab::kMaxAllPairsVertices) +
                              "; use landmark mode (verify --auto with landmarks = k)");
  if (a.mode != "quasi" && n > rlab::kMaxExactMetricVertices)
    throw rlab::CapacityError("V = " + std::to_string(n) + " exceeds the metrization cap of " +
                              std::to_string(rlab::kMaxExactMetricVertices) +
                              "; use landmark mode (verify --auto computes rows on demand)");
  auto table = rlab::rm_matrix(g, a.m);
  auto K = rlab::quasi_constant(table);
  std::printf("vertices %zu\nm %d\nK %.12g\n", n, a.m, K.value);

  rlab::MetricTable metric;
  if (a.mode == "quasi") {
    std::vector<double> v(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) v[i * n + j] = table.at(static_cast<rlab::Vertex>(i), static_cast<rlab::Vertex>(j));
    metric = rlab::MetricTable(n, 0.0, std::move(v));
    std::printf("p 0 (quasi-metric R_m stored)\n");
  } else {
    double p = a.mode == "half" ? 0.5 : rlab::adaptive_exponent(K.value);
    auto mz = rlab::metrize(table, p);
    std::printf("p %.12g\nc %.12g\nC %.12g\n", p, mz.c, mz.C);
    metric = std::move(mz.metric);
  }
  if (!a.pair.empty()) {
    auto comma = a.pair.find(',');
    if (comma == std::string::npos) throw rlab::InvalidArgument("--pair takes x,y");
    auto x = static_cast<rlab::Vertex>(std::stoul(a.pair.substr(0, comma)));
    auto y = static_cast<rlab::Vertex>(std::stoul(a.pair.substr(comma + 1)));
    if (x >= n || y >= n) throw rlab::InvalidArgument("--pair vertex out of range");
    std::printf("R(%u,%u) %.12f\n", x, y, table.at(x, y));
    if (a.mode != "quasi") std::printf("rho(%u,%u) %.12f\n", x, y, metric.at(x, y));
  }
  if (!a.out.empty()) rlab::save_metric(metric, a.out);
  return 0;
}

int cmd_verify(const VerifyArgs& a) {
  rlab::RunConfig cfg = a.config.empty() ? rlab::RunConfig{} : rlab::load_config(a.config);
  if (!a.graph.empty()) {
    cfg.graph = a.graph;
    cfg.generator.clear();
  }
  if (!a.generator.empty()) {
    cfg.generator = a.generator;
    cfg.graph.clear();
  }
  if (!a.metric.empty()) rlab::set_option(cfg, "metric", a.metric);
  if (a.auto_metric) cfg.auto_metric = true;
  if (!a.suite.empty()) rlab::set_option(cfg, "suites", a.suite);
  if (!a.seed.empty()) rlab::set_option(cfg, "seed", a.seed);
  if (!a.m.empty()) rlab::set_option(cfg, "m", a.m);
  if (!a.out.empty()) cfg.out = a.out;
  if (!a.csv_dir.empty()) cfg.csv_dir = a.csv_dir;
  for (const auto& kv : a.set) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw rlab::InvalidArgument("--set takes key=value");
    rlab::set_option(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }

  auto input = rlab::load_input(cfg);
  auto t0 = std::chrono::steady_clock::now();
  auto report = rlab::run_verify(cfg, input, [&](const rlab::CheckResult& c) {
    if (a.timings) std::fprintf(stderr, "%-22s %-4s %9.3f s\n", c.name.c_str(), c.pass ? "pass" : "FAIL", c.wall_seconds);
  });
  if (a.timings)
    std::fprintf(stderr, "total %.3f s\n",
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  write_text(cfg.out, rlab::render_report(report));
  if (!cfg.csv_dir.empty()) rlab::write_csv_dir(report, cfg.csv_dir);
  auto failed = report.failed();
  if (failed.empty()) return 0;
  std::cerr << "failed checks:";
  for (const auto& f : failed) std::cerr << " " << f;
  std::cerr << "\n";
  return kFail;
}

int cmd_heat(const HeatArgs& a) {
  rlab::RunConfig cfg;
  cfg.graph = a.graph;
  cfg.generator = a.generator;
  auto input = rlab::load_input(cfg);
  const auto& g = input.graph;
  rlab::Vertex x;
  if (a.source == "center") {
    x = rlab::graph_center(g);
  } else {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(a.source, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != a.source.size() || v >= g.vertex_count())
      throw rlab::InvalidArgument("--source must be 'center' or a vertex id");
    x = static_cast<rlab::Vertex>(v);
  }
  const double cells = (static_cast<double>(a.steps) + 1.0) * static_cast<double>(g.vertex_count());
  if (cells > static_cast<double>(rlab::kDefaultKernelBudget))
    throw rlab::CapacityError("horizon " + std::to_string(a.steps) + " exceeds the kernel budget of " +
                              std::to_string(rlab::kDefaultKernelBudget) + " values");
  auto s = rlab::heat_kernel(g, x, a.steps);
  std::string out = "n,y,p\n";
  char buf[64];
  for (std::size_t n = 0; n <= a.steps; ++n) {
    auto row = s.row(n);
    for (rlab::Vertex y = 0; y < g.vertex_count(); ++y) {
      std::snprintf(buf, sizeof buf, "%zu,%u,%.17g\n", n, y, row[y]);
      out += buf;
    }
  }
  write_text(a.out, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rlab: resolvent quasi-metrics, heat kernels and Harnack constants on weighted graphs"};
  app.require_subcommand(1);

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate a graph file");
  gen->add_option("--family", ga.family, "lattice | gasket | tree")->required();
  gen->add_option("--dim", ga.dim, "lattice dimension (1-3)");
  gen->add_option("--side", ga.side, "lattice side (odd)");
  gen->add_option("--exponent", ga.exponent, "half-line edge weights (1+k)^a (dim 1)")
      ->each([&](const std::string&) { ga.has_exponent = true; });
  gen->add_option("--level", ga.level, "gasket level");
  gen->add_option("--branching", ga.branching, "tree branching per generation, e.g. 3,3,2");
  gen->add_option("--weights", ga.weights, "tree edge weight per generation, or one weight");
  gen->add_option("--out", ga.out, "output file (stdout if omitted)");

  MetricArgs ma;
  auto* met = app.add_subcommand("metric", "Compute R_m and its metrization");
  met->add_option("--graph", ma.graph, "graph file")->required();
  met->add_option("--m", ma.m, "order m")->check(CLI::Range(1, 8));
  met->add_option("--mode", ma.mode, "half | adaptive | quasi");
  met->add_option("--pair", ma.pair, "print R_m and rho for x,y");
  met->add_option("--out", ma.out, "metric file");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Run verification suites and write a JSON report");
  ver->add_option("--config", va.config, "key = value config file");
  ver->add_option("--graph", va.graph, "graph file");
  ver->add_option("--generator", va.generator, "generator spec, e.g. gasket:level=4");
  ver->add_option("--metric", va.metric, "metric file from `rlab metric`");
  ver->add_flag("--auto", va.auto_metric, "compute the metric when no file is given");
  ver->add_option("--suite", va.suite, "einstein | hke | harnack | exit | all (comma list)");
  ver->add_option("--seed", va.seed, "64-bit seed for Monte Carlo suites");
  ver->add_option("--m", va.m, "order m or auto");
  ver->add_option("--set", va.set, "override any config key: key=value");
  ver->add_option("--out", va.out, "report path (stdout if omitted)");
  ver->add_option("--csv-dir", va.csv_dir, "directory for per-check CSV files");
  ver->add_flag("--timings", va.timings, "per-check wall time on stderr");

  HeatArgs ha;
  auto* heat = app.add_subcommand("heat", "Dump p_n(x, y) as CSV");
  heat->add_option("--graph", ha.graph, "graph file");
  heat->add_option("--generator", ha.generator, "generator spec");
  heat->add_option("--source", ha.source, "center or a vertex id");
  heat->add_option("--steps", ha.steps, "horizon N")->required();
  heat->add_option("--out", ha.out, "CSV path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*gen) return cmd_gen(ga);
    if (*met) return cmd_metric(ma);
    if (*ver) return cmd_verify(va);
    if (*heat) return cmd_heat(ha);
  } catch (const rlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
