#include "rlab/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "rlab/error.hpp"
#include "rlab/generators.hpp"
#include "rlab/green.hpp"
#include "rlab/scaling.hpp"
#include "rlab/verify.hpp"
#include "rlab/walk.hpp"

namespace rlab {

namespace {

// R^p rows straight from the table, no chain infimum (quasi-only mode).
class PowerDistances final : public DistanceSource {
 public:
  PowerDistances(std::shared_ptr<const QuasiMetricTable> t, double p) : t_(std::move(t)), p_(p) {}
  std::size_t vertex_count() const override { return t_->vertex_count(); }
  std::shared_ptr<const std::vector<double>> row(Vertex x) const override {
    auto r = t_->row(x);
    auto out = std::make_shared<std::vector<double>>(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) (*out)[i] = std::pow(r[i], p_);
    return out;
  }
  std::string name() const override { return "quasi"; }

 private:
  std::shared_ptr<const QuasiMetricTable> t_;
  double p_;
};

bool wants(const RunConfig& cfg, const std::string& suite) {
  for (const auto& s : cfg.suites)
    if (s == suite || s == "all") return true;
  return false;
}

std::vector<Region> ppa_regions(const WeightedGraph& g, const DistanceSource& rho, Vertex x,
                                const std::vector<double>& radii) {
  std::vector<Region> out{Region::single(x)};
  auto row = rho.row(x);
  for (double r : radii) {
    Region b = ball(g, *row, x, r);
    if (!(b == out.back())) out.push_back(b);
  }
  out.push_back(Region::all(g.vertex_count()));
  return out;
}

CheckResult failed_check(const std::string& name, const std::string& why) {
  CheckResult c;
  c.name = name;
  c.pass = false;
  c.note = why;
  return c;
}

}  // namespace

// Dyadic ladder running down from the largest safe radius (B(x, safe r)
// clear of the boundary, B(x, 2r) short of the whole graph) until B(x, 2r)
// is the centre alone. Ascending on return.
std::vector<double> default_radii(const WeightedGraph& g, const DistanceSource& rho, Vertex x,
                                  double safe_factor) {
  auto row = rho.row(x);
  double ecc = 0.0, r0 = std::numeric_limits<double>::infinity();
  for (double d : *row) {
    ecc = std::max(ecc, d);
    if (d > 0) r0 = std::min(r0, d);
  }
  double top = ecc / 2.0;
  for (Vertex b : g.boundary()) top = std::min(top, (*row)[b] / safe_factor);
  top *= 1.0 - 1e-6;
  std::vector<double> out;
  for (int k = 0; k < 12; ++k) {
    double r = std::ldexp(top, -k);
    if (2.0 * r <= r0) break;
    out.push_back(r);
  }
  if (out.empty()) out.push_back(top);
  std::reverse(out.begin(), out.end());
  return out;
}

LoadedGraph load_input(const RunConfig& cfg) {
  if (cfg.graph.empty() == cfg.generator.empty())
    throw InvalidArgument("give exactly one of graph or generator");
  LoadedGraph out;
  if (!cfg.graph.empty()) {
    out.graph = load_graph(cfg.graph);
    out.name = cfg.name.empty() ? cfg.graph : cfg.name;
  } else {
    auto gen = generate_from_spec(cfg.generator);
    out.graph = std::move(gen.graph);
    out.coords = std::move(gen.coords);
    out.name = cfg.name.empty() ? cfg.generator : cfg.name;
  }
  return out;
}

std::vector<Vertex> resolve_centers(const RunConfig& cfg, const LoadedGraph& in) {
  std::vector<Vertex> out = cfg.centers;
  for (Vertex v : out)
    if (v >= in.graph.vertex_count()) throw InvalidArgument("center " + std::to_string(v) + " out of range");
  if (cfg.center_coords) {
    if (in.coords.empty()) throw InvalidArgument("center_coords needs a generator");
    auto it = std::find(in.coords.begin(), in.coords.end(), *cfg.center_coords);
    if (it == in.coords.end()) throw InvalidArgument("center_coords match no vertex");
    out.insert(out.begin(), static_cast<Vertex>(it - in.coords.begin()));
  }
  if (out.empty()) out.push_back(graph_center(in.graph));
  return out;
}

MetricContext build_metric(const RunConfig& cfg, const WeightedGraph& g, int m) {
  MetricContext ctx;
  ctx.order = m;
  const std::size_t n = g.vertex_count();
  if (n <= kMaxAllPairsVertices) {
    ctx.table = std::make_shared<QuasiMetricTable>(rm_matrix(g, m));
  } else {
    RmOptions opt;
    std::vector<Vertex> lm;
    std::size_t k = std::min(cfg.landmarks, n);
    for (std::size_t i = 0; i < k; ++i) lm.push_back(static_cast<Vertex>(i * (n - 1) / std::max<std::size_t>(k - 1, 1)));
    lm.erase(std::unique(lm.begin(), lm.end()), lm.end());
    opt.landmarks = lm;
    ctx.table = std::make_shared<QuasiMetricTable>(rm_matrix(g, m, opt));
  }

  if (!cfg.metric.empty()) {
    MetricTable mt = load_metric(cfg.metric);
    if (mt.vertex_count() != n) throw InvalidArgument("metric file does not match the graph");
    if (mt.exponent() == 0.0) {
      ctx.exponent = 0.5;
      ctx.rho = std::make_shared<PowerDistances>(
          std::make_shared<QuasiMetricTable>(m, n, [&] {
            std::vector<Vertex> s(n);
            for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<Vertex>(i);
            return s;
          }(), std::vector<double>(mt.values().begin(), mt.values().end())), 0.5);
    } else {
      ctx.exponent = mt.exponent();
      ctx.rho = std::make_shared<TableDistances>(std::move(mt));
    }
    return ctx;
  }
  if (!cfg.auto_metric) throw InvalidArgument("no metric file given; pass --auto to compute one");

  if (cfg.metric_mode == "adaptive") {
    if (!ctx.table->full()) throw CapacityError("adaptive exponent needs the full R_m table");
    ctx.exponent = adaptive_exponent(quasi_constant(*ctx.table).value);
  }
  if (cfg.metric_mode == "quasi") {
    if (!ctx.table->full()) throw CapacityError("quasi mode needs the full R_m table");
    ctx.rho = std::make_shared<PowerDistances>(ctx.table, 0.5);
  } else if (!ctx.table->full()) {
    ctx.rho = std::make_shared<LandmarkDistances>(*ctx.table, ctx.exponent);
  } else if (n <= kMaxExactMetricVertices) {
    ctx.metrization = metrize(*ctx.table, ctx.exponent);
    ctx.rho = std::make_shared<TableDistances>(ctx.metrization->metric);
  } else {
    ctx.rho = std::make_shared<ChainDistances>(ctx.table, ctx.exponent);
  }
  return ctx;
}

Report run_verify(const RunConfig& cfg, const LoadedGraph& in, const CheckObserver& observer) {
  const WeightedGraph& g = in.graph;
  const bool mc = wants(cfg, "exit");
  if (mc && !cfg.seed) throw InvalidArgument("the exit suite draws random walks: a seed is required");
  const std::uint64_t seed = cfg.seed.value_or(0);

  auto centers = resolve_centers(cfg, in);
  const Vertex x = centers.front();
  const int m = cfg.m > 0 ? cfg.m : auto_order(g, x);
  MetricContext ctx = build_metric(cfg, g, m);
  const DistanceSource& rho = *ctx.rho;

  std::vector<double> radii = cfg.radii.empty() ? default_radii(g, rho, x, cfg.safe_factor) : cfg.radii;
  std::vector<double> hradii = cfg.harnack_radii.empty() ? radii : cfg.harnack_radii;
  std::vector<double> pradii = cfg.parabolic_radii;
  if (pradii.empty()) pradii.assign(hradii.begin(), hradii.begin() + std::min<std::size_t>(2, hradii.size()));
  std::vector<std::size_t> ngrid = cfg.n_grid;
  if (ngrid.empty())
    for (std::size_t n = 16; n <= 4096; n *= 2) ngrid.push_back(n);
  std::vector<std::size_t> tail_times = cfg.tail_times.empty() ? std::vector<std::size_t>{2, 8, 32} : cfg.tail_times;

  std::vector<CheckResult> checks;
  auto run = [&](const std::string& name, const std::function<CheckResult()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    CheckResult c;
    try {
      c = fn();
    } catch (const CapacityError&) {
      throw;
    } catch (const Error& e) {
      c = failed_check(name, e.what());
    }
    c.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (observer) observer(c);
    checks.push_back(std::move(c));
  };

  if (wants(cfg, "einstein")) {
    run("volume_doubling", [&] { return volume_doubling_check(g, rho, m, centers, radii, cfg.safe_factor); });
    run("quasi_metric", [&] {
      CheckResult c;
      c.name = "quasi_metric";
      c.params = {{"m", m}, {"exponent", ctx.exponent}, {"table", ctx.table->full() ? "full" : "landmark"}};
      c.tolerance = {{"K_max", 2.0 + 1e-9}, {"key_inequality", 1e-9}};
      bool ok = true;
      if (ctx.table->full()) {
        auto K = quasi_constant(*ctx.table);
        c.constants["K"] = K.value;
        c.witnesses.push_back({{"kind", "quasi_triangle"}, {"x", K.x}, {"y", K.y}, {"z", K.z}, {"K", K.value}});
        ok = ok && K.value <= 2.0 + 1e-9;
        auto key = key_inequality_check(*ctx.table, g, m, 8, seed ^ 0x6b6579ULL);
        c.constants["key_violation"] = key.max_violation;
        c.constants["key_ratio"] = key.max_ratio;
        ok = ok && key.max_violation <= 1e-9;
      }
      if (ctx.metrization) {
        const auto& mz = *ctx.metrization;
        c.constants["c"] = mz.c;
        c.constants["C"] = mz.C;
        c.constants["repairs"] = mz.repairs;
        auto tri = g.vertex_count() <= 300 ? triangle_check_exhaustive(mz.metric)
                                           : triangle_check_sampled(mz.metric, 1'000'000, seed);
        c.constants["triangle_checked"] = tri.checked;
        c.constants["triangle_violations"] = tri.violations;
        ok = ok && tri.violations == 0;
      }
      c.pass = ok;
      return c;
    });
    run("einstein", [&] { return einstein_scan(g, rho, m, centers, radii, cfg.safe_factor, cfg.window); });
    run("resistance_scaling", [&] {
      return resistance_scaling_scan(g, rho, m, centers, radii, cfg.safe_factor, cfg.window);
    });
  }

  if (wants(cfg, "hke")) {
    run("heat_kernel", [&] {
      HkeOptions opt;
      opt.n_grid = ngrid;
      opt.delta = cfg.delta;
      opt.drift_max = cfg.drift_max;
      opt.negative_drift_min = cfg.negative_drift_min;
      opt.tail.q = cfg.q;
      return hke_scan(g, rho, m, x, opt);
    });
    run("ppa", [&] {
      std::vector<std::size_t> times;
      for (std::size_t n : ngrid)
        if (n <= 1024) times.push_back(n);
      if (times.empty()) times.push_back(ngrid.front());
      return ppa_check(g, *ctx.table, m, x, ppa_regions(g, rho, x, radii), times);
    });
    run("pdiff", [&] { return pdiff_lemma_check(g, x, cfg.pdiff_k, cfg.pdiff_n_lo, cfg.pdiff_n_hi); });
    run("ledif", [&] {
      std::vector<int> orders{1, 2, 3};
      return ledif_identity_check(g, x, orders, cfg.ledif_times);
    });
  }

  if (wants(cfg, "harnack")) {
    run("elliptic_harnack", [&] {
      return elliptic_harnack_scan(g, rho, x, hradii, cfg.safe_factor, cfg.harnack_window);
    });
    if (!cfg.hop_radii.empty()) {
      run("elliptic_harnack_hop", [&] {
        HopDistances hop(g);
        auto c = elliptic_harnack_scan(g, hop, x, cfg.hop_radii, cfg.safe_factor, cfg.harnack_window);
        c.name = "elliptic_harnack_hop";
        return c;
      });
    }
    run("parabolic_harnack", [&] {
      return parabolic_harnack_scan(g, rho, m, x, pradii, cfg.safe_factor, cfg.harnack_window);
    });
  }

  if (wants(cfg, "exit")) {
    run("exit_identities", [&] {
      auto row = rho.row(x);
      std::vector<ExitInstance> inst;
      const double walk_budget = 5e7;
      for (double r : radii) {
        Region b = ball(g, *row, x, r);
        if (b.size() <= 1 || b.size() == g.vertex_count()) continue;
        if (cfg.mc_trials > 0 && mean_exit(g, b, x) * static_cast<double>(cfg.mc_trials) > walk_budget) break;
        inst.push_back({b, x});
        if (inst.size() == 3) break;
      }
      if (inst.empty()) throw InvalidArgument("no ball small enough for the walk budget");
      std::vector<int> orders{1, 2, 3};
      return exit_identity_check(g, inst, orders, cfg.mc_trials, seed);
    });
    run("exit_tail", [&] {
      TailBoundConfig tc;
      tc.q = cfg.q;
      return exit_tail_check(g, rho, m, x, radii, tail_times, tc, cfg.safe_factor);
    });
    run("exit_moments", [&] {
      return exit_envelope_check(g, rho, m, centers, radii, cfg.safe_factor, cfg.window);
    });
  }

  Json meta = {{"tool", "rlab"}, {"version", "0.1.0"}, {"m", m}, {"seed", seed},
               {"metric", rho.name()}, {"exponent", ctx.exponent}, {"centers", centers},
               {"radii", radii},
               {"conventions",
                {{"ball", "component of {y : rho(x,y) < r(1 - 1e-9)} containing x"},
                 {"exit_moment", "E_m(A|x) = sum_y G_m^A(x,y) = E[binom(T+m-1, m)]"},
                 {"parabolic_boundary", "values prescribed on B(x,2R) at time k and on its exterior boundary at every step"},
                 {"safe_radius", "B(x, safe_factor r) avoids the generator boundary"}}}};
  return assemble_report(std::move(meta), graph_summary(g, in.name), config_json(cfg), std::move(checks));
}

}  // namespace rlab
