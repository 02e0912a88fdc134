#include "rlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "rlab/error.hpp"
#include "rlab/forms.hpp"
#include "rlab/green.hpp"
#include "rlab/parallel.hpp"
#include "rlab/rng.hpp"
#include "rlab/scaling.hpp"

namespace rlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

Json vertices(std::span<const Vertex> v) { return Json(std::vector<Vertex>(v.begin(), v.end())); }

struct Spread {
  double lo = kInf;
  double hi = -kInf;
  std::size_t count = 0;
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    ++count;
  }
  double ratio() const { return count == 0 ? kInf : hi / lo; }
};

// Distributions P_t(x, .) for the requested times, propagated step by step.
std::map<std::size_t, std::vector<double>> distribution_rows(const WeightedGraph& g, Vertex x,
                                                             const std::set<std::size_t>& times) {
  std::map<std::size_t, std::vector<double>> out;
  if (times.empty()) return out;
  const std::size_t n = g.vertex_count();
  std::vector<double> cur(n, 0.0), next(n);
  cur[x] = 1.0;
  const std::size_t last = *times.rbegin();
  for (std::size_t t = 0;; ++t) {
    if (times.count(t)) out.emplace(t, cur);
    if (t == last) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (Vertex v = 0; v < n; ++v) {
      if (cur[v] == 0.0) continue;
      double share = cur[v] / g.measure(v);
      for (const auto& e : g.neighbors(v)) next[e.to] += share * e.weight;
    }
    cur.swap(next);
  }
  return out;
}

double kernel(const WeightedGraph& g, const std::vector<double>& dist_row, Vertex y) {
  return dist_row[y] / g.measure(y);
}

}  // namespace

// ---------------------------------------------------------------- Einstein

CheckResult einstein_scan(const WeightedGraph& g, const DistanceSource& rho, int m,
                          std::span<const Vertex> centers, std::span<const double> radii,
                          double safe_factor, double window) {
  if (m < 1) throw InvalidArgument("order m must be >= 1");
  CheckResult out;
  out.name = "einstein";
  out.params = {{"m", m}, {"metric", rho.name()}, {"centers", vertices(centers)},
                {"radii", std::vector<double>(radii.begin(), radii.end())},
                {"safe_factor", safe_factor}};
  out.tolerance = {{"lemma_slack", 1e-9}, {"window", window}};

  struct Point {
    Vertex x = 0;
    double r = 0;
    std::string status = "ok";
    std::size_t size = 0;
    double E = 0, R = 0, V = 0, Erho = 0, ratio1 = 0, ratio2 = 0;
  };
  std::vector<Point> pts(centers.size() * radii.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    Point& p = pts[i];
    p.x = centers[i / radii.size()];
    p.r = radii[i % radii.size()];
    auto row = rho.row(p.x);
    Region b = ball(g, *row, p.x, 2.0 * p.r);
    p.size = b.size();
    if (!safe_radius(g, *row, p.x, p.r, safe_factor) || b.size() == g.vertex_count()) {
      p.status = "unsafe";
      return;
    }
    if (b.size() == 1) {
      p.status = "degenerate";
      return;
    }
    LaplacianSolver solver(g, b);
    GreenTable gm = green_row(solver, b, m, p.x);
    p.E = gm.mass(g);
    p.R = gm.diagonal();
    p.V = volume(g, b);
    p.Erho = m == 1 ? p.E : green_row(solver, b, 1, p.x).mass(g);
    p.ratio1 = p.E / (p.R * p.V);
    p.ratio2 = p.Erho / std::pow(p.R * p.V, 1.0 / m);
  });

  Spread s1, s2;
  std::vector<std::string> skipped;
  for (const auto& p : pts) {
    Json w = {{"x", p.x}, {"r", p.r}, {"ball_size", p.size}, {"status", p.status}};
    if (p.status == "ok") {
      s1.add(p.ratio1);
      s2.add(p.ratio2);
      w["exit_moment"] = p.E;
      w["resistance"] = p.R;
      w["volume"] = p.V;
      w["mean_exit"] = p.Erho;
      w["ratio1"] = p.ratio1;
      w["ratio2"] = p.ratio2;
      w["lemma_ok"] = p.ratio1 <= 1.0 + 1e-9;
    }
    out.witnesses.push_back(w);
  }
  if (s1.count == 0) throw InvalidArgument("einstein_scan: no safe, non-degenerate (x, r) pairs");
  out.constants = {{"scales", s1.count},
                   {"ratio1_min", s1.lo}, {"ratio1_max", s1.hi}, {"ratio1_spread", s1.ratio()},
                   {"ratio2_min", s2.lo}, {"ratio2_max", s2.hi}, {"ratio2_spread", s2.ratio()}};
  bool lemma = s1.hi <= 1.0 + 1e-9;
  out.pass = lemma && s1.ratio() <= window && s2.ratio() <= window;
  if (!lemma) out.note = "E_m <= g_m(x,x) V violated";
  return out;
}

CheckResult resistance_scaling_scan(const WeightedGraph& g, const DistanceSource& rho, int m,
                                    std::span<const Vertex> centers, std::span<const double> radii,
                                    double safe_factor, double window) {
  CheckResult out;
  out.name = "resistance_scaling";
  out.params = {{"m", m}, {"metric", rho.name()}, {"centers", vertices(centers)},
                {"radii", std::vector<double>(radii.begin(), radii.end())},
                {"safe_factor", safe_factor}};
  out.tolerance = {{"window", window}};
  struct Point {
    Vertex x = 0;
    double r = 0;
    std::string status = "ok";
    std::size_t size = 0;
    double R = 0;
  };
  std::vector<Point> pts(centers.size() * radii.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    Point& p = pts[i];
    p.x = centers[i / radii.size()];
    p.r = radii[i % radii.size()];
    auto row = rho.row(p.x);
    Region b = ball(g, *row, p.x, p.r);
    p.size = b.size();
    if (!safe_radius(g, *row, p.x, p.r, safe_factor) || b.size() == g.vertex_count()) {
      p.status = "unsafe";
      return;
    }
    if (b.size() == 1) {
      p.status = "degenerate";
      return;
    }
    p.R = green_row(g, b, m, p.x).diagonal();
  });
  Spread s;
  for (const auto& p : pts) {
    Json w = {{"x", p.x}, {"r", p.r}, {"ball_size", p.size}, {"status", p.status}};
    if (p.status == "ok") {
      double v = p.R / (p.r * p.r);
      s.add(v);
      w["resistance"] = p.R;
      w["ratio"] = v;
    }
    out.witnesses.push_back(w);
  }
  if (s.count == 0) throw InvalidArgument("resistance_scaling_scan: no safe, non-degenerate (x, r) pairs");
  out.constants = {{"scales", s.count}, {"ratio_min", s.lo}, {"ratio_max", s.hi}, {"spread", s.ratio()}};
  out.pass = s.ratio() <= window;
  return out;
}

CheckResult volume_doubling_check(const WeightedGraph& g, const DistanceSource& rho, int m,
                                  std::span<const Vertex> centers, std::span<const double> radii,
                                  double safe_factor) {
  CheckResult out;
  out.name = "volume_doubling";
  out.params = {{"m", m}, {"metric", rho.name()}, {"centers", vertices(centers)},
                {"radii", std::vector<double>(radii.begin(), radii.end())},
                {"safe_factor", safe_factor}};
  ScalingProfile prof = vd_scan(g, rho, m, centers, radii, safe_factor, true);
  for (const auto& rec : prof.records) {
    Json w = {{"x", rec.center}, {"r", rec.radius}, {"ball_size", rec.ball_size},
              {"volume", rec.volume}, {"volume_double", rec.volume_double},
              {"F", rec.F}, {"safe", rec.safe}};
    if (rec.safe) w["covering"] = rec.covering;
    out.witnesses.push_back(w);
  }
  out.constants = {{"doubling", prof.doubling_constant}, {"F_doubling", prof.F_doubling},
                   {"beta_m", prof.beta_m}, {"beta_upper", prof.beta_upper},
                   {"beta_lower", prof.beta_lower}, {"covering_max", prof.covering_max},
                   {"in_W0", prof.in_W0}, {"in_W1", prof.in_W1}};
  out.pass = prof.in_W0;
  if (prof.beta_lower_flag) out.note = "flag: lower F exponent <= 1, outside W1";
  return out;
}

// ---------------------------------------------------------------- heat kernel

CheckResult hke_scan(const WeightedGraph& g, const DistanceSource& rho, int m, Vertex x,
                     const HkeOptions& opt) {
  if (opt.n_grid.empty()) throw InvalidArgument("hke_scan: empty time grid");
  CheckResult out;
  out.name = "heat_kernel";
  out.params = {{"m", m}, {"metric", rho.name()}, {"x", x}, {"n_grid", opt.n_grid},
                {"delta", opt.delta}, {"safe_factor", opt.safe_factor}};
  auto row = rho.row(x);
  VolumeProfile prof(g, *row, x);

  std::vector<std::size_t> grid;
  std::vector<std::size_t> unsafe;
  for (std::size_t n : opt.n_grid) {
    if (n == 0) throw InvalidArgument("hke_scan: times must be positive");
    double f = scale_f(prof, m, static_cast<double>(n));
    if (safe_radius(g, *row, x, f, opt.safe_factor))
      grid.push_back(n);
    else
      unsafe.push_back(n);
  }
  if (grid.empty()) throw InvalidArgument("hke_scan: every grid time has f(x,n) outside the safe range");
  const std::size_t horizon = 2 * grid.back() + 1;
  if (horizon * g.vertex_count() > kDefaultKernelBudget * 64)
    throw CapacityError("hke_scan: kernel horizon exceeds the work budget");

  std::set<std::size_t> times;
  for (std::size_t n : grid) {
    times.insert(n);
    times.insert(n + 1);
    times.insert(2 * n);
  }
  auto rows = distribution_rows(g, x, times);

  double C_due = 0.0, c_dle = kInf, c_ndle = kInf;
  Vertex ndle_y = x;
  std::size_t ndle_n = 0;
  std::vector<double> drift;
  struct GridPoint {
    std::size_t n;
    double f, V;
  };
  std::vector<GridPoint> gps;
  for (std::size_t n : grid) {
    double f = scale_f(prof, m, static_cast<double>(n));
    double V = prof.volume(f);
    gps.push_back({n, f, V});
    double pn = kernel(g, rows.at(n), x);
    double p2n = kernel(g, rows.at(2 * n), x);
    double due = std::max(pn, p2n) * V;
    C_due = std::max(C_due, due);
    double dle = p2n * V;
    drift.push_back(dle);
    c_dle = std::min(c_dle, dle);
    double nd = kInf;
    Vertex arg = x;
    for (Vertex y = 0; y < g.vertex_count(); ++y) {
      if (!((*row)[y] <= opt.delta * f)) continue;
      double pt = kernel(g, rows.at(n), y) + kernel(g, rows.at(n + 1), y);
      if (pt * V < nd) {
        nd = pt * V;
        arg = y;
      }
    }
    if (nd < c_ndle) {
      c_ndle = nd;
      ndle_y = arg;
      ndle_n = n;
    }
    out.witnesses.push_back({{"kind", "diagonal"}, {"n", n}, {"f", f}, {"volume", V},
                             {"p_n", pn}, {"p_2n", p2n}, {"due", due}, {"dle", dle},
                             {"ndle", number(nd)}});
  }

  bool monotone_down = true, monotone_up = true;
  for (std::size_t i = 1; i < drift.size(); ++i) {
    if (drift[i] > drift[i - 1]) monotone_down = false;
    if (drift[i] < drift[i - 1]) monotone_up = false;
  }
  double dmax = *std::max_element(drift.begin(), drift.end());
  double dmin = *std::min_element(drift.begin(), drift.end());
  double drift_ratio = dmax / dmin;

  // off-diagonal: y at rho(x,y) near multiples of f(x,n), k_m from exit moments
  double c_ue = kInf, C_pue = 0.0;
  std::size_t ue_points = 0, ue_vacuous = 0;
  for (std::size_t i = 0; i < gps.size(); i += std::max<std::size_t>(opt.ue_stride, 1)) {
    const auto& gp = gps[i];
    const auto& pr = rows.at(gp.n);
    for (double mult : opt.ue_multipliers) {
      double target = mult * gp.f;
      Vertex best = x;
      double gap = kInf;
      for (Vertex y = 0; y < g.vertex_count(); ++y) {
        double d = std::abs((*row)[y] - target);
        if (d < gap) {
          gap = d;
          best = y;
        }
      }
      double dxy = (*row)[best];
      if (!(dxy > 0.0) || !safe_radius(g, *row, x, dxy, 1.0)) continue;
      Region bb = ball(g, *row, x, dxy);
      if (bb.size() == g.vertex_count()) continue;
      TailResult tr = tail_and_kdef(g, rho, m, x, dxy, gp.n, opt.tail);
      double pxy = kernel(g, pr, best);
      auto yrow = rho.row(best);
      VolumeProfile yprof(g, *yrow, best);
      double fy = scale_f(yprof, m, static_cast<double>(gp.n));
      double geo = std::sqrt(gp.V * yprof.volume(fy));
      C_pue = std::max(C_pue, pxy * geo);
      Json w = {{"kind", "off_diagonal"}, {"n", gp.n}, {"y", best}, {"rho", dxy},
                {"p_n", pxy}, {"k", tr.k}, {"vacuous", tr.vacuous}, {"pue", pxy * geo}};
      if (tr.vacuous) {
        ++ue_vacuous;
      } else if (pxy > 0.0) {
        double c = std::log(C_due / (pxy * gp.V)) / static_cast<double>(tr.k);
        w["c_fit"] = c;
        c_ue = std::min(c_ue, c);
        ++ue_points;
      }
      out.witnesses.push_back(w);
    }
  }

  out.constants = {{"C_DUE", C_due}, {"c_DLE", c_dle}, {"c_NDLE", c_ndle},
                   {"ndle_witness", {{"n", ndle_n}, {"y", ndle_y}}},
                   {"drift_ratio", drift_ratio}, {"drift_monotone", monotone_down || monotone_up},
                   {"drift_direction", monotone_down ? "decreasing" : (monotone_up ? "increasing" : "mixed")},
                   {"c_UE", ue_points ? number(c_ue) : Json(nullptr)}, {"ue_points", ue_points},
                   {"ue_vacuous", ue_vacuous}, {"C_PUE", C_pue}, {"unsafe_times", unsafe}};
  bool ok = std::isfinite(C_due) && c_dle > 0.0 && c_ndle > 0.0;
  if (ue_points) ok = ok && c_ue > 0.0;
  if (opt.drift_max) {
    out.tolerance["drift_max"] = *opt.drift_max;
    ok = ok && drift_ratio <= *opt.drift_max;
  }
  if (opt.negative_drift_min) {
    out.tolerance["negative_drift_min"] = *opt.negative_drift_min;
    bool drifted = (monotone_down || monotone_up) && drift_ratio >= *opt.negative_drift_min;
    ok = ok && drifted;
    out.note = "negative control: pass means the DUE constant drifts";
  }
  out.tolerance["delta"] = opt.delta;
  if (out.note.empty()) out.note = "graphs carry no loops: odd-time comparison skipped";
  out.pass = ok;
  return out;
}

CheckResult ppa_check(const WeightedGraph& g, const QuasiMetricTable& table, int m, Vertex x,
                      const std::vector<Region>& regions, std::span<const std::size_t> n_grid) {
  if (n_grid.empty()) throw InvalidArgument("ppa_check: empty time grid");
  CheckResult out;
  out.name = "ppa";
  out.params = {{"m", m}, {"x", x}, {"regions", regions.size()},
                {"n_grid", std::vector<std::size_t>(n_grid.begin(), n_grid.end())}};
  std::size_t horizon = *std::max_element(n_grid.begin(), n_grid.end());
  auto diag = diagonal_series(g, x, horizon);
  double C = 0.0;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Region& a = regions[i];
    if (!a.contains(x)) throw InvalidArgument("ppa_check: region must contain x");
    double rbar = 0.0;
    for (Vertex y : a.members()) rbar = std::max(rbar, table.at(x, y));
    double mu = volume(g, a);
    for (std::size_t n : n_grid) {
      double bound = rbar / std::pow(static_cast<double>(n), m) + 1.0 / mu;
      double c = diag[n] / bound;
      C = std::max(C, c);
      out.witnesses.push_back({{"region", i}, {"size", a.size()}, {"n", n}, {"Rbar", rbar},
                               {"measure", mu}, {"p_n", diag[n]}, {"C", c}});
    }
  }
  out.constants = {{"C", C}};
  out.pass = std::isfinite(C);
  return out;
}

CheckResult pdiff_lemma_check(const WeightedGraph& g, Vertex x, int k_max, std::size_t n_lo,
                              std::size_t n_hi) {
  CheckResult out;
  out.name = "pdiff";
  out.params = {{"x", x}, {"k_max", k_max}, {"n_lo", n_lo}, {"n_hi", n_hi}};
  out.tolerance = {{"constant", 1.0}, {"slack", 1e-12}, {"positivity", -1e-12}};
  auto diag = diagonal_series(g, x, 4 * n_hi + 2 * static_cast<std::size_t>(k_max));
  PdiffResult r = pdiff_check(diag, k_max, n_lo, n_hi);
  Json per = Json::array();
  for (const auto& o : r.orders) {
    per.push_back({{"k", o.k}, {"C_k", o.best_constant}, {"violations", o.violations},
                   {"worst_n", o.worst_n}, {"min_positivity", o.min_positivity}});
    out.witnesses.push_back({{"k", o.k}, {"n", o.worst_n}, {"C_k", o.best_constant},
                             {"violations", o.violations}});
  }
  out.constants = {{"violations", r.violations}, {"worst_margin", r.worst_margin},
                   {"min_positivity", r.min_positivity}, {"orders", per}};
  out.pass = r.pass;
  if (!r.pass) out.note = "constant-1 form fails; C_k is the smallest per-order constant";
  return out;
}

CheckResult ledif_identity_check(const WeightedGraph& g, Vertex x, std::span<const int> orders,
                                 std::span<const std::size_t> times, double tolerance) {
  if (orders.empty() || times.empty()) throw InvalidArgument("ledif_identity_check: empty grid");
  CheckResult out;
  out.name = "ledif";
  out.params = {{"x", x}, {"orders", std::vector<int>(orders.begin(), orders.end())},
                {"times", std::vector<std::size_t>(times.begin(), times.end())}};
  out.tolerance = {{"relative", tolerance}};
  std::size_t horizon = 0;
  for (int m : orders)
    for (std::size_t n : times) horizon = std::max(horizon, 2 * n + 2 * static_cast<std::size_t>(m));
  KernelSeries s = heat_kernel(g, x, horizon);
  double worst = 0.0, step2_worst = 0.0;
  for (int m : orders)
    for (std::size_t n : times) {
      LedifResult r = ledif_check(g, s, m, n);
      worst = std::max(worst, r.relative_error);
      double rel_step2 = r.step2_discrepancy / std::max(std::abs(r.lhs), 1e-300);
      step2_worst = std::max(step2_worst, rel_step2);
      out.witnesses.push_back({{"m", m}, {"n", n}, {"energy", r.lhs}, {"corrected", r.corrected_rhs},
                               {"step2", r.step2_rhs}, {"relative_error", r.relative_error},
                               {"step2_discrepancy", r.step2_discrepancy}});
    }
  out.constants = {{"max_relative_error", worst}, {"step2_max_relative_discrepancy", step2_worst}};
  out.pass = worst <= tolerance;
  if (step2_worst > tolerance) out.note = "step-2 difference form differs from the energy; step-1 form holds";
  return out;
}

// ---------------------------------------------------------------- Harnack

EllipticHarnack elliptic_harnack(const WeightedGraph& g, std::span<const double> dist, Vertex x,
                                 double r) {
  Region outer = ball(g, dist, x, 2.0 * r);
  Region inner = ball(g, dist, x, r);
  Region atoms = exterior_boundary(g, outer);
  if (atoms.empty()) throw InvalidArgument("elliptic_harnack: B(x,2r) has no exterior boundary");
  EllipticHarnack out;
  out.inner_size = inner.size();
  out.outer_size = outer.size();
  out.atoms = atoms.size();
  out.z = out.y = x;
  out.w = atoms[0];
  if (inner.size() == 1) return out;

  LaplacianSolver solver(g, outer);
  auto local = outer.local_index(g.vertex_count());
  struct Best {
    double ratio = 1.0;
    Vertex z = 0, y = 0;
  };
  std::vector<Best> best(atoms.size());
  parallel_for(atoms.size(), [&](std::size_t a) {
    Vertex w = atoms[a];
    std::vector<double> rhs(outer.size(), 0.0);
    for (const auto& e : g.neighbors(w))
      if (local[e.to] >= 0) rhs[local[e.to]] = e.weight;
    auto h = solver.solve(rhs);
    double hi = -kInf, lo = kInf;
    Vertex zi = x, yi = x;
    for (Vertex v : inner.members()) {
      double val = h[local[v]];
      if (val > hi) {
        hi = val;
        zi = v;
      }
      if (val < lo) {
        lo = val;
        yi = v;
      }
    }
    best[a] = {lo > 0.0 ? hi / lo : kInf, zi, yi};
  });
  for (std::size_t a = 0; a < atoms.size(); ++a)
    if (best[a].ratio > out.constant) {
      out.constant = best[a].ratio;
      out.z = best[a].z;
      out.y = best[a].y;
      out.w = atoms[a];
    }
  return out;
}

CheckResult elliptic_harnack_scan(const WeightedGraph& g, const DistanceSource& dist, Vertex x,
                                  std::span<const double> radii, double safe_factor, double window) {
  CheckResult out;
  out.name = "elliptic_harnack";
  out.params = {{"metric", dist.name()}, {"x", x},
                {"radii", std::vector<double>(radii.begin(), radii.end())},
                {"safe_factor", safe_factor}};
  out.tolerance = {{"window", window}};
  auto row = dist.row(x);
  Spread s;
  for (double r : radii) {
    Json w = {{"r", r}};
    if (!safe_radius(g, *row, x, r, safe_factor)) {
      w["status"] = "unsafe";
    } else {
      EllipticHarnack h = elliptic_harnack(g, *row, x, r);
      s.add(h.constant);
      w["status"] = h.inner_size == 1 ? "single_vertex" : "ok";
      w["C_H"] = number(h.constant);
      w["inner_size"] = h.inner_size;
      w["outer_size"] = h.outer_size;
      w["atoms"] = h.atoms;
      w["witness"] = {{"z", h.z}, {"y", h.y}, {"w", h.w}};
    }
    out.witnesses.push_back(w);
  }
  if (s.count == 0) throw InvalidArgument("elliptic_harnack_scan: no safe radius");
  out.constants = {{"C_H_max", number(s.hi)}, {"C_H_min", s.lo}, {"spread", number(s.ratio())}};
  out.pass = std::isfinite(s.hi) && s.ratio() <= window;
  return out;
}

ParabolicHarnack parabolic_harnack(const WeightedGraph& g, std::span<const double> dist, int m,
                                   Vertex x, double R, std::size_t work_budget) {
  VolumeProfile prof(g, dist, x);
  ParabolicHarnack out;
  out.F_exact = scale_F(prof, m, R);
  {
    double half = std::llround(out.F_exact / 2.0);
    out.F = std::max<std::size_t>(8, static_cast<std::size_t>(2.0 * half));
  }
  const std::size_t F = out.F;
  Region outer = ball(g, dist, x, 2.0 * R);
  Region inner = ball(g, dist, x, R);
  Region lateral = exterior_boundary(g, outer);
  if (lateral.empty()) throw InvalidArgument("parabolic_harnack: B(x,2R) has no exterior boundary");
  out.inner_size = inner.size();
  out.outer_size = outer.size();
  out.lateral_atoms = lateral.size();
  const std::size_t nb = outer.size(), nd = lateral.size(), nz = inner.size();
  auto local = outer.local_index(g.vertex_count());
  auto lat_local = lateral.local_index(g.vertex_count());

  // D- = [ceil(F/4), floor(F/2)], D+ = [ceil(3F/4), F - 1]
  std::vector<std::size_t> dminus, dplus;
  for (std::size_t n = (F + 3) / 4; n <= F / 2; ++n) dminus.push_back(n);
  for (std::size_t n = (3 * F + 3) / 4; n + 1 <= F; ++n) dplus.push_back(n);
  const double total_pairs = static_cast<double>(dminus.size() * dplus.size());
  double work = static_cast<double>(nz) * nz * total_pairs * static_cast<double>(nb);
  std::size_t stride = 1;
  if (work > static_cast<double>(work_budget))
    stride = static_cast<std::size_t>(std::ceil(std::sqrt(work / static_cast<double>(work_budget))));
  auto thin = [&](const std::vector<std::size_t>& v) {
    std::vector<std::size_t> t;
    for (std::size_t i = 0; i < v.size(); i += stride) t.push_back(v[i]);
    if (t.back() != v.back()) t.push_back(v.back());
    return t;
  };
  std::vector<std::size_t> tm = thin(dminus), tp = thin(dplus);
  out.coverage = static_cast<double>(tm.size() * tp.size()) / total_pairs;

  // killed distributions q_j and lateral exit masses e_j from each inner vertex
  std::vector<std::vector<double>> q(nz), e(nz);
  parallel_for(nz, [&](std::size_t i) {
    std::vector<double>& qi = q[i];
    std::vector<double>& ei = e[i];
    qi.assign((F + 1) * nb, 0.0);
    ei.assign((F + 1) * nd, 0.0);
    qi[local[inner[i]]] = 1.0;
    for (std::size_t j = 1; j <= F; ++j) {
      const double* prev = qi.data() + (j - 1) * nb;
      double* cur = qi.data() + j * nb;
      double* ex = ei.data() + j * nd;
      for (std::size_t a = 0; a < nb; ++a) {
        if (prev[a] == 0.0) continue;
        Vertex v = outer[a];
        double share = prev[a] / g.measure(v);
        for (const auto& nb_e : g.neighbors(v)) {
          if (local[nb_e.to] >= 0)
            cur[local[nb_e.to]] += share * nb_e.weight;
          else
            ex[lat_local[nb_e.to]] += share * nb_e.weight;
        }
      }
    }
  });

  std::vector<std::vector<std::size_t>> hops(nz);
  parallel_for(nz, [&](std::size_t i) { hops[i] = hop_distances(g, inner[i]); });

  std::set<std::size_t> deltas;
  for (std::size_t a : tm)
    for (std::size_t b : tp) deltas.insert(b - a);
  const std::size_t jmax = tm.back();

  struct Best {
    double ratio = 0.0;
    std::size_t nm = 0, np = 0;
    Vertex zm = 0, zp = 0;
    std::size_t pairs = 0;
  };
  std::vector<Best> best(nz);
  parallel_for(nz, [&](std::size_t im) {
    Best b;
    std::vector<double> prefix(jmax + 1);
    for (std::size_t ip = 0; ip < nz; ++ip) {
      std::size_t hop = hops[im][inner[ip]];
      // boundary atoms: ratio depends on (j-, Delta) only; prefix max over j-
      std::map<std::size_t, std::vector<double>> lat;
      for (std::size_t d : deltas) {
        if (hop > d) continue;
        double run = 0.0;
        prefix[0] = 0.0;
        for (std::size_t j = 1; j <= jmax; ++j) {
          const double* num = e[im].data() + j * nd;
          const double* d0 = e[ip].data() + (j + d) * nd;
          const double* d1 = j + d + 1 <= F ? e[ip].data() + (j + d + 1) * nd : nullptr;
          for (std::size_t w = 0; w < nd; ++w) {
            if (num[w] <= 0.0) continue;
            double den = d0[w] + (d1 ? d1[w] : 0.0);
            run = std::max(run, den > 0.0 ? num[w] / den : kInf);
          }
          prefix[j] = run;
        }
        lat.emplace(d, prefix);
      }
      for (std::size_t nm : tm)
        for (std::size_t np : tp) {
          std::size_t d = np - nm;
          if (hop > d) continue;
          ++b.pairs;
          double r = lat.at(d)[nm];
          const double* num = q[im].data() + nm * nb;
          const double* d0 = q[ip].data() + np * nb;
          const double* d1 = q[ip].data() + (np + 1) * nb;
          for (std::size_t a = 0; a < nb; ++a) {
            if (num[a] <= 0.0) continue;
            double den = d0[a] + d1[a];
            r = std::max(r, den > 0.0 ? num[a] / den : kInf);
          }
          if (r > b.ratio) {
            b.ratio = r;
            b.nm = nm;
            b.np = np;
            b.zm = inner[im];
            b.zp = inner[ip];
          }
        }
    }
    best[im] = b;
  });
  for (const auto& b : best) {
    out.pairs += b.pairs;
    if (b.ratio > out.constant) {
      out.constant = b.ratio;
      out.n_minus = b.nm;
      out.n_plus = b.np;
      out.x_minus = b.zm;
      out.x_plus = b.zp;
    }
  }
  return out;
}

CheckResult parabolic_harnack_scan(const WeightedGraph& g, const DistanceSource& dist, int m,
                                   Vertex x, std::span<const double> radii, double safe_factor,
                                   double window) {
  CheckResult out;
  out.name = "parabolic_harnack";
  out.params = {{"m", m}, {"metric", dist.name()}, {"x", x},
                {"radii", std::vector<double>(radii.begin(), radii.end())},
                {"safe_factor", safe_factor},
                {"lateral_boundary", "exterior boundary of B(x,2R) prescribed at every step"}};
  out.tolerance = {{"window", window}};
  auto row = dist.row(x);
  Spread s;
  double coverage = 1.0;
  for (double R : radii) {
    Json w = {{"R", R}};
    if (!safe_radius(g, *row, x, R, safe_factor)) {
      w["status"] = "unsafe";
    } else {
      ParabolicHarnack h = parabolic_harnack(g, *row, m, x, R);
      s.add(h.constant);
      coverage = std::min(coverage, h.coverage);
      w["status"] = h.inner_size == 1 ? "single_vertex" : "ok";
      w["C_PH"] = number(h.constant);
      w["F"] = h.F;
      w["F_exact"] = h.F_exact;
      w["inner_size"] = h.inner_size;
      w["outer_size"] = h.outer_size;
      w["lateral_atoms"] = h.lateral_atoms;
      w["pairs"] = h.pairs;
      w["coverage"] = h.coverage;
      w["witness"] = {{"n_minus", h.n_minus}, {"x_minus", h.x_minus},
                      {"n_plus", h.n_plus}, {"x_plus", h.x_plus}};
    }
    out.witnesses.push_back(w);
  }
  if (s.count == 0) throw InvalidArgument("parabolic_harnack_scan: no safe radius");
  out.constants = {{"C_PH_max", number(s.hi)}, {"C_PH_min", s.lo}, {"spread", number(s.ratio())},
                   {"coverage", coverage}};
  out.pass = std::isfinite(s.hi) && s.ratio() <= window;
  if (coverage < 1.0) out.note = "time pairs sampled on a stride; see coverage";
  return out;
}

// ---------------------------------------------------------------- exit times

CheckResult exit_identity_check(const WeightedGraph& g, const std::vector<ExitInstance>& instances,
                                std::span<const int> orders, std::size_t trials,
                                std::uint64_t seed, double sigmas) {
  CheckResult out;
  out.name = "exit_identities";
  out.params = {{"instances", instances.size()},
                {"orders", std::vector<int>(orders.begin(), orders.end())},
                {"trials", trials}, {"seed", seed}};
  out.tolerance = {{"exact_relative", 1e-10}, {"survival", 1e-12}, {"sigmas", sigmas}};
  double worst_exact = 0.0, worst_sigma = 0.0, worst_surv = 0.0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    auto law = exit_distribution(g, inst.region, inst.start);
    double surv = 0.0;
    for (std::size_t n = 0; n < law.survival.size(); ++n)
      surv = std::max(surv, std::abs(law.survival[n] - law.survival_from_pmf(n)));
    worst_surv = std::max(worst_surv, surv);
    ExitStats mc;
    if (trials > 0) mc = simulate_exit(g, inst.region, inst.start, trials, splitmix64(seed + i));
    for (int m : orders) {
      double green = green_row(g, inst.region, m, inst.start).mass(g);
      double hockey = law.moment_hockey(m);
      double rel = std::abs(green - hockey) / std::abs(hockey);
      worst_exact = std::max(worst_exact, rel);
      Json w = {{"instance", i}, {"start", inst.start}, {"region_size", inst.region.size()},
                {"m", m}, {"green_sum", green}, {"exact_law", hockey}, {"relative", rel},
                {"survival_gap", surv}, {"truncated", law.truncated}};
      if (trials > 0) {
        auto sm = sample_moment(mc.samples, [m](std::uint64_t t) {
          return binomial_real(static_cast<double>(t) + m - 1, m);
        });
        double z = sm.std_error > 0 ? std::abs(sm.mean - green) / sm.std_error
                                    : (sm.mean == green ? 0.0 : kInf);
        worst_sigma = std::max(worst_sigma, z);
        w["mc_mean"] = sm.mean;
        w["mc_std_error"] = sm.std_error;
        w["sigmas"] = number(z);
      }
      out.witnesses.push_back(w);
    }
  }
  out.constants = {{"max_relative", worst_exact}, {"max_sigmas", number(worst_sigma)},
                   {"max_survival_gap", worst_surv}};
  out.pass = worst_exact <= 1e-10 && worst_surv <= 1e-12 && worst_sigma <= sigmas;
  return out;
}

CheckResult exit_tail_check(const WeightedGraph& g, const DistanceSource& rho, int m, Vertex x,
                            std::span<const double> radii, std::span<const std::size_t> n_grid,
                            const TailBoundConfig& cfg, double safe_factor) {
  CheckResult out;
  out.name = "exit_tail";
  double c0 = cfg.C0 > 0.0 ? cfg.C0 : std::pow(2.0, m);
  out.params = {{"m", m}, {"metric", rho.name()}, {"x", x},
                {"radii", std::vector<double>(radii.begin(), radii.end())},
                {"n_grid", std::vector<std::size_t>(n_grid.begin(), n_grid.end())},
                {"q", cfg.q}, {"C0", c0}, {"k_cap", cfg.k_cap}};
  out.tolerance = {{"slack", 1e-12}};
  auto row = rho.row(x);
  struct Item {
    double r;
    std::size_t n;
    bool ok = false;
    TailResult t;
  };
  std::vector<Item> items;
  for (double r : radii)
    for (std::size_t n : n_grid) items.push_back({r, n, false, {}});
  parallel_for(items.size(), [&](std::size_t i) {
    auto& it = items[i];
    if (!safe_radius(g, *row, x, it.r, safe_factor)) return;
    Region b = ball(g, *row, x, it.r);
    if (b.size() <= 1 || b.size() == g.vertex_count()) return;
    it.t = tail_and_kdef(g, rho, m, x, it.r, it.n, cfg);
    it.ok = true;
  });
  double worst = -kInf, survive = kInf, maxC = 0.0;
  std::size_t used = 0, nonvac = 0;
  for (const auto& it : items) {
    Json w = {{"r", it.r}, {"n", it.n}, {"status", it.ok ? "ok" : "unsafe"}};
    if (it.ok) {
      const auto& t = it.t;
      ++used;
      if (!t.vacuous) ++nonvac;
      worst = std::max(worst, t.exit_before - t.lemma_bound);
      survive = std::min(survive, t.survive_n_star);
      maxC = std::max(maxC, t.lemma_C0);
      w["exit_before"] = t.exit_before;
      w["lemma_bound"] = t.lemma_bound;
      w["lemma_C"] = t.lemma_C0;
      w["exit_moment"] = t.exit_moment;
      w["exit_moment_max"] = t.exit_moment_max;
      w["n_star"] = t.n_star;
      w["survive_n_star"] = t.survive_n_star;
      w["k"] = t.k;
      w["vacuous"] = t.vacuous;
    }
    out.witnesses.push_back(w);
  }
  if (used == 0) throw InvalidArgument("exit_tail_check: no safe radius");
  out.constants = {{"max_excess", worst}, {"c0", survive}, {"smallest_lemma_C", maxC},
                   {"non_vacuous", nonvac}, {"points", used}};
  out.pass = worst <= 1e-12 && survive > 0.0;
  return out;
}

CheckResult exit_envelope_check(const WeightedGraph& g, const DistanceSource& rho, int m,
                                std::span<const Vertex> centers, std::span<const double> radii,
                                double safe_factor, double window) {
  CheckResult out;
  out.name = "exit_moments";
  double fact = 1.0;
  for (int i = 2; i <= m; ++i) fact *= i;
  const double lo = 1.0 / (fact * std::pow(2.0, m)), hi = std::pow(2.0, m);
  out.params = {{"m", m}, {"metric", rho.name()}, {"centers", vertices(centers)},
                {"radii", std::vector<double>(radii.begin(), radii.end())}};
  out.tolerance = {{"envelope_low", lo}, {"envelope_high", hi}, {"window", window}};
  struct Point {
    Vertex x = 0;
    double r = 0;
    bool ok = false;
    double shifted = 0, raw = 0, em = 0, mean = 0;
  };
  std::vector<Point> pts(centers.size() * radii.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    Point& p = pts[i];
    p.x = centers[i / radii.size()];
    p.r = radii[i % radii.size()];
    auto row = rho.row(p.x);
    Region b = ball(g, *row, p.x, p.r);
    if (!safe_radius(g, *row, p.x, p.r, safe_factor) || b.size() <= 1 || b.size() == g.vertex_count())
      return;
    auto law = exit_distribution(g, b, p.x);
    p.shifted = law.moment_binomial(m, 0);
    p.raw = law.raw_moment(m);
    p.em = law.moment_hockey(m);
    p.mean = law.mean();
    p.ok = true;
  });
  Spread env, leq;
  for (const auto& p : pts) {
    Json w = {{"x", p.x}, {"r", p.r}, {"status", p.ok ? "ok" : "skipped"}};
    if (p.ok) {
      double e = p.shifted / p.raw;
      double l = std::pow(p.em, 1.0 / m) / p.mean;
      env.add(e);
      leq.add(l);
      w["shifted_moment"] = p.shifted;
      w["raw_moment"] = p.raw;
      w["envelope_ratio"] = e;
      w["exit_moment"] = p.em;
      w["mean_exit"] = p.mean;
      w["root_ratio"] = l;
    }
    out.witnesses.push_back(w);
  }
  if (env.count == 0) throw InvalidArgument("exit_envelope_check: no safe, non-degenerate ball");
  out.constants = {{"envelope_min", env.lo}, {"envelope_max", env.hi},
                   {"root_ratio_min", leq.lo}, {"root_ratio_max", leq.hi},
                   {"root_ratio_spread", leq.ratio()}};
  out.pass = env.lo >= lo && env.hi <= hi && leq.ratio() <= window;
  return out;
}

}  // namespace rlab
