#include "rlab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "rlab/error.hpp"
#include "rlab/forms.hpp"
#include "rlab/green.hpp"
#include "rlab/parallel.hpp"
#include "rlab/rng.hpp"
#include "rlab/scaling.hpp"

namespace rlab {

KernelSeries::KernelSeries(Vertex source, std::size_t horizon, std::size_t vertex_count,
                           std::vector<double> rows)
    : source_(source), horizon_(horizon), n_(vertex_count), rows_(std::move(rows)) {
  if (rows_.size() != (horizon_ + 1) * n_) throw InvalidArgument("kernel series shape mismatch");
}

std::span<const double> KernelSeries::row(std::size_t step) const {
  if (step > horizon_)
    throw InvalidArgument("time " + std::to_string(step) + " exceeds horizon " + std::to_string(horizon_));
  return {rows_.data() + step * n_, n_};
}

double KernelSeries::p_tilde(std::size_t step, Vertex y) const {
  return p(step, y) + p(step + 1, y);
}

std::vector<double> KernelSeries::diagonal() const {
  std::vector<double> d(horizon_ + 1);
  for (std::size_t t = 0; t <= horizon_; ++t) d[t] = rows_[t * n_ + source_];
  return d;
}

namespace {

// out = P in
void transition(const WeightedGraph& g, std::span<const double> in, std::span<double> out) {
  for (Vertex y = 0; y < g.vertex_count(); ++y) {
    double s = 0.0;
    for (const auto& nb : g.neighbors(y)) s += nb.weight * in[nb.to];
    out[y] = s / g.measure(y);
  }
}

}  // namespace

KernelSeries heat_kernel(const WeightedGraph& g, Vertex x, std::size_t horizon, std::size_t budget) {
  const std::size_t n = g.vertex_count();
  if (x >= n) throw InvalidArgument("source vertex out of range");
  if (horizon >= budget / n || (horizon + 1) * n > budget)
    throw CapacityError("kernel horizon " + std::to_string(horizon) + " on " + std::to_string(n) +
                        " vertices exceeds the budget of " + std::to_string(budget) + " entries");
  std::vector<double> rows((horizon + 1) * n, 0.0);
  rows[x] = 1.0 / g.measure(x);
  for (std::size_t t = 0; t < horizon; ++t)
    transition(g, std::span<const double>(rows.data() + t * n, n),
               std::span<double>(rows.data() + (t + 1) * n, n));
  return KernelSeries(x, horizon, n, std::move(rows));
}

std::vector<double> diagonal_series(const WeightedGraph& g, Vertex x, std::size_t horizon) {
  const std::size_t n = g.vertex_count();
  if (x >= n) throw InvalidArgument("source vertex out of range");
  std::vector<double> cur(n, 0.0), next(n), diag(horizon + 1);
  cur[x] = 1.0 / g.measure(x);
  diag[0] = cur[x];
  for (std::size_t t = 1; t <= horizon; ++t) {
    transition(g, cur, next);
    cur.swap(next);
    diag[t] = cur[x];
  }
  return diag;
}

double time_diff(std::span<const double> f, int k, std::size_t n, int step) {
  if (k < 0) throw InvalidArgument("difference order must be >= 0");
  if (step != 1 && step != 2) throw InvalidArgument("difference step must be 1 or 2");
  std::size_t last = n + static_cast<std::size_t>(step) * static_cast<std::size_t>(k);
  if (last >= f.size())
    throw InvalidArgument("time difference needs index " + std::to_string(last) +
                          " beyond horizon " + std::to_string(f.size() - 1));
  double s = 0.0, c = 1.0;  // c = C(k, i)
  for (int i = 0; i <= k; ++i) {
    double term = c * f[n + static_cast<std::size_t>(step * i)];
    s += ((k - i) % 2 == 0) ? term : -term;
    c = c * (k - i) / (i + 1);
  }
  return s;
}

double time_diff(const KernelSeries& s, Vertex y, int k, std::size_t n, int step) {
  std::vector<double> f(s.horizon() + 1);
  for (std::size_t t = 0; t <= s.horizon(); ++t) f[t] = s.p(t, y);
  return time_diff(f, k, n, step);
}

PdiffResult pdiff_check(std::span<const double> f, int k_max, std::size_t n_lo, std::size_t n_hi) {
  if (n_lo < 1 || n_hi < n_lo) throw InvalidArgument("bad n range for pdiff");
  if (4 * n_hi + 2 * static_cast<std::size_t>(k_max) >= f.size())
    throw InvalidArgument("pdiff needs horizon >= 4 n + 2 k");
  PdiffResult out;
  out.min_positivity = std::numeric_limits<double>::infinity();
  out.worst_margin = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= k_max; ++k) {
    PdiffOrder o;
    o.k = k;
    o.min_positivity = std::numeric_limits<double>::infinity();
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
      double lhs = sign * time_diff(f, k, 4 * n, 2);
      double rhs = std::pow(2.0 * static_cast<double>(n), -k) * f[2 * n];
      double ratio = lhs / rhs;
      if (ratio > o.best_constant) {
        o.best_constant = ratio;
        o.worst_n = n;
      }
      double margin = (lhs - rhs) / f[2 * n];
      out.worst_margin = std::max(out.worst_margin, margin);
      if (margin > 1e-12) ++o.violations;
      o.min_positivity = std::min(o.min_positivity, sign * time_diff(f, k, 2 * n, 2));
    }
    out.violations += o.violations;
    out.min_positivity = std::min(out.min_positivity, o.min_positivity);
    out.orders.push_back(o);
  }
  out.pass = out.violations == 0 && out.min_positivity >= -1e-12;
  return out;
}

PdiffResult pdiff_check(const KernelSeries& s, int k_max, std::size_t n_lo, std::size_t n_hi) {
  auto d = s.diagonal();
  return pdiff_check(d, k_max, n_lo, n_hi);
}

LedifResult ledif_check(const WeightedGraph& g, const KernelSeries& s, int m, std::size_t n) {
  if (m < 1) throw InvalidArgument("form order m must be >= 1");
  if (2 * n + 2 * static_cast<std::size_t>(m) > s.horizon())
    throw InvalidArgument("ledif needs horizon >= 2n + 2m");
  auto f = s.diagonal();
  auto row = s.row(n);
  LedifResult r;
  r.lhs = energy(g, m, row, row);
  r.step2_rhs = ((m % 2 == 0) ? 1.0 : -1.0) * time_diff(f, m, 2 * n, 2);
  r.corrected_rhs = ((m % 2 == 0) ? 1.0 : -1.0) * time_diff(f, m, 2 * n, 1);
  r.relative_error = std::fabs(r.lhs - r.corrected_rhs) / std::max(std::fabs(r.lhs), 1e-300);
  r.step2_discrepancy = std::fabs(r.lhs - r.step2_rhs);
  return r;
}

std::vector<double> mean_exit_times(const WeightedGraph& g, const Region& a) {
  LaplacianSolver solver(g, a);
  std::vector<double> mu(solver.local_measure().begin(), solver.local_measure().end());
  return solver.solve(mu);
}

double mean_exit(const WeightedGraph& g, const Region& a, Vertex x) {
  auto i = a.index_of(x);
  if (!i) throw InvalidArgument("start vertex is not in the region");
  return mean_exit_times(g, a)[*i];
}

double ExitDistribution::survival_from_pmf(std::size_t n) const {
  double s = 1.0;
  for (std::size_t t = 1; t <= n && t < pmf.size(); ++t) s -= pmf[t];
  return s;
}

double ExitDistribution::prob_exit_before(std::size_t n) const {
  if (n == 0) return 0.0;
  return 1.0 - prob_survive(n);
}

double ExitDistribution::prob_survive(std::size_t n) const {
  if (n == 0) return 1.0;
  std::size_t i = n - 1;
  return i < survival.size() ? survival[i] : 0.0;
}

double binomial_real(double n, int k) {
  if (k < 0) return 0.0;
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return c;
}

double ExitDistribution::moment_hockey(int m) const {
  double s = 0.0;
  for (std::size_t t = 0; t < survival.size(); ++t)
    s += binomial_real(static_cast<double>(t) + m - 1, m - 1) * survival[t];
  return s;
}

double ExitDistribution::moment_binomial(int m, int shift) const {
  double s = 0.0;
  for (std::size_t t = 1; t < pmf.size(); ++t)
    s += pmf[t] * binomial_real(static_cast<double>(t) + m + shift, m);
  return s;
}

double ExitDistribution::raw_moment(int m) const {
  double s = 0.0;
  for (std::size_t t = 1; t < pmf.size(); ++t) s += pmf[t] * std::pow(static_cast<double>(t), m);
  return s;
}

double ExitDistribution::mean() const { return std::accumulate(survival.begin(), survival.end(), 0.0); }

ExitDistribution exit_distribution(const WeightedGraph& g, const Region& a, Vertex x,
                                   double survival_floor, std::size_t max_steps) {
  auto xi = a.index_of(x);
  if (!xi) throw InvalidArgument("start vertex is not in the region");
  if (a.size() == g.vertex_count()) throw InvalidArgument("region must not be the whole graph");
  auto idx = a.local_index(g.vertex_count());
  const std::size_t k = a.size();
  std::vector<double> leave(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double out = 0.0;
    for (const auto& nb : g.neighbors(a[i]))
      if (idx[nb.to] < 0) out += nb.weight;
    leave[i] = out / g.measure(a[i]);
  }
  ExitDistribution d;
  std::vector<double> cur(k, 0.0), next(k);
  cur[*xi] = 1.0;
  d.survival.push_back(1.0);
  d.pmf.push_back(0.0);
  for (std::size_t step = 1;; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    double leaving = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (cur[i] == 0.0) continue;
      leaving += cur[i] * leave[i];
      double scale = cur[i] / g.measure(a[i]);
      for (const auto& nb : g.neighbors(a[i]))
        if (idx[nb.to] >= 0) next[static_cast<std::size_t>(idx[nb.to])] += scale * nb.weight;
    }
    cur.swap(next);
    double s = std::accumulate(cur.begin(), cur.end(), 0.0);
    d.survival.push_back(s);
    d.pmf.push_back(leaving);
    if (s < survival_floor) break;
    if (step >= max_steps) {
      d.truncated = true;
      break;
    }
  }
  return d;
}

std::vector<double> exit_moment_all(const WeightedGraph& g, const Region& a, int m) {
  if (m < 1) throw InvalidArgument("form order m must be >= 1");
  LaplacianSolver solver(g, a);
  std::vector<double> mu(solver.local_measure().begin(), solver.local_measure().end());
  return solver.form_inverse(m, mu);
}

ExitMoment exit_moment_exact(const WeightedGraph& g, const Region& a, int m, Vertex x) {
  auto i = a.index_of(x);
  if (!i) throw InvalidArgument("start vertex is not in the region");
  ExitMoment out;
  out.green_sum = exit_moment_all(g, a, m)[*i];
  auto d = exit_distribution(g, a, x);
  out.hockey = d.moment_hockey(m);
  out.shifted = d.moment_binomial(m, 0);
  return out;
}

ExitStats simulate_exit(const WeightedGraph& g, const Region& a, Vertex x, std::size_t trials,
                        std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("need at least one trial");
  if (!a.contains(x)) throw InvalidArgument("start vertex is not in the region");
  if (a.size() == g.vertex_count()) throw InvalidArgument("region must not be the whole graph");
  std::vector<char> in(g.vertex_count(), 0);
  for (Vertex v : a.members()) in[v] = 1;
  ExitStats st;
  st.seed = seed;
  st.samples.resize(trials);
  constexpr std::size_t kChunk = 1024;
  std::size_t chunks = (trials + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::size_t end = std::min(trials, (c + 1) * kChunk);
    for (std::size_t t = c * kChunk; t < end; ++t) {
      auto rng = substream(seed, 0x77616c6b /* walk */, t);
      Vertex v = x;
      std::uint64_t steps = 0;
      do {
        double u = uniform01(rng) * g.measure(v);
        auto nb = g.neighbors(v);
        Vertex next = nb.back().to;
        for (const auto& e : nb) {
          if (u < e.weight) {
            next = e.to;
            break;
          }
          u -= e.weight;
        }
        v = next;
        ++steps;
      } while (in[v]);
      st.samples[t] = steps;
    }
  });
  double sum = 0.0;
  for (auto s : st.samples) sum += static_cast<double>(s);
  st.mean = sum / static_cast<double>(trials);
  double ss = 0.0;
  for (auto s : st.samples) ss += (static_cast<double>(s) - st.mean) * (static_cast<double>(s) - st.mean);
  st.variance = trials > 1 ? ss / static_cast<double>(trials - 1) : 0.0;
  st.std_error = std::sqrt(st.variance / static_cast<double>(trials));
  return st;
}

SampleMoment sample_moment(std::span<const std::uint64_t> samples,
                           const std::function<double(std::uint64_t)>& fn) {
  SampleMoment out;
  if (samples.empty()) return out;
  double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (auto s : samples) sum += fn(s);
  out.mean = sum / n;
  double ss = 0.0;
  for (auto s : samples) {
    double d = fn(s) - out.mean;
    ss += d * d;
  }
  out.std_error = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return out;
}

KdefResult kdef_scan(const std::function<double(double)>& min_exit_moment, double n, int m,
                     double r, double q, std::size_t k_cap, double min_radius) {
  if (!(q > 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in (0, 1]");
  KdefResult out;
  std::size_t best = 0;
  double nm = std::pow(n, m);
  for (std::size_t k = 1; k <= k_cap; ++k) {
    double s = r / static_cast<double>(k);
    if (s < min_radius) break;
    if (nm / static_cast<double>(k) <= q * min_exit_moment(s)) best = k;
  }
  out.k = best == 0 ? 1 : best;
  out.vacuous = best < 2;
  return out;
}

namespace {

double lemma_bound(double e, double emax, double n, int m, double c) {
  return 1.0 - e / (c * emax) + c * std::pow(n, m) / emax;
}

}  // namespace

TailResult tail_and_kdef(const WeightedGraph& g, const DistanceSource& dist, int m, Vertex x,
                         double r, std::size_t n, const TailBoundConfig& cfg) {
  if (!(cfg.q > 0.0 && cfg.q < 1.0 + 1e-15)) throw InvalidArgument("q must lie in (0, 1)");
  auto rx = dist.row(x);
  Region b = ball(g, *rx, x, r);
  if (b.size() == g.vertex_count()) throw InvalidArgument("ball covers the whole graph");
  TailResult out;
  out.center = x;
  out.radius = r;
  out.n = n;
  out.H = r * r * volume(g, b);

  auto moments = exit_moment_all(g, b, m);
  out.exit_moment = moments[*b.index_of(x)];
  out.exit_moment_max = *std::max_element(moments.begin(), moments.end());
  double c0 = cfg.C0 > 0.0 ? cfg.C0 : std::pow(2.0, m);
  out.n_star = std::pow(0.5 * out.exit_moment / (c0 * c0), 1.0 / m);
  // only P(T < n) and P(T >= n*) are read, so the law is needed up to there
  const std::size_t reach = std::max<std::size_t>(n, static_cast<std::size_t>(std::ceil(out.n_star))) + 2;
  auto law = exit_distribution(g, b, x, 1e-26, reach);
  out.exit_before = law.prob_exit_before(n);

  out.lemma_bound = lemma_bound(out.exit_moment, out.exit_moment_max, static_cast<double>(n), m, c0);
  // smallest C >= 1 for which the lemma holds at this instance
  if (lemma_bound(out.exit_moment, out.exit_moment_max, static_cast<double>(n), m, 1.0) >= out.exit_before) {
    out.lemma_C0 = 1.0;
  } else {
    double lo = 1.0, hi = 2.0;
    while (lemma_bound(out.exit_moment, out.exit_moment_max, static_cast<double>(n), m, hi) < out.exit_before)
      hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      if (lemma_bound(out.exit_moment, out.exit_moment_max, static_cast<double>(n), m, mid) >= out.exit_before)
        hi = mid;
      else
        lo = mid;
    }
    out.lemma_C0 = hi;
  }
  out.survive_n_star = law.prob_survive(static_cast<std::size_t>(std::ceil(out.n_star)));

  // deterministic sample of sub-ball centres: x, then evenly spaced by distance
  std::vector<Vertex> members(b.members().begin(), b.members().end());
  std::stable_sort(members.begin(), members.end(),
                   [&](Vertex a1, Vertex a2) { return (*rx)[a1] < (*rx)[a2]; });
  std::vector<Vertex> sample;
  std::size_t want = std::min(cfg.max_subcenters, members.size());
  for (std::size_t i = 0; i < want; ++i) {
    std::size_t j = want == 1 ? 0 : i * (members.size() - 1) / (want - 1);
    if (sample.empty() || sample.back() != members[j]) sample.push_back(members[j]);
  }
  std::vector<std::shared_ptr<const std::vector<double>>> rows;
  for (Vertex y : sample) rows.push_back(dist.row(y));
  std::map<std::pair<Vertex, std::size_t>, double> cache;
  auto min_moment = [&](double s) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sample.size(); ++i) {
      Vertex y = sample[i];
      Region sub = ball(g, *rows[i], y, s);
      if (sub.size() == g.vertex_count()) continue;  // never exits: E = infinity
      auto key = std::make_pair(y, sub.size());
      auto it = cache.find(key);
      double e;
      if (it != cache.end()) {
        e = it->second;
      } else {
        e = exit_moment_all(g, sub, m)[*sub.index_of(y)];
        cache.emplace(key, e);
      }
      best = std::min(best, e);
    }
    return best;
  };
  auto kd = kdef_scan(min_moment, static_cast<double>(n), m, r, cfg.q, cfg.k_cap);
  out.k = kd.k;
  out.vacuous = kd.vacuous;
  return out;
}

}  // namespace rlab
