#include "rlab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "rlab/error.hpp"
#include "rlab/parallel.hpp"

namespace rlab {

namespace {

bool inside(double d, double r) { return d < r * (1.0 - kRadiusSlack); }

}  // namespace

Region ball(const WeightedGraph& g, std::span<const double> dist, Vertex x, double r) {
  if (dist.size() != g.vertex_count()) throw InvalidArgument("distance row length mismatch");
  std::vector<Vertex> members{x};
  std::vector<char> seen(g.vertex_count(), 0);
  seen[x] = 1;
  std::queue<Vertex> q;
  q.push(x);
  while (!q.empty()) {
    Vertex v = q.front();
    q.pop();
    for (const auto& nb : g.neighbors(v)) {
      if (seen[nb.to] || !inside(dist[nb.to], r)) continue;
      seen[nb.to] = 1;
      members.push_back(nb.to);
      q.push(nb.to);
    }
  }
  return Region(std::move(members));
}

double volume(const WeightedGraph& g, const Region& b) {
  double v = 0.0;
  for (Vertex x : b.members()) v += g.measure(x);
  return v;
}

VolumeProfile::VolumeProfile(const WeightedGraph& g, std::span<const double> dist, Vertex x)
    : center_(x) {
  const std::size_t n = g.vertex_count();
  if (dist.size() != n) throw InvalidArgument("distance row length mismatch");
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return dist[a] < dist[b]; });
  std::vector<std::size_t> parent(n), size(n, 1);
  std::vector<double> mass(n);
  std::vector<char> active(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    parent[i] = i;
    mass[i] = g.measure(static_cast<Vertex>(i));
  }
  auto find = [&](std::size_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
    mass[a] += mass[b];
  };
  // x itself is at distance 0 and enters first
  std::size_t i = 0;
  while (i < n) {
    double d = dist[order[i]];
    std::size_t j = i;
    while (j < n && dist[order[j]] == d) {
      Vertex v = order[j];
      active[v] = 1;
      for (const auto& nb : g.neighbors(v))
        if (active[nb.to]) unite(v, nb.to);
      ++j;
    }
    if (active[x]) {
      std::size_t root = find(x);
      breaks_.push_back(d);
      volumes_.push_back(mass[root]);
      sizes_.push_back(size[root]);
    }
    i = j;
  }
}

std::size_t VolumeProfile::step(double r) const {
  // largest index with breaks_[i] < r (1 - slack)
  std::size_t lo = 0, hi = breaks_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (inside(breaks_[mid], r))
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;  // number of breakpoints inside
}

double VolumeProfile::volume(double r) const {
  std::size_t k = step(r);
  return k == 0 ? 0.0 : volumes_[k - 1];
}

std::size_t VolumeProfile::size(double r) const {
  std::size_t k = step(r);
  return k == 0 ? 0 : sizes_[k - 1];
}

double scale_H(const VolumeProfile& p, double r) { return r * r * p.volume(r); }

double scale_F(const VolumeProfile& p, int m, double r) {
  if (m < 1) throw InvalidArgument("form order m must be >= 1");
  double h = scale_H(p, r);
  return m == 1 ? h : std::pow(h, 1.0 / m);
}

double invert_scaling(const std::function<double(double)>& F, double n) {
  if (!(n > 0.0)) throw InvalidArgument("scaling inverse needs n > 0");
  double hi = 1.0;
  int guard = 0;
  while (F(hi) < n) {
    hi *= 2.0;
    if (++guard > 2000) throw Error("scaling function does not reach the requested value");
  }
  double lo = hi / 2.0;
  guard = 0;
  while (F(lo) >= n && lo > 1e-300) {
    hi = lo;
    lo /= 2.0;
    if (++guard > 2000) break;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (F(mid) >= n)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double scale_f(const VolumeProfile& p, int m, double n) {
  return invert_scaling([&](double r) { return scale_F(p, m, r); }, n);
}

bool safe_radius(const WeightedGraph& g, std::span<const double> dist, Vertex x, double r,
                 double factor) {
  if (g.boundary().empty()) return true;
  Region b = ball(g, dist, x, factor * r);
  for (Vertex v : b.members())
    if (g.on_boundary(v)) return false;
  return true;
}

std::size_t covering_number(const WeightedGraph& g, const DistanceSource& dist, Vertex x, double r) {
  auto dx = dist.row(x);
  Region target = ball(g, *dx, x, 2.0 * r);
  std::vector<Vertex> order(target.members().begin(), target.members().end());
  std::stable_sort(order.begin(), order.end(),
                   [&](Vertex a, Vertex b) { return (*dx)[a] < (*dx)[b]; });
  std::vector<char> covered(g.vertex_count(), 0);
  std::size_t count = 0;
  for (Vertex u : order) {
    if (covered[u]) continue;
    ++count;
    auto du = dist.row(u);
    Region piece = ball(g, *du, u, r);
    for (Vertex v : piece.members()) covered[v] = 1;
    covered[u] = 1;
  }
  return count;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

ScalingProfile vd_scan(const WeightedGraph& g, const DistanceSource& dist, int m,
                       std::span<const Vertex> centers, std::span<const double> radii,
                       double safe_factor, bool with_covering) {
  ScalingProfile out;
  out.order = m;
  const std::size_t nr = radii.size();
  std::vector<std::vector<ScaleRecord>> per_center(centers.size());
  parallel_for(centers.size(), [&](std::size_t c) {
    Vertex x = centers[c];
    auto row = dist.row(x);
    VolumeProfile prof(g, *row, x);
    for (std::size_t k = 0; k < nr; ++k) {
      double r = radii[k];
      ScaleRecord rec;
      rec.center = x;
      rec.radius = r;
      rec.ball_size = prof.size(r);
      rec.volume = prof.volume(r);
      rec.volume_double = prof.volume(2.0 * r);
      rec.H = scale_H(prof, r);
      rec.F = scale_F(prof, m, r);
      rec.safe = safe_radius(g, *row, x, r, safe_factor);
      if (rec.safe && with_covering) rec.covering = covering_number(g, dist, x, r);
      per_center[c].push_back(rec);
    }
  });
  for (auto& v : per_center)
    for (auto& rec : v) out.records.push_back(rec);

  std::vector<const ScaleRecord*> safe;
  for (const auto& rec : out.records)
    if (rec.safe) safe.push_back(&rec);
  if (safe.empty()) throw InvalidArgument("no (center, radius) pair lies in the safe range");

  std::vector<double> rs, hs;
  for (const auto* rec : safe) {
    out.doubling_constant = std::max(out.doubling_constant, rec->volume_double / rec->volume);
    double f2 = std::pow(4.0 * rec->radius * rec->radius * rec->volume_double, 1.0 / m);
    out.F_doubling = std::max(out.F_doubling, f2 / rec->F);
    out.covering_max = std::max(out.covering_max, rec->covering);
    rs.push_back(rec->radius);
    hs.push_back(rec->H);
  }
  out.beta_m = loglog_slope(rs, hs);

  // pairwise exponents: (x, R) against (y, r) with r < R and y in B(x, R)
  out.beta_upper = -std::numeric_limits<double>::infinity();
  out.beta_lower = std::numeric_limits<double>::infinity();
  bool any_pair = false;
  for (const auto* big : safe) {
    auto row = dist.row(big->center);
    for (const auto* small : safe) {
      if (!(small->radius < big->radius)) continue;
      if (big->ball_size <= 1) continue;  // both balls {x}: F ~ r^{2/m}, no scale information
      if (!((*row)[small->center] < big->radius * (1.0 - kRadiusSlack))) continue;
      double e = std::log(big->F / small->F) / std::log(big->radius / small->radius);
      out.beta_upper = std::max(out.beta_upper, e);
      out.beta_lower = std::min(out.beta_lower, e);
      any_pair = true;
    }
  }
  if (!any_pair) out.beta_upper = out.beta_lower = 0.0;
  out.in_W0 = std::isfinite(out.F_doubling) && out.F_doubling > 0.0;
  out.in_W1 = any_pair && out.beta_lower > 1.0 && out.beta_upper >= out.beta_lower;
  out.beta_lower_flag = any_pair && out.beta_lower <= 1.0;
  return out;
}

}  // namespace rlab
