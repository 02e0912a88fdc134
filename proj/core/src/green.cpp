#include "rlab/green.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rlab/error.hpp"

namespace rlab {

std::uint64_t qm(int m, std::uint64_t n) {
  if (m < 0) throw InvalidArgument("qm requires m >= 0");
  if (m == 0) return n == 0 ? 1 : 0;
  // binom(n + k, k) with k = m - 1, built as prod_{i=1..k} (n + i) / i
  std::uint64_t k = static_cast<std::uint64_t>(m - 1);
  unsigned __int128 value = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    value = value * (n + i) / i;
    if (value > std::numeric_limits<std::uint64_t>::max())
      throw std::overflow_error("qm(" + std::to_string(m) + ", " + std::to_string(n) +
                                ") overflows 64 bits");
  }
  return static_cast<std::uint64_t>(value);
}

double GreenTable::at(Vertex y) const {
  auto i = region.index_of(y);
  return i ? row[*i] : 0.0;
}

double GreenTable::mass(const WeightedGraph& g) const {
  double s = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * g.measure(region[i]);
  return s;
}

namespace {

GreenTable finish_row(const Region& a, int m, Vertex x, std::vector<double> row) {
  GreenTable t;
  t.region = a;
  t.order = m;
  t.source = x;
  double scale = 0.0;
  for (double v : row) scale = std::max(scale, std::fabs(v));
  t.min_entry = row.empty() ? 0.0 : *std::min_element(row.begin(), row.end());
  if (t.min_entry < -1e-12 * std::max(scale, 1.0))
    throw Error("green kernel has a negative entry " + std::to_string(t.min_entry));
  t.row = std::move(row);
  return t;
}

}  // namespace

GreenTable green_row(const LaplacianSolver& solver, const Region& a, int m, Vertex x) {
  if (!solver.killed() || solver.dimension() != a.size())
    throw InvalidArgument("green_row needs a solver killed on the same region");
  auto i = a.index_of(x);
  if (!i) throw InvalidArgument("source vertex is not in the region");
  std::vector<double> e(a.size(), 0.0);
  e[*i] = 1.0;
  if (m < 0) throw InvalidArgument("green order must be >= 0");
  if (m == 0) {
    e[*i] = 1.0 / solver.local_measure()[*i];
    return finish_row(a, 0, x, std::move(e));
  }
  return finish_row(a, m, x, solver.form_inverse(m, e));
}

GreenTable green_row(const WeightedGraph& g, const Region& a, int m, Vertex x) {
  if (!a.contains(x)) throw InvalidArgument("source vertex is not in the region");
  if (m == 0) {
    std::vector<double> e(a.size(), 0.0);
    e[*a.index_of(x)] = 1.0 / g.measure(x);
    return finish_row(a, 0, x, std::move(e));
  }
  LaplacianSolver solver(g, a);
  return green_row(solver, a, m, x);
}

double killed_spectral_radius(const WeightedGraph& g, const Region& a) {
  if (a.empty()) throw InvalidArgument("region must be nonempty");
  auto idx = a.local_index(g.vertex_count());
  const std::size_t n = a.size();
  // S = M^{1/2} P^A M^{-1/2} is symmetric and nonnegative
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = std::sqrt(g.measure(a[i]));
  auto apply_s = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (const auto& nb : g.neighbors(a[i]))
        if (idx[nb.to] >= 0) s += nb.weight * v[static_cast<std::size_t>(idx[nb.to])] / sq[static_cast<std::size_t>(idx[nb.to])];
      out[i] = s / sq[i];
    }
  };
  std::vector<double> v(sq), sv(n);
  double upper = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200000; ++it) {
    apply_s(v, sv);
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double r = sv[i] / v[i];
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
    upper = std::min(upper, hi);
    if (upper - lo <= 1e-10 * std::max(upper, 1e-300) || upper == 0.0) break;
    // lazy step keeps the iterate positive and kills the -rho mode
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = 0.5 * (v[i] + sv[i]);
      mx = std::max(mx, v[i]);
    }
    for (double& x : v) x /= mx;
  }
  return upper;
}

double bottom_of_spectrum(const WeightedGraph& g, const Region& a) {
  if (a.empty() || a.size() > 400) throw CapacityError("bottom_of_spectrum is limited to |A| <= 400");
  auto idx = a.local_index(g.vertex_count());
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (const auto& nb : g.neighbors(a[static_cast<std::size_t>(i)]))
      if (idx[nb.to] >= 0)
        s(i, idx[nb.to]) -= nb.weight / std::sqrt(g.measure(a[static_cast<std::size_t>(i)]) * g.measure(nb.to));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

GreenSeries green_series_oracle(const WeightedGraph& g, const Region& a, int m, Vertex x,
                                std::size_t horizon, double omega, double tolerance) {
  if (m < 0) throw InvalidArgument("green order must be >= 0");
  if (!(omega >= 0.0 && omega <= 1.0)) throw InvalidArgument("discount must lie in [0, 1]");
  auto xi = a.index_of(x);
  if (!xi) throw InvalidArgument("source vertex is not in the region");
  auto idx = a.local_index(g.vertex_count());
  const std::size_t n = a.size();
  GreenSeries out;
  out.horizon = horizon;
  out.partial.assign(n, 0.0);
  // row vector of P_n^A(x, .)
  std::vector<double> cur(n, 0.0), next(n);
  cur[*xi] = 1.0;
  double weight = 1.0;  // omega^n
  for (std::size_t step = 0; step <= horizon; ++step) {
    double coef = weight * static_cast<double>(qm(m, step));
    if (coef != 0.0)
      for (std::size_t i = 0; i < n; ++i) out.partial[i] += coef * cur[i];
    if (step == horizon) break;
    std::fill(next.begin(), next.end(), 0.0);
    bool alive = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (cur[i] == 0.0) continue;
      Vertex u = a[i];
      double scale = cur[i] / g.measure(u);
      for (const auto& nb : g.neighbors(u))
        if (idx[nb.to] >= 0) {
          next[static_cast<std::size_t>(idx[nb.to])] += scale * nb.weight;
          alive = true;
        }
    }
    cur.swap(next);
    weight *= omega;
    if (!alive || weight == 0.0) {
      // every later term vanishes
      out.horizon = step + 1;
      std::fill(cur.begin(), cur.end(), 0.0);
      break;
    }
  }
  out.spectral_radius = killed_spectral_radius(g, a);
  double s = omega * out.spectral_radius;
  double tail;
  bool exhausted = std::all_of(cur.begin(), cur.end(), [](double v) { return v == 0.0; });
  if (exhausted || s == 0.0 || m == 0) {
    tail = 0.0;
  } else {
    std::size_t n1 = horizon + 1;
    double ratio = s * static_cast<double>(n1 + static_cast<std::size_t>(m)) / static_cast<double>(n1 + 1);
    if (ratio >= 1.0) {
      tail = std::numeric_limits<double>::infinity();
    } else {
      double first = static_cast<double>(qm(m, n1)) * std::pow(s, static_cast<double>(n1));
      tail = first / (1.0 - ratio);
    }
  }
  out.tail_bound = tail;
  out.tail.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.tail[i] = tail * std::sqrt(g.measure(a[i]) / g.measure(x));
  out.converged = tail <= tolerance;
  return out;
}

namespace {

#if defined(__SIZEOF_FLOAT128__)
using Wide = __float128;
#else
using Wide = long double;
#endif

Wide wide_abs(Wide v) { return v < 0 ? -v : v; }

// M_A (I - P_AA)^m f in wide precision; idx maps vertices to local slots (-1 outside).
std::vector<Wide> apply_wide(const WeightedGraph& g, const Region& a, const std::vector<std::int64_t>& idx,
                             int m, std::vector<Wide> f) {
  std::vector<Wide> next(f.size());
  for (int k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      Wide s = 0;
      for (const auto& nb : g.neighbors(a[i]))
        if (idx[nb.to] >= 0) s += nb.weight * f[static_cast<std::size_t>(idx[nb.to])];
      next[i] = f[i] - s / g.measure(a[i]);
    }
    f.swap(next);
  }
  for (std::size_t i = 0; i < a.size(); ++i) f[i] *= g.measure(a[i]);
  return f;
}

Wide dot_wide(const std::vector<Wide>& f, const std::vector<Wide>& h) {
  Wide s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * h[i];
  return s;
}

}  // namespace

ReproducingResult reproducing_check(const WeightedGraph& g, const Region& a, int m, Vertex x,
                                    std::span<const double> u) {
  if (u.size() != g.vertex_count()) throw InvalidArgument("u must be defined on all vertices");
  auto idx = a.local_index(g.vertex_count());
  std::vector<Wide> u_local(a.size());
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (idx[v] >= 0)
      u_local[static_cast<std::size_t>(idx[v])] = u[v];
    else if (u[v] != 0.0)
      throw InvalidArgument("u must vanish off the region");
  }
  const auto xi = *a.index_of(x);
  LaplacianSolver solver(g, a);
  GreenTable row = green_row(solver, a, m, x);
  // a double kernel of size |g| carries ~eps |g| noise, which the m-th power
  // amplifies; refine in wide precision with double corrections
  std::vector<Wide> kernel(row.row.begin(), row.row.end());
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 10; ++it) {
    auto ak = apply_wide(g, a, idx, m, kernel);
    std::vector<double> r(a.size());
    double rmax = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      r[i] = static_cast<double>((i == xi ? Wide(1) : Wide(0)) - ak[i]);
      rmax = std::max(rmax, std::fabs(r[i]));
    }
    if (rmax == 0.0 || rmax >= last) break;
    last = rmax;
    auto d = solver.form_inverse(m, r);
    for (std::size_t i = 0; i < a.size(); ++i) kernel[i] += d[i];
  }
  auto ak = apply_wide(g, a, idx, m, kernel);
  ReproducingResult out;
  out.residual = static_cast<double>(wide_abs(dot_wide(ak, u_local) - u_local[xi]));
  out.self_residual = static_cast<double>(wide_abs(dot_wide(ak, kernel) - kernel[xi]));
  // same pairing with the unkilled form; the kernel extended by zero
  Region all = Region::all(g.vertex_count());
  auto all_idx = all.local_index(g.vertex_count());
  std::vector<Wide> k_full(g.vertex_count(), Wide(0)), u_full(u.begin(), u.end());
  for (std::size_t i = 0; i < a.size(); ++i) k_full[a[i]] = kernel[i];
  out.whole_graph_residual =
      static_cast<double>(wide_abs(dot_wide(apply_wide(g, all, all_idx, m, k_full), u_full) - u_full[x]));
  return out;
}

ComplementResistance rm_to_complement(const WeightedGraph& g, const Region& a, int m, Vertex x) {
  if (m < 1) throw InvalidArgument("form order m must be >= 1");
  GreenTable row = green_row(g, a, m, x);
  ComplementResistance out;
  out.value = row.diagonal();
  out.extremal.assign(g.vertex_count(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out.extremal[a[i]] = row.row[i] / out.value;
  return out;
}

double rm_set_to_set(const WeightedGraph& g, int m, const Region& a, const Region& b) {
  if (m < 1) throw InvalidArgument("form order m must be >= 1");
  if (a.empty() || b.empty()) throw InvalidArgument("both sets must be nonempty");
  for (Vertex v : a.members())
    if (b.contains(v)) throw InvalidArgument("sets overlap at vertex " + std::to_string(v));
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  using Sparse = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> t;
  for (Vertex x = 0; x < g.vertex_count(); ++x) t.emplace_back(x, x, g.measure(x));
  for (const auto& e : g.edges()) {
    t.emplace_back(e.u, e.v, -e.weight);
    t.emplace_back(e.v, e.u, -e.weight);
  }
  Sparse lap(n, n);
  lap.setFromTriplets(t.begin(), t.end());
  Sparse minv_lap = lap;
  for (Eigen::Index k = 0; k < minv_lap.outerSize(); ++k)
    for (Sparse::InnerIterator it(minv_lap, k); it; ++it) it.valueRef() /= g.measure(static_cast<Vertex>(it.row()));
  Sparse form = lap;
  for (int j = 1; j < m; ++j) form = Sparse(form * minv_lap);

  std::vector<double> f(g.vertex_count(), 0.0);
  for (Vertex v : a.members()) f[v] = 1.0;
  std::vector<Eigen::Index> free_ids;
  std::vector<Eigen::Index> local(g.vertex_count(), -1);
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (!a.contains(v) && !b.contains(v)) {
      local[v] = static_cast<Eigen::Index>(free_ids.size());
      free_ids.push_back(v);
    }
  if (!free_ids.empty()) {
    const auto nf = static_cast<Eigen::Index>(free_ids.size());
    std::vector<Eigen::Triplet<double>> ft;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    for (Eigen::Index k = 0; k < form.outerSize(); ++k)
      for (Sparse::InnerIterator it(form, k); it; ++it) {
        Eigen::Index r = local[static_cast<std::size_t>(it.row())];
        if (r < 0) continue;
        Eigen::Index c = local[static_cast<std::size_t>(it.col())];
        if (c >= 0)
          ft.emplace_back(r, c, it.value());
        else
          rhs(r) -= it.value() * f[static_cast<std::size_t>(it.col())];
      }
    Sparse ff(nf, nf);
    ff.setFromTriplets(ft.begin(), ft.end());
    // the product is symmetric in exact arithmetic; average away rounding
    Sparse sym = 0.5 * (ff + Sparse(ff.transpose()));
    Eigen::SimplicialLDLT<Sparse> solver(sym);
    if (solver.info() != Eigen::Success) throw SolverError("set-to-set system factorization failed", 0.0, 0);
    Eigen::VectorXd sol = solver.solve(rhs);
    for (Eigen::Index i = 0; i < nf; ++i) f[static_cast<std::size_t>(free_ids[static_cast<std::size_t>(i)])] = sol(i);
  }
  double e = energy(g, m, f, f);
  if (!(e > 0.0)) throw SolverError("minimal energy is not positive", e, 0);
  return 1.0 / e;
}

}  // namespace rlab
