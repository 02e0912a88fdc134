#include "rlab/metric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "rlab/error.hpp"
#include "rlab/forms.hpp"
#include "rlab/parallel.hpp"
#include "rlab/rng.hpp"

namespace rlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

QuasiMetricTable::QuasiMetricTable(int order, std::size_t vertex_count, std::vector<Vertex> sources,
                                   std::vector<double> values)
    : order_(order), n_(vertex_count), sources_(std::move(sources)), values_(std::move(values)) {
  if (values_.size() != sources_.size() * n_) throw InvalidArgument("table shape mismatch");
  source_index_.assign(n_, -1);
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    if (sources_[i] >= n_) throw InvalidArgument("source out of range");
    source_index_[sources_[i]] = static_cast<std::int64_t>(i);
  }
}

std::span<const double> QuasiMetricTable::row(Vertex source) const {
  if (source >= n_ || source_index_[source] < 0)
    throw InvalidArgument("vertex " + std::to_string(source) + " is not a table source");
  return {values_.data() + static_cast<std::size_t>(source_index_[source]) * n_, n_};
}

double QuasiMetricTable::at(Vertex x, Vertex y) const {
  if (x < n_ && source_index_[x] >= 0) return row(x)[y];
  return row(y)[x];
}

QuasiMetricTable rm_matrix(const WeightedGraph& g, int m, const RmOptions& options) {
  if (m < 1) throw InvalidArgument("form order m must be >= 1");
  const std::size_t n = g.vertex_count();
  std::vector<Vertex> sources;
  if (options.landmarks) {
    sources = *options.landmarks;
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    if (sources.empty()) throw InvalidArgument("landmark set is empty");
    for (Vertex l : sources)
      if (l >= n) throw InvalidArgument("landmark out of range");
  } else {
    if (n > kMaxAllPairsVertices)
      throw CapacityError("full R_m table needs V <= " + std::to_string(kMaxAllPairsVertices) +
                          " (V = " + std::to_string(n) + "); use landmark mode");
    sources.resize(n);
    for (std::size_t i = 0; i < n; ++i) sources[i] = static_cast<Vertex>(i);
  }
  LaplacianSolver solver(g);
  const double inv_n = 1.0 / static_cast<double>(n);
  // column of the pseudoinverse: A_m^+ e_x = A_m^+ (e_x - 1/n)
  auto column = [&](Vertex x) {
    std::vector<double> rhs(n, -inv_n);
    rhs[x] += 1.0;
    return solver.form_inverse(m, rhs);
  };
  const std::size_t k = sources.size();
  std::vector<double> values(k * n);
  parallel_for(k, [&](std::size_t i) {
    auto col = column(sources[i]);
    std::copy(col.begin(), col.end(), values.begin() + static_cast<std::ptrdiff_t>(i * n));
  });
  std::vector<double> diag(n);
  std::vector<std::int64_t> index(n, -1);
  for (std::size_t i = 0; i < k; ++i) index[sources[i]] = static_cast<std::int64_t>(i);
  if (k == n) {
    for (std::size_t x = 0; x < n; ++x) diag[x] = values[x * n + x];
  } else {
    parallel_for(n, [&](std::size_t y) {
      if (index[y] >= 0) {
        diag[y] = values[static_cast<std::size_t>(index[y]) * n + y];
      } else {
        diag[y] = column(static_cast<Vertex>(y))[y];
      }
    });
  }
  if (k == n) {
    for (std::size_t x = 0; x < n; ++x) {
      values[x * n + x] = 0.0;
      for (std::size_t y = x + 1; y < n; ++y) {
        double r = diag[x] + diag[y] - values[x * n + y] - values[y * n + x];
        values[x * n + y] = r;
        values[y * n + x] = r;
      }
    }
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      Vertex x = sources[i];
      for (std::size_t y = 0; y < n; ++y) {
        double& v = values[i * n + y];
        v = (y == x) ? 0.0 : diag[x] + diag[y] - 2.0 * v;
      }
    }
    // symmetric entries between two landmarks
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) {
        double r = 0.5 * (values[i * n + sources[j]] + values[j * n + sources[i]]);
        values[i * n + sources[j]] = r;
        values[j * n + sources[i]] = r;
      }
  }
  return QuasiMetricTable(m, n, std::move(sources), std::move(values));
}

std::vector<double> rm_extremizer(const WeightedGraph& g, int m, Vertex x, Vertex y) {
  LaplacianSolver solver(g);
  std::vector<double> rhs(g.vertex_count(), 0.0);
  rhs[x] += 1.0;
  rhs[y] -= 1.0;
  return solver.form_inverse(m, rhs);
}

KeyInequalityResult key_inequality_check(const QuasiMetricTable& table, const WeightedGraph& g,
                                         int m, std::span<const double> f) {
  KeyInequalityResult out;
  out.trials = 1;
  double e = energy(g, m, f, f);
  for (Vertex x : table.sources()) {
    auto row = table.row(x);
    for (Vertex y = 0; y < table.vertex_count(); ++y) {
      if (y == x) continue;
      double d = f[x] - f[y];
      double lhs = d * d;
      double rhs = row[y] * e;
      double scale = std::max({lhs, rhs, 1e-300});
      out.max_violation = std::max(out.max_violation, (lhs - rhs) / scale);
      if (rhs > 0.0) out.max_ratio = std::max(out.max_ratio, lhs / rhs);
    }
  }
  return out;
}

KeyInequalityResult key_inequality_check(const QuasiMetricTable& table, const WeightedGraph& g,
                                         int m, std::size_t trials, std::uint64_t seed) {
  KeyInequalityResult out;
  out.max_violation = -kInf;
  for (std::size_t t = 0; t < trials; ++t) {
    auto rng = substream(seed, 0x6b6579 /* key */, t);
    std::vector<double> f(g.vertex_count());
    for (double& v : f) v = 2.0 * uniform01(rng) - 1.0;
    auto r = key_inequality_check(table, g, m, f);
    out.max_violation = std::max(out.max_violation, r.max_violation);
    out.max_ratio = std::max(out.max_ratio, r.max_ratio);
  }
  out.trials = trials;
  if (trials == 0) out.max_violation = 0.0;
  return out;
}

QuasiConstant quasi_constant(const QuasiMetricTable& table) {
  auto src = table.sources();
  const std::size_t k = src.size();
  QuasiConstant out;
  if (k < 3) return out;
  std::vector<double> q(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) q[i * k + j] = (i == j) ? kInf : table.at(src[i], src[j]);
  std::vector<double> best_ratio(k, 0.0);
  std::vector<std::size_t> best_y(k, 0);
  parallel_for(k, [&](std::size_t x) {
    std::vector<double> best(k, kInf);
    const double* qx = q.data() + x * k;
    for (std::size_t z = 0; z < k; ++z) {
      if (z == x) continue;
      double a = qx[z];
      const double* qz = q.data() + z * k;
      for (std::size_t y = 0; y < k; ++y) best[y] = std::min(best[y], a + qz[y]);
    }
    for (std::size_t y = 0; y < k; ++y) {
      if (y == x) continue;
      double r = qx[y] / best[y];
      if (r > best_ratio[x]) {
        best_ratio[x] = r;
        best_y[x] = y;
      }
    }
  });
  std::size_t bx = 0;
  for (std::size_t x = 1; x < k; ++x)
    if (best_ratio[x] > best_ratio[bx]) bx = x;
  std::size_t by = best_y[bx], bz = 0;
  double bestsum = kInf;
  for (std::size_t z = 0; z < k; ++z) {
    if (z == bx || z == by) continue;
    double s = q[bx * k + z] + q[z * k + by];
    if (s < bestsum) {
      bestsum = s;
      bz = z;
    }
  }
  out.value = best_ratio[bx];
  out.x = src[bx];
  out.y = src[by];
  out.z = src[bz];
  return out;
}

MetricTable::MetricTable(std::size_t vertex_count, double p, std::vector<double> values)
    : n_(vertex_count), p_(p), values_(std::move(values)) {
  if (values_.size() != n_ * n_) throw InvalidArgument("metric table shape mismatch");
}

std::vector<double> complete_graph_dijkstra(std::size_t n, Vertex source,
                                            std::span<const double> length) {
  std::vector<double> dist(n, kInf);
  std::vector<char> done(n, 0);
  dist[source] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    double du = kInf;
    for (std::size_t v = 0; v < n; ++v)
      if (!done[v] && dist[v] < du) {
        du = dist[v];
        u = v;
      }
    if (u == n) break;
    done[u] = 1;
    const double* lu = length.data() + u * n;
    for (std::size_t v = 0; v < n; ++v) {
      double c = du + lu[v];
      if (c < dist[v]) dist[v] = c;
    }
  }
  return dist;
}

namespace {

// One closure sweep; returns the number of entries lowered.
std::size_t closure_pass(std::vector<double>& d, std::size_t n) {
  std::size_t changes = 0;
  for (std::size_t x = 0; x < n; ++x) {
    double* dx = d.data() + x * n;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      double a = dx[y];
      const double* dy = d.data() + y * n;
      for (std::size_t z = 0; z < n; ++z) {
        double c = a + dy[z];
        if (c < dx[z]) {
          dx[z] = c;
          d[z * n + x] = c;
          ++changes;
        }
      }
    }
  }
  return changes;
}

}  // namespace

Metrization metrize(const QuasiMetricTable& table, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("metrization exponent must lie in (0, 1]");
  if (!table.full()) throw InvalidArgument("metrize needs a full table");
  const std::size_t n = table.vertex_count();
  if (n > kMaxExactMetricVertices)
    throw CapacityError("exact all-pairs metrization needs V <= " +
                        std::to_string(kMaxExactMetricVertices) + "; use single-source mode");
  std::vector<double> w(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    auto row = table.row(static_cast<Vertex>(x));
    for (std::size_t y = 0; y < n; ++y) w[x * n + y] = (x == y) ? 0.0 : std::pow(row[y], p);
  }
  std::vector<double> d(n * n);
  parallel_for(n, [&](std::size_t x) {
    auto row = complete_graph_dijkstra(n, static_cast<Vertex>(x), w);
    std::copy(row.begin(), row.end(), d.begin() + static_cast<std::ptrdiff_t>(x * n));
  });
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      double v = std::min(d[x * n + y], d[y * n + x]);
      d[x * n + y] = v;
      d[y * n + x] = v;
    }
  Metrization out;
  for (int pass = 0; pass < 64; ++pass) {
    std::size_t changes = closure_pass(d, n);
    out.repairs += changes;
    if (changes == 0) break;
    if (pass == 63) throw Error("metric repair did not settle");
  }
  out.c = kInf;
  out.C = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      double ratio = table.at(static_cast<Vertex>(x), static_cast<Vertex>(y)) /
                     std::pow(d[x * n + y], 1.0 / p);
      out.c = std::min(out.c, ratio);
      out.C = std::max(out.C, ratio);
    }
  if (n < 2) out.c = out.C = 1.0;
  out.metric = MetricTable(n, p, std::move(d));
  return out;
}

double adaptive_exponent(double k) {
  if (!(k > 0.0)) throw InvalidArgument("quasi constant must be positive");
  double p = 1.0 / (1.0 + std::log2(std::max(k, 1.0)));
  return p;
}

TriangleReport triangle_check_exhaustive(const MetricTable& metric) {
  const std::size_t n = metric.vertex_count();
  auto d = metric.values();
  TriangleReport r;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      double a = d[x * n + y];
      for (std::size_t z = 0; z < n; ++z) {
        double excess = d[x * n + z] - (a + d[y * n + z]);
        if (excess > 0.0) {
          ++r.violations;
          r.worst = std::max(r.worst, excess);
        }
      }
    }
  r.checked = n * n * n;
  return r;
}

TriangleReport triangle_check_sampled(const MetricTable& metric, std::size_t samples,
                                      std::uint64_t seed) {
  const std::size_t n = metric.vertex_count();
  TriangleReport r;
  if (n == 0) return r;
  auto rng = substream(seed, 0x747269 /* tri */, 0);
  for (std::size_t s = 0; s < samples; ++s) {
    auto x = static_cast<Vertex>(rng() % n), y = static_cast<Vertex>(rng() % n),
         z = static_cast<Vertex>(rng() % n);
    double excess = metric.at(x, z) - (metric.at(x, y) + metric.at(y, z));
    if (excess > 0.0) {
      ++r.violations;
      r.worst = std::max(r.worst, excess);
    }
  }
  r.checked = samples;
  return r;
}

namespace {

constexpr char kMagic[4] = {'R', 'L', 'M', 'T'};
constexpr std::uint32_t kMetricVersion = 1;
static_assert(std::endian::native == std::endian::little, "metric files are little-endian");

}  // namespace

void save_metric(const MetricTable& metric, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write metric file " + path);
  std::uint64_t n = metric.vertex_count();
  double p = metric.exponent();
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kMetricVersion), sizeof kMetricVersion);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&p), sizeof p);
  for (std::size_t x = 1; x < n; ++x) {
    auto row = metric.row(static_cast<Vertex>(x));
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(x * sizeof(double)));
  }
  if (!out) throw Error("write failed for " + path);
}

MetricTable load_metric(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open metric file " + path);
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t n = 0;
  double p = 0.0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&p), sizeof p);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw Error("not a metric file: " + path);
  if (version != kMetricVersion) throw Error("unsupported metric file version");
  if (n == 0 || n > kMaxVertices) throw Error("bad vertex count in metric file");
  std::vector<double> values(n * n, 0.0);
  std::vector<double> buf(n);
  for (std::size_t x = 1; x < n; ++x) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(x * sizeof(double)));
    if (!in) throw Error("truncated metric file " + path);
    for (std::size_t y = 0; y < x; ++y) {
      values[x * n + y] = buf[y];
      values[y * n + x] = buf[y];
    }
  }
  return MetricTable(n, p, std::move(values));
}

std::shared_ptr<const std::vector<double>> TableDistances::row(Vertex x) const {
  auto r = metric_.row(x);
  return std::make_shared<const std::vector<double>>(r.begin(), r.end());
}

ChainDistances::ChainDistances(std::shared_ptr<const QuasiMetricTable> table, double p)
    : table_(std::move(table)), p_(p) {
  if (!table_->full()) throw InvalidArgument("single-source chains need a full table");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("metrization exponent must lie in (0, 1]");
  const std::size_t n = table_->vertex_count();
  powered_.resize(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    auto row = table_->row(static_cast<Vertex>(x));
    for (std::size_t y = 0; y < n; ++y)
      powered_[x * n + y] = (x == y) ? 0.0 : (p_ == 0.5 ? std::sqrt(row[y]) : std::pow(row[y], p_));
  }
}

std::shared_ptr<const std::vector<double>> ChainDistances::row(Vertex x) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
  }
  auto r = std::make_shared<const std::vector<double>>(
      complete_graph_dijkstra(table_->vertex_count(), x, powered_));
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(x, std::move(r)).first->second;
}

LandmarkDistances::LandmarkDistances(const QuasiMetricTable& table, double p)
    : n_(table.vertex_count()) {
  auto src = table.sources();
  const std::size_t k = src.size();
  std::vector<double> w(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      w[i * k + j] = (i == j) ? 0.0 : std::pow(table.at(src[i], src[j]), p);
  for (std::size_t i = 0; i < k; ++i) {
    auto among = complete_graph_dijkstra(k, static_cast<Vertex>(i), w);
    auto row = std::make_shared<std::vector<double>>(n_, kInf);
    for (std::size_t j = 0; j < k; ++j) {
      auto rj = table.row(src[j]);
      for (std::size_t y = 0; y < n_; ++y) {
        double c = among[j] + (y == src[j] ? 0.0 : std::pow(rj[y], p));
        if (c < (*row)[y]) (*row)[y] = c;
      }
    }
    (*row)[src[i]] = 0.0;
    rows_.emplace(src[i], std::move(row));
  }
}

std::shared_ptr<const std::vector<double>> LandmarkDistances::row(Vertex x) const {
  auto it = rows_.find(x);
  if (it == rows_.end())
    throw InvalidArgument("vertex " + std::to_string(x) + " is not a landmark");
  return it->second;
}

std::shared_ptr<const std::vector<double>> HopDistances::row(Vertex x) const {
  auto hops = hop_distances(*g_, x);
  auto r = std::make_shared<std::vector<double>>(hops.size());
  for (std::size_t i = 0; i < hops.size(); ++i) (*r)[i] = static_cast<double>(hops[i]);
  return r;
}

}  // namespace rlab
