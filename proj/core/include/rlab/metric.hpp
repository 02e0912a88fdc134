#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlab/graph.hpp"

namespace rlab {

inline constexpr std::size_t kMaxExactMetricVertices = 1500;

// R_m(x, y) for x in `sources` and every vertex y. Full mode has every vertex
// as a source; landmark mode keeps only the landmark rows.
class QuasiMetricTable {
 public:
  QuasiMetricTable() = default;
  QuasiMetricTable(int order, std::size_t vertex_count, std::vector<Vertex> sources,
                   std::vector<double> values);

  int order() const { return order_; }
  std::size_t vertex_count() const { return n_; }
  bool full() const { return sources_.size() == n_; }
  std::span<const Vertex> sources() const { return sources_; }
  std::span<const double> row(Vertex source) const;
  double at(Vertex x, Vertex y) const;

 private:
  int order_ = 1;
  std::size_t n_ = 0;
  std::vector<Vertex> sources_;
  std::vector<std::int64_t> source_index_;
  std::vector<double> values_;  // sources x n, row-major
};

struct RmOptions {
  std::optional<std::vector<Vertex>> landmarks;
};

// R_m(x,y) = (e_x - e_y) . A_m^+ (e_x - e_y) from nested Laplacian solves.
QuasiMetricTable rm_matrix(const WeightedGraph& g, int m, const RmOptions& options = {});

// The maximizing f in the variational definition: A_m^+ (e_x - e_y).
std::vector<double> rm_extremizer(const WeightedGraph& g, int m, Vertex x, Vertex y);

struct KeyInequalityResult {
  double max_violation = 0.0;  // max (|f(x)-f(y)|^2 - R E(f,f)) / scale, over pairs and trials
  double max_ratio = 0.0;      // max |f(x)-f(y)|^2 / (R E(f,f))
  std::size_t trials = 0;
};

// Random f uniform in [-1, 1]^V from the given seed.
KeyInequalityResult key_inequality_check(const QuasiMetricTable& table, const WeightedGraph& g,
                                         int m, std::size_t trials, std::uint64_t seed = 1);
// One given function.
KeyInequalityResult key_inequality_check(const QuasiMetricTable& table, const WeightedGraph& g,
                                         int m, std::span<const double> f);

struct QuasiConstant {
  double value = 0.0;
  Vertex x = 0, y = 0, z = 0;  // witness triple
};

// max over distinct triples (sources only) of R(x,y) / (R(x,z) + R(z,y)).
QuasiConstant quasi_constant(const QuasiMetricTable& table);

class MetricTable {
 public:
  MetricTable() = default;
  MetricTable(std::size_t vertex_count, double p, std::vector<double> values);

  std::size_t vertex_count() const { return n_; }
  double exponent() const { return p_; }
  double at(Vertex x, Vertex y) const { return values_[static_cast<std::size_t>(x) * n_ + y]; }
  std::span<const double> row(Vertex x) const {
    return {values_.data() + static_cast<std::size_t>(x) * n_, n_};
  }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t n_ = 0;
  double p_ = 0.5;
  std::vector<double> values_;
};

struct Metrization {
  MetricTable metric;
  double c = 0.0;  // min R / rho^{1/p}
  double C = 0.0;  // max R / rho^{1/p}
  std::size_t repairs = 0;  // rounding-level triangle repairs applied
};

// Chain infimum of R^p over the complete graph, then repaired so the triangle
// inequality holds exactly in floating point. Full tables with V <= 1500.
Metrization metrize(const QuasiMetricTable& table, double p);

// p = 1 / (1 + log2 K)
double adaptive_exponent(double k);

struct TriangleReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst = 0.0;  // max of rho(x,z) - rho(x,y) - rho(y,z)
};

TriangleReport triangle_check_exhaustive(const MetricTable& metric);
TriangleReport triangle_check_sampled(const MetricTable& metric, std::size_t samples,
                                      std::uint64_t seed);

void save_metric(const MetricTable& metric, const std::string& path);
MetricTable load_metric(const std::string& path);

// Rows of a distance on the vertex set, computed or looked up on demand.
class DistanceSource {
 public:
  virtual ~DistanceSource() = default;
  virtual std::size_t vertex_count() const = 0;
  virtual std::shared_ptr<const std::vector<double>> row(Vertex x) const = 0;
  virtual std::string name() const = 0;
};

class TableDistances final : public DistanceSource {
 public:
  explicit TableDistances(MetricTable metric) : metric_(std::move(metric)) {}
  std::size_t vertex_count() const override { return metric_.vertex_count(); }
  std::shared_ptr<const std::vector<double>> row(Vertex x) const override;
  std::string name() const override { return "table"; }
  const MetricTable& metric() const { return metric_; }

 private:
  MetricTable metric_;
};

// Single-source chain infimum of R^p over a full table, O(V^2) per row, cached.
class ChainDistances final : public DistanceSource {
 public:
  ChainDistances(std::shared_ptr<const QuasiMetricTable> table, double p);
  std::size_t vertex_count() const override { return table_->vertex_count(); }
  std::shared_ptr<const std::vector<double>> row(Vertex x) const override;
  std::string name() const override { return "chain"; }
  const QuasiMetricTable& table() const { return *table_; }

 private:
  std::shared_ptr<const QuasiMetricTable> table_;
  double p_;
  std::vector<double> powered_;  // R^p, n x n
  mutable std::mutex mutex_;
  mutable std::unordered_map<Vertex, std::shared_ptr<const std::vector<double>>> cache_;
};

// Chains restricted to pass through landmarks; rows exist for landmarks only.
class LandmarkDistances final : public DistanceSource {
 public:
  LandmarkDistances(const QuasiMetricTable& table, double p);
  std::size_t vertex_count() const override { return n_; }
  std::shared_ptr<const std::vector<double>> row(Vertex x) const override;
  std::string name() const override { return "landmark"; }

 private:
  std::size_t n_;
  std::unordered_map<Vertex, std::shared_ptr<const std::vector<double>>> rows_;
};

// Graph hop distance.
class HopDistances final : public DistanceSource {
 public:
  explicit HopDistances(const WeightedGraph& g) : g_(&g) {}
  std::size_t vertex_count() const override { return g_->vertex_count(); }
  std::shared_ptr<const std::vector<double>> row(Vertex x) const override;
  std::string name() const override { return "hop"; }

 private:
  const WeightedGraph* g_;
};

// Dense single-source shortest paths over the complete graph whose edge
// lengths are the row-major n x n matrix `length`. O(V^2).
std::vector<double> complete_graph_dijkstra(std::size_t n, Vertex source,
                                            std::span<const double> length);

}  // namespace rlab
