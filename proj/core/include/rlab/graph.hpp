#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rlab {

using Vertex = std::uint32_t;

inline constexpr std::size_t kMaxVertices = 50000;
inline constexpr std::size_t kMaxAllPairsVertices = 4000;

struct Edge {
  Vertex u;
  Vertex v;
  double weight;
};

struct Neighbor {
  Vertex to;
  double weight;
};

// Connected weighted graph with symmetric positive conductances. Edges are kept
// once with u < v in sorted order; adjacency is CSR. Immutable after build.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  // Validates ids, weights, duplicates and connectivity. Edges with u > v are
  // normalized; a pair given in both orientations counts as a duplicate.
  static WeightedGraph from_edges(std::size_t vertex_count, std::vector<Edge> edges,
                                  std::vector<Vertex> boundary = {});

  std::size_t vertex_count() const { return measure_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  double measure(Vertex x) const { return measure_[x]; }
  std::span<const double> measures() const { return measure_; }
  double total_measure() const { return total_measure_; }

  std::span<const Neighbor> neighbors(Vertex x) const {
    return {adjacency_.data() + offsets_[x], adjacency_.data() + offsets_[x + 1]};
  }
  std::size_t degree(Vertex x) const { return offsets_[x + 1] - offsets_[x]; }

  // mu_xy, or 0 when x and y are not adjacent.
  double weight(Vertex x, Vertex y) const;
  double transition(Vertex x, Vertex y) const { return weight(x, y) / measure_[x]; }

  // Generator boundary (box faces, gasket corners, tree leaves). May be empty.
  std::span<const Vertex> boundary() const { return boundary_; }
  bool on_boundary(Vertex x) const;

  // Same graph with every conductance multiplied by factor.
  WeightedGraph scaled(double factor) const;

  // FNV-1a over the canonical edge list.
  std::uint64_t hash() const;

 private:
  std::vector<Edge> edges_;
  std::vector<double> measure_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<Vertex> boundary_;
  double total_measure_ = 0.0;
};

// Finite vertex set, stored sorted and deduplicated.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Vertex> members);
  static Region all(std::size_t vertex_count);
  static Region single(Vertex v) { return Region(std::vector<Vertex>{v}); }

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::span<const Vertex> members() const { return members_; }
  Vertex operator[](std::size_t i) const { return members_[i]; }
  bool contains(Vertex v) const;
  std::optional<std::size_t> index_of(Vertex v) const;

  // Dense map vertex -> local index, -1 outside.
  std::vector<std::int64_t> local_index(std::size_t vertex_count) const;

  bool operator==(const Region& other) const = default;

 private:
  std::vector<Vertex> members_;
};

// Smallest one-step probability over edges, both orientations.
double validate_p0(const WeightedGraph& g);

Region exterior_boundary(const WeightedGraph& g, const Region& a);

bool is_connected(std::size_t vertex_count, std::span<const Edge> edges);

// BFS hop distances from x; unreachable entries are SIZE_MAX.
std::vector<std::size_t> hop_distances(const WeightedGraph& g, Vertex x);

// Midpoint of a double-sweep BFS diameter path.
Vertex graph_center(const WeightedGraph& g);

WeightedGraph load_graph(const std::string& path);
void save_graph(const WeightedGraph& g, const std::string& path);
WeightedGraph parse_graph(const std::string& text);
std::string format_graph(const WeightedGraph& g);

}  // namespace rlab
