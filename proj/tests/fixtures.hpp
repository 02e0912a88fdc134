#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rlab/generators.hpp"
#include "rlab/graph.hpp"
#include "rlab/rng.hpp"

namespace fx {

using rlab::Edge;
using rlab::Region;
using rlab::Vertex;
using rlab::WeightedGraph;

inline WeightedGraph single_edge(double w = 1.0) { return WeightedGraph::from_edges(2, {{0, 1, w}}); }

inline WeightedGraph triangle() { return rlab::gen_gasket(0).graph; }

// 0 - 1 - ... - (n-1), unit weights
inline WeightedGraph path(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return WeightedGraph::from_edges(n, e);
}

inline WeightedGraph star(std::size_t leaves) {
  std::vector<Edge> e;
  for (Vertex i = 1; i <= leaves; ++i) e.push_back({0, i, 1.0});
  return WeightedGraph::from_edges(leaves + 1, e);
}

// Path with weights drawn from [0.5, 2].
inline WeightedGraph random_path(std::size_t n, std::uint64_t seed) {
  auto rng = rlab::substream(seed, 99, 0);
  std::vector<Edge> e;
  for (Vertex i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 0.5 + 1.5 * rlab::uniform01(rng)});
  return WeightedGraph::from_edges(n, e);
}

// Connected random graph: a random spanning tree plus extra chords.
inline WeightedGraph random_graph(std::size_t n, std::size_t extra, std::uint64_t seed) {
  auto rng = rlab::substream(seed, 98, 0);
  std::vector<Edge> e;
  std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
  for (Vertex i = 1; i < n; ++i) {
    Vertex j = static_cast<Vertex>(rng() % i);
    e.push_back({j, i, 0.25 + 2.0 * rlab::uniform01(rng)});
    seen[i][j] = seen[j][i] = true;
  }
  for (std::size_t k = 0; k < extra; ++k) {
    Vertex a = static_cast<Vertex>(rng() % n), b = static_cast<Vertex>(rng() % n);
    if (a == b || seen[a][b]) continue;
    seen[a][b] = seen[b][a] = true;
    e.push_back({std::min(a, b), std::max(a, b), 0.25 + 2.0 * rlab::uniform01(rng)});
  }
  return WeightedGraph::from_edges(n, e);
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, std::uint64_t k = 0) {
  auto rng = rlab::substream(seed, 97, k);
  std::vector<double> v(n);
  for (auto& x : v) x = 2.0 * rlab::uniform01(rng) - 1.0;
  return v;
}

// Vertices within `hops` of x.
inline Region hop_ball(const WeightedGraph& g, Vertex x, std::size_t hops) {
  auto d = rlab::hop_distances(g, x);
  std::vector<Vertex> m;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (d[v] <= hops) m.push_back(v);
  return Region(m);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

}  // namespace fx
