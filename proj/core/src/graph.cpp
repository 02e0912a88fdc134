#include "rlab/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "rlab/error.hpp"

namespace rlab {

namespace {

bool edge_less(const Edge& a, const Edge& b) {
  return a.u != b.u ? a.u < b.u : a.v < b.v;
}

std::string format_weight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  return buf;
}

}  // namespace

WeightedGraph WeightedGraph::from_edges(std::size_t vertex_count, std::vector<Edge> edges,
                                        std::vector<Vertex> boundary) {
  if (vertex_count == 0) throw InvalidArgument("graph must have at least one vertex");
  if (vertex_count > kMaxVertices)
    throw CapacityError("graph has " + std::to_string(vertex_count) + " vertices; cap is " +
                        std::to_string(kMaxVertices));
  for (auto& e : edges) {
    if (e.u >= vertex_count || e.v >= vertex_count)
      throw InvalidArgument("edge endpoint out of range");
    if (e.u == e.v) throw InvalidArgument("self-loop at vertex " + std::to_string(e.u));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw InvalidArgument("edge weight must be positive and finite");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), edge_less);
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v)
      throw InvalidArgument("duplicate edge " + std::to_string(edges[i].u) + " " +
                            std::to_string(edges[i].v));
  }
  if (!is_connected(vertex_count, edges)) throw InvalidArgument("graph is not connected");

  WeightedGraph g;
  g.edges_ = std::move(edges);
  g.measure_.assign(vertex_count, 0.0);
  std::vector<std::size_t> deg(vertex_count, 0);
  for (const auto& e : g.edges_) {
    g.measure_[e.u] += e.weight;
    g.measure_[e.v] += e.weight;
    ++deg[e.u];
    ++deg[e.v];
  }
  g.offsets_.assign(vertex_count + 1, 0);
  for (std::size_t x = 0; x < vertex_count; ++x) g.offsets_[x + 1] = g.offsets_[x] + deg[x];
  g.adjacency_.resize(g.offsets_.back());
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : g.edges_) {
    g.adjacency_[fill[e.u]++] = {e.v, e.weight};
    g.adjacency_[fill[e.v]++] = {e.u, e.weight};
  }
  for (std::size_t x = 0; x < vertex_count; ++x) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[x]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[x + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.to < b.to; });
  }
  g.total_measure_ = 0.0;
  for (double m : g.measure_) g.total_measure_ += m;

  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  for (Vertex b : boundary)
    if (b >= vertex_count) throw InvalidArgument("boundary vertex out of range");
  g.boundary_ = std::move(boundary);
  return g;
}

double WeightedGraph::weight(Vertex x, Vertex y) const {
  auto nb = neighbors(x);
  auto it = std::lower_bound(nb.begin(), nb.end(), y,
                             [](const Neighbor& n, Vertex v) { return n.to < v; });
  return (it != nb.end() && it->to == y) ? it->weight : 0.0;
}

bool WeightedGraph::on_boundary(Vertex x) const {
  return std::binary_search(boundary_.begin(), boundary_.end(), x);
}

WeightedGraph WeightedGraph::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw InvalidArgument("scale factor must be positive");
  std::vector<Edge> e(edges_.begin(), edges_.end());
  for (auto& edge : e) edge.weight *= factor;
  return from_edges(vertex_count(), std::move(e), boundary_);
}

std::uint64_t WeightedGraph::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(vertex_count());
  mix(edges_.size());
  for (const auto& e : edges_) {
    mix(e.u);
    mix(e.v);
    mix(std::bit_cast<std::uint64_t>(e.weight));
  }
  return h;
}

Region::Region(std::vector<Vertex> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

Region Region::all(std::size_t vertex_count) {
  std::vector<Vertex> m(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) m[i] = static_cast<Vertex>(i);
  return Region(std::move(m));
}

bool Region::contains(Vertex v) const {
  return std::binary_search(members_.begin(), members_.end(), v);
}

std::optional<std::size_t> Region::index_of(Vertex v) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), v);
  if (it == members_.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - members_.begin());
}

std::vector<std::int64_t> Region::local_index(std::size_t vertex_count) const {
  std::vector<std::int64_t> idx(vertex_count, -1);
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] >= vertex_count) throw InvalidArgument("region vertex out of range");
    idx[members_[i]] = static_cast<std::int64_t>(i);
  }
  return idx;
}

double validate_p0(const WeightedGraph& g) {
  double p0 = 1.0;
  for (const auto& e : g.edges()) {
    p0 = std::min(p0, e.weight / g.measure(e.u));
    p0 = std::min(p0, e.weight / g.measure(e.v));
  }
  return p0;
}

Region exterior_boundary(const WeightedGraph& g, const Region& a) {
  auto idx = a.local_index(g.vertex_count());
  std::vector<Vertex> out;
  for (Vertex x : a.members())
    for (const auto& nb : g.neighbors(x))
      if (idx[nb.to] < 0) out.push_back(nb.to);
  return Region(std::move(out));
}

bool is_connected(std::size_t vertex_count, std::span<const Edge> edges) {
  if (vertex_count == 0) return false;
  std::vector<std::size_t> parent(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) parent[i] = i;
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t components = vertex_count;
  for (const auto& e : edges) {
    std::size_t a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

std::vector<std::size_t> hop_distances(const WeightedGraph& g, Vertex x) {
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.vertex_count(), kInf);
  std::queue<Vertex> q;
  dist[x] = 0;
  q.push(x);
  while (!q.empty()) {
    Vertex v = q.front();
    q.pop();
    for (const auto& nb : g.neighbors(v)) {
      if (dist[nb.to] == kInf) {
        dist[nb.to] = dist[v] + 1;
        q.push(nb.to);
      }
    }
  }
  return dist;
}

Vertex graph_center(const WeightedGraph& g) {
  auto farthest = [&g](const std::vector<std::size_t>& d) {
    Vertex best = 0;
    for (std::size_t v = 0; v < d.size(); ++v)
      if (d[v] > d[best]) best = static_cast<Vertex>(v);
    return best;
  };
  Vertex a = farthest(hop_distances(g, 0));
  auto da = hop_distances(g, a);
  Vertex b = farthest(da);
  auto db = hop_distances(g, b);
  std::size_t len = da[b];
  // vertex on a shortest a-b path at distance floor(len/2) from b, lowest id
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (da[v] + db[v] == len && db[v] == len / 2) return static_cast<Vertex>(v);
  return a;
}

WeightedGraph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::size_t n = 0, m = 0;
  std::vector<Edge> edges;
  std::vector<Vertex> boundary;
  std::set<std::pair<Vertex, Vertex>> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream c(line.substr(first + 1));
      std::string key;
      if (c >> key && key == "boundary") {
        long long b;
        while (c >> b) {
          if (b < 0) throw ParseError("negative boundary id", lineno);
          boundary.push_back(static_cast<Vertex>(b));
        }
      }
      continue;
    }
    std::istringstream ls(line);
    if (!have_header) {
      long long nn, mm;
      if (!(ls >> nn >> mm) || nn <= 0 || mm < 0)
        throw ParseError("expected header 'N M'", lineno);
      std::string rest;
      if (ls >> rest) throw ParseError("trailing content after header", lineno);
      if (static_cast<std::size_t>(nn) > kMaxVertices)
        throw CapacityError("graph has " + std::to_string(nn) + " vertices; cap is " +
                            std::to_string(kMaxVertices));
      n = static_cast<std::size_t>(nn);
      m = static_cast<std::size_t>(mm);
      edges.reserve(m);
      have_header = true;
      continue;
    }
    long long u, v;
    std::string wtext;
    if (!(ls >> u >> v >> wtext)) throw ParseError("expected 'u v w'", lineno);
    std::string rest;
    if (ls >> rest) throw ParseError("trailing content after edge", lineno);
    double w;
    try {
      std::size_t used = 0;
      w = std::stod(wtext, &used);
      if (used != wtext.size()) throw std::invalid_argument("partial");
    } catch (const std::exception&) {
      throw ParseError("bad weight '" + wtext + "'", lineno);
    }
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw ParseError("vertex id out of range", lineno);
    if (u == v) throw ParseError("self-loop", lineno);
    if (!(w > 0.0) || !std::isfinite(w)) throw ParseError("weight must be positive", lineno);
    const auto a = static_cast<Vertex>(u), b = static_cast<Vertex>(v);
    const std::pair<Vertex, Vertex> key{std::min(a, b), std::max(a, b)};
    if (!seen.insert(key).second)
      throw ParseError("duplicate edge " + std::to_string(key.first) + " " +
                           std::to_string(key.second),
                       lineno);
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v), w});
  }
  if (!have_header) throw ParseError("missing header", lineno);
  if (edges.size() != m)
    throw ParseError("header declares " + std::to_string(m) + " edges, found " +
                         std::to_string(edges.size()),
                     lineno);
  if (!is_connected(n, edges)) throw InvalidArgument("graph is not connected");
  return WeightedGraph::from_edges(n, std::move(edges), std::move(boundary));
}

std::string format_graph(const WeightedGraph& g) {
  std::string out = std::to_string(g.vertex_count()) + " " + std::to_string(g.edge_count()) + "\n";
  if (!g.boundary().empty()) {
    out += "# boundary";
    for (Vertex b : g.boundary()) out += " " + std::to_string(b);
    out += "\n";
  }
  for (const auto& e : g.edges())
    out += std::to_string(e.u) + " " + std::to_string(e.v) + " " + format_weight(e.weight) + "\n";
  return out;
}

WeightedGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open graph file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_graph(ss.str());
}

void save_graph(const WeightedGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write graph file " + path);
  out << format_graph(g);
  if (!out) throw Error("write failed for " + path);
}

}  // namespace rlab
