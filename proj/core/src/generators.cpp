#include "rlab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "rlab/error.hpp"

namespace rlab {

std::optional<Vertex> GeneratedGraph::find(std::array<int, 3> c) const {
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] == c) return static_cast<Vertex>(i);
  return std::nullopt;
}

GeneratedGraph gen_lattice(int dim, int side, std::optional<double> exponent) {
  if (dim < 1 || dim > 3) throw InvalidArgument("lattice dim must be 1, 2 or 3");
  if (side < 3 || side % 2 == 0) throw InvalidArgument("lattice side must be odd and >= 3");
  if (exponent && dim != 1) throw InvalidArgument("weight exponent is only defined for dim 1");
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d) {
    n *= static_cast<std::size_t>(side);
    if (n > kMaxVertices) throw CapacityError("lattice exceeds vertex cap");
  }
  GeneratedGraph out;
  out.coords.resize(n, {0, 0, 0});
  std::vector<Edge> edges;
  std::vector<Vertex> boundary;
  std::size_t stride[3] = {1, static_cast<std::size_t>(side),
                           static_cast<std::size_t>(side) * static_cast<std::size_t>(side)};
  for (std::size_t id = 0; id < n; ++id) {
    std::array<int, 3> c{0, 0, 0};
    std::size_t rest = id;
    for (int d = 0; d < dim; ++d) {
      c[d] = static_cast<int>(rest % static_cast<std::size_t>(side));
      rest /= static_cast<std::size_t>(side);
    }
    out.coords[id] = c;
    bool face = false;
    for (int d = 0; d < dim; ++d) {
      if (exponent) {
        face = face || c[d] == side - 1;
      } else {
        face = face || c[d] == 0 || c[d] == side - 1;
      }
      if (c[d] + 1 < side) {
        double w = exponent ? std::pow(1.0 + c[d], *exponent) : 1.0;
        edges.push_back({static_cast<Vertex>(id), static_cast<Vertex>(id + stride[d]), w});
      }
    }
    if (face) boundary.push_back(static_cast<Vertex>(id));
  }
  out.graph = WeightedGraph::from_edges(n, std::move(edges), std::move(boundary));
  std::ostringstream spec;
  spec << "lattice:dim=" << dim << ",side=" << side;
  if (exponent) spec << ",exponent=" << *exponent;
  out.spec = spec.str();
  return out;
}

namespace {

void gasket_triangles(int a, int b, int size, std::vector<std::array<std::pair<int, int>, 3>>& out) {
  if (size == 1) {
    out.push_back({{{a, b}, {a + 1, b}, {a, b + 1}}});
    return;
  }
  int h = size / 2;
  gasket_triangles(a, b, h, out);
  gasket_triangles(a + h, b, h, out);
  gasket_triangles(a, b + h, h, out);
}

}  // namespace

GeneratedGraph gen_gasket(int level) {
  if (level < 0) throw InvalidArgument("gasket level must be >= 0");
  if (level > kMaxGasketLevel)
    throw CapacityError("gasket level " + std::to_string(level) + " exceeds cap " +
                        std::to_string(kMaxGasketLevel));
  int side = 1 << level;
  std::vector<std::array<std::pair<int, int>, 3>> tris;
  gasket_triangles(0, 0, side, tris);
  std::map<std::pair<int, int>, Vertex> ids;
  for (const auto& t : tris)
    for (const auto& p : t) ids.emplace(p, 0);
  GeneratedGraph out;
  Vertex next = 0;
  for (auto& [p, id] : ids) {
    id = next++;
    out.coords.push_back({p.first, p.second, 0});
  }
  std::vector<Edge> edges;
  edges.reserve(tris.size() * 3);
  for (const auto& t : tris) {
    Vertex a = ids[t[0]], b = ids[t[1]], c = ids[t[2]];
    edges.push_back({a, b, 1.0});
    edges.push_back({a, c, 1.0});
    edges.push_back({b, c, 1.0});
  }
  std::vector<Vertex> corners{ids[{0, 0}], ids[{side, 0}], ids[{0, side}]};
  out.graph = WeightedGraph::from_edges(ids.size(), std::move(edges), std::move(corners));
  out.spec = "gasket:level=" + std::to_string(level);
  return out;
}

GeneratedGraph gen_tree(const std::vector<int>& branching, const std::vector<double>& weights) {
  if (branching.empty()) throw InvalidArgument("tree branching profile is empty");
  if (weights.empty()) throw InvalidArgument("tree weight profile is empty");
  if (weights.size() != 1 && weights.size() != branching.size())
    throw InvalidArgument("tree weight profile must have one entry or one per generation");
  for (int b : branching)
    if (b < 1) throw InvalidArgument("tree branching must be >= 1");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("tree weights must be positive");
  GeneratedGraph out;
  std::vector<Edge> edges;
  std::vector<Vertex> current{0};
  out.coords.push_back({0, 0, 0});
  std::size_t n = 1;
  for (std::size_t gen = 0; gen < branching.size(); ++gen) {
    double w = weights.size() == 1 ? weights[0] : weights[gen];
    std::vector<Vertex> next;
    int index = 0;
    for (Vertex parent : current) {
      for (int c = 0; c < branching[gen]; ++c) {
        if (n >= kMaxVertices) throw CapacityError("tree exceeds vertex cap");
        Vertex child = static_cast<Vertex>(n++);
        edges.push_back({parent, child, w});
        next.push_back(child);
        out.coords.push_back({static_cast<int>(gen + 1), index++, 0});
      }
    }
    current = std::move(next);
  }
  out.graph = WeightedGraph::from_edges(n, std::move(edges), current);
  std::ostringstream spec;
  spec << "tree:branching=";
  for (std::size_t i = 0; i < branching.size(); ++i) spec << (i ? "/" : "") << branching[i];
  spec << ",weights=";
  for (std::size_t i = 0; i < weights.size(); ++i) spec << (i ? "/" : "") << weights[i];
  out.spec = spec.str();
  return out;
}

namespace {

std::map<std::string, std::string> parse_params(const std::string& text) {
  std::map<std::string, std::string> params;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("bad generator parameter '" + item + "'");
    params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return params;
}

int to_int(const std::string& s, const std::string& name) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("parameter " + name + " must be an integer");
  }
}

double to_double(const std::string& s, const std::string& name) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("parameter " + name + " must be a number");
  }
}

template <class T, class Conv>
std::vector<T> split_list(const std::string& s, const std::string& name, Conv conv) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, '/')) out.push_back(conv(item, name));
  return out;
}

const std::string& require(const std::map<std::string, std::string>& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw InvalidArgument("generator parameter '" + key + "' is required");
  return it->second;
}

}  // namespace

GeneratedGraph generate_from_spec(const std::string& spec) {
  auto colon = spec.find(':');
  std::string family = spec.substr(0, colon);
  auto params = parse_params(colon == std::string::npos ? "" : spec.substr(colon + 1));
  if (family == "lattice") {
    std::optional<double> exponent;
    if (auto it = params.find("exponent"); it != params.end())
      exponent = to_double(it->second, "exponent");
    return gen_lattice(to_int(require(params, "dim"), "dim"),
                       to_int(require(params, "side"), "side"), exponent);
  }
  if (family == "gasket") return gen_gasket(to_int(require(params, "level"), "level"));
  if (family == "tree") {
    auto branching = split_list<int>(require(params, "branching"), "branching", to_int);
    std::vector<double> weights{1.0};
    if (auto it = params.find("weights"); it != params.end())
      weights = split_list<double>(it->second, "weights", to_double);
    return gen_tree(branching, weights);
  }
  throw InvalidArgument("unknown graph family '" + family + "'");
}

}  // namespace rlab
