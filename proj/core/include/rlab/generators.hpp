#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rlab/graph.hpp"

namespace rlab {

inline constexpr int kMaxGasketLevel = 8;

// A generated graph plus integer coordinates for locating named vertices.
struct GeneratedGraph {
  WeightedGraph graph;
  std::vector<std::array<int, 3>> coords;
  std::string spec;

  std::optional<Vertex> find(std::array<int, 3> c) const;
};

// Box {0..side-1}^dim. With an exponent (dim 1 only) the edge k--k+1 carries
// (1+k)^a and only the far end counts as boundary, giving a weighted half-line.
GeneratedGraph gen_lattice(int dim, int side, std::optional<double> exponent = {});

// Level-L graphical Sierpinski gasket on the triangular grid of side 2^L.
// Coordinates are (i, j, 0) with i + j <= 2^L; corners form the boundary.
GeneratedGraph gen_gasket(int level);

// Spherically symmetric tree: generation g vertices each get branching[g]
// children joined by edges of weight weights[g]. A single weight is broadcast.
GeneratedGraph gen_tree(const std::vector<int>& branching, const std::vector<double>& weights);

// Parses "lattice:dim=3,side=15", "lattice:dim=1,side=2049,exponent=3",
// "gasket:level=5", "tree:branching=3/3,weights=1/0.5".
GeneratedGraph generate_from_spec(const std::string& spec);

}  // namespace rlab
