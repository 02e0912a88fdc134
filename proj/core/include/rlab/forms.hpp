#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rlab/graph.hpp"

namespace rlab {

using VertexFunction = std::vector<double>;

// (P - I) f on the whole graph.
VertexFunction apply_laplacian(const WeightedGraph& g, std::span<const double> f);

// P^A f for f supported on A; result is zero outside A. Both full length.
VertexFunction apply_killed(const WeightedGraph& g, const Region& a, std::span<const double> f);

// The symmetric matrix M (I - P)^m, optionally killed outside a region. Killed
// operators act on vectors indexed by region members (local coordinates).
class FormOperator {
 public:
  FormOperator(const WeightedGraph& g, int order);
  FormOperator(const WeightedGraph& g, int order, Region killing);

  const WeightedGraph& graph() const { return *graph_; }
  int order() const { return order_; }
  bool killed() const { return killing_.has_value(); }
  const Region& region() const { return *killing_; }
  std::size_t dimension() const { return local_measure_.size(); }
  std::span<const double> local_measure() const { return local_measure_; }

  // out = M (I - P)^m f, as m transition applications followed by a scaling.
  void apply(std::span<const double> f, std::span<double> out) const;
  VertexFunction apply(std::span<const double> f) const;

  // f . M (I - P)^m h
  double energy(std::span<const double> f, std::span<const double> h) const;

 private:
  void step(std::span<const double> in, std::span<double> out) const;  // (I - P) in

  const WeightedGraph* graph_;
  int order_;
  std::optional<Region> killing_;
  std::vector<std::int64_t> local_;  // vertex -> local index (killed only)
  std::vector<double> local_measure_;
};

double energy(const WeightedGraph& g, int m, std::span<const double> f, std::span<const double> h);

// 1/2 sum_{x,y} (f(x)-f(y))(h(x)-h(y)) mu_xy
double edge_energy(const WeightedGraph& g, std::span<const double> f, std::span<const double> h);

VertexFunction apply_form(const WeightedGraph& g, int m, std::span<const double> f);
// Killed variant on full-length f supported on A; result zero outside A.
VertexFunction apply_form(const WeightedGraph& g, int m, const Region& a, std::span<const double> f);

struct SolveOptions {
  double tol = 1e-10;
  std::size_t max_iterations = 0;  // 0 means 20 * dimension
};

struct SolveResult {
  VertexFunction solution;
  std::size_t iterations = 0;
  double residual = 0.0;  // ||A w - rhs|| / ||rhs||
};

// Diagonally scaled conjugate gradient. For whole-graph operators rhs must be
// orthogonal to constants; rhs, search directions and the answer are projected.
SolveResult solve_psd(const FormOperator& op, std::span<const double> rhs, SolveOptions options = {});

// Sparse factorization of the grounded whole-graph Laplacian L = M - W, or of
// the killed L_A = M_A - W_AA. Killed solvers work in local coordinates.
class LaplacianSolver {
 public:
  explicit LaplacianSolver(const WeightedGraph& g);
  LaplacianSolver(const WeightedGraph& g, const Region& a);
  ~LaplacianSolver();
  LaplacianSolver(LaplacianSolver&&) noexcept;
  LaplacianSolver& operator=(LaplacianSolver&&) noexcept;

  const WeightedGraph& graph() const { return *graph_; }
  bool killed() const { return killed_; }
  std::size_t dimension() const { return measure_.size(); }
  std::span<const double> local_measure() const { return measure_; }

  // Whole graph: some solution of L x = b (b must sum to zero). Killed: L_A^{-1} b.
  VertexFunction solve(std::span<const double> b) const;

  // Whole graph: A_m^+ b with Euclidean mean zero. Killed: (A_m^A)^{-1} b.
  // Evaluated as m nested Laplacian solves.
  VertexFunction form_inverse(int m, std::span<const double> b) const;

 private:
  struct Impl;
  const WeightedGraph* graph_;
  bool killed_;
  std::vector<double> measure_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rlab
