#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rlab/forms.hpp"
#include "rlab/graph.hpp"

namespace rlab {

// binom(n + m - 1, m - 1), exact; throws std::overflow_error past 64 bits.
// qm(0, n) is the identity convention: 1 at n = 0, else 0.
std::uint64_t qm(int m, std::uint64_t n);

// Row of g_m^A(x, .) = G_m^A(x, .) / mu(.) over the members of A.
struct GreenTable {
  Region region;
  int order = 1;
  Vertex source = 0;
  std::vector<double> row;
  double min_entry = 0.0;

  double at(Vertex y) const;
  double diagonal() const { return at(source); }
  // sum_y G_m^A(x, y) = sum_y g(x, y) mu(y)
  double mass(const WeightedGraph& g) const;
};

// m nested killed solves. m = 0 gives the identity kernel.
GreenTable green_row(const WeightedGraph& g, const Region& a, int m, Vertex x);
// Reuses an existing factorization of L_A (solver must be killed on a).
GreenTable green_row(const LaplacianSolver& solver, const Region& a, int m, Vertex x);

struct GreenSeries {
  std::vector<double> partial;  // sum_{n<=N} w^n Q_m(n) P_n^A(x, y), y over A
  double spectral_radius = 0.0;  // upper bound used for the tail
  double tail_bound = 0.0;       // bound on the omitted part, per unit sqrt(mu(y)/mu(x))
  std::vector<double> tail;      // per-y tail bound
  std::size_t horizon = 0;
  bool converged = false;        // tail_bound <= requested tolerance
};

// Truncated series for G_m^A. Used as an independent oracle for green_row.
GreenSeries green_series_oracle(const WeightedGraph& g, const Region& a, int m, Vertex x,
                                std::size_t horizon, double omega = 1.0, double tolerance = 1e-12);

// Collatz-Wielandt upper bound on the spectral radius of P^A.
double killed_spectral_radius(const WeightedGraph& g, const Region& a);

// inf E^A(f,f) / ||f||^2 over f supported on A, by dense eigendecomposition.
// Oracle only: |A| <= 400.
double bottom_of_spectrum(const WeightedGraph& g, const Region& a);

struct ReproducingResult {
  double residual = 0.0;       // |E_m^A(g_m^A(x,.), u) - u(x)|
  double self_residual = 0.0;  // |E_m^A(g, g) - g(x,x)|
  double whole_graph_residual = 0.0;  // same with the unkilled form; diagnostic
};

// u is full length and must vanish off A.
ReproducingResult reproducing_check(const WeightedGraph& g, const Region& a, int m, Vertex x,
                                    std::span<const double> u);

struct ComplementResistance {
  double value = 0.0;                 // R_m(x, A^c) = g_m^A(x, x)
  std::vector<double> extremal;       // g_m^A(x, .) / g_m^A(x, x), full length
};

ComplementResistance rm_to_complement(const WeightedGraph& g, const Region& a, int m, Vertex x);

// 1 / inf { E_m(f,f) : f = 1 on A, f = 0 on B }.
double rm_set_to_set(const WeightedGraph& g, int m, const Region& a, const Region& b);

}  // namespace rlab
