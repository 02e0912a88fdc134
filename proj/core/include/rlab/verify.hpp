#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rlab/graph.hpp"
#include "rlab/metric.hpp"
#include "rlab/walk.hpp"

namespace rlab {

using Json = nlohmann::ordered_json;

struct CheckResult {
  std::string name;
  Json params = Json::object();
  Json constants = Json::object();
  Json witnesses = Json::array();  // one object per scanned grid point
  Json tolerance = Json::object();
  bool pass = false;
  std::string note;
  double wall_seconds = 0.0;  // kept out of reports
};

// Lemma direction E_m <= g V is asserted per instance; both ratios must stay
// within `window` (max/min) across the non-degenerate safe scales.
CheckResult einstein_scan(const WeightedGraph& g, const DistanceSource& rho, int m,
                          std::span<const Vertex> centers, std::span<const double> radii,
                          double safe_factor = 2.0, double window = 16.0);

// R_m(x, B(x,r)^c) / r^2 across safe scales, max/min within `window`.
CheckResult resistance_scaling_scan(const WeightedGraph& g, const DistanceSource& rho, int m,
                                    std::span<const Vertex> centers, std::span<const double> radii,
                                    double safe_factor = 2.0, double window = 16.0);

CheckResult volume_doubling_check(const WeightedGraph& g, const DistanceSource& rho, int m,
                                  std::span<const Vertex> centers, std::span<const double> radii,
                                  double safe_factor = 2.0);

struct HkeOptions {
  std::vector<std::size_t> n_grid;  // times n; kernels run to 2 max(n) + 1
  double delta = 0.25;
  std::optional<double> drift_max;           // VD cross-check: max/min of p_2n V <= value
  std::optional<double> negative_drift_min;  // negative control: monotone drift >= value
  std::vector<double> ue_multipliers = {1.0, 2.0, 4.0};
  std::size_t ue_stride = 2;  // every ue_stride-th grid time enters the UE fit
  TailBoundConfig tail;
  double safe_factor = 1.0;  // B(x, f(x,n)) must avoid the boundary
};

CheckResult hke_scan(const WeightedGraph& g, const DistanceSource& rho, int m, Vertex x,
                     const HkeOptions& options);

// p_n(x,x) <= C (Rbar_m(x,A) / n^m + 1 / mu(A)); smallest feasible C.
CheckResult ppa_check(const WeightedGraph& g, const QuasiMetricTable& table, int m, Vertex x,
                      const std::vector<Region>& regions, std::span<const std::size_t> n_grid);

CheckResult pdiff_lemma_check(const WeightedGraph& g, Vertex x, int k_max = 4,
                              std::size_t n_lo = 4, std::size_t n_hi = 256);

CheckResult ledif_identity_check(const WeightedGraph& g, Vertex x, std::span<const int> orders,
                                 std::span<const std::size_t> times, double tolerance = 1e-10);

struct EllipticHarnack {
  double constant = 1.0;
  std::size_t inner_size = 0;
  std::size_t outer_size = 0;
  std::size_t atoms = 0;
  Vertex z = 0, y = 0, w = 0;  // witness
};

// Exact sup over nonnegative harmonic functions on B(x,2r) of
// max_{B(x,r)} h / min_{B(x,r)} h, attained at boundary point masses.
EllipticHarnack elliptic_harnack(const WeightedGraph& g, std::span<const double> dist_from_x,
                                 Vertex x, double r);

CheckResult elliptic_harnack_scan(const WeightedGraph& g, const DistanceSource& dist, Vertex x,
                                  std::span<const double> radii, double safe_factor = 1.0,
                                  double window = 2.0);

struct ParabolicHarnack {
  double constant = 0.0;
  std::size_t F = 0;          // cylinder length used (even, >= 8)
  double F_exact = 0.0;
  std::size_t inner_size = 0, outer_size = 0, lateral_atoms = 0;
  std::size_t pairs = 0;      // (n-, x-, n+, x+) tuples evaluated
  double coverage = 1.0;      // fraction of admissible time pairs evaluated
  std::size_t n_minus = 0, n_plus = 0;
  Vertex x_minus = 0, x_plus = 0;
};

// Cylinder [0, F] x B(x, 2R) with values prescribed on the initial slice and
// on the exterior boundary at every time step.
ParabolicHarnack parabolic_harnack(const WeightedGraph& g, std::span<const double> dist_from_x,
                                   int m, Vertex x, double R, std::size_t work_budget = 400'000'000);

CheckResult parabolic_harnack_scan(const WeightedGraph& g, const DistanceSource& dist, int m,
                                   Vertex x, std::span<const double> radii,
                                   double safe_factor = 1.0, double window = 2.0);

struct ExitInstance {
  Region region;
  Vertex start = 0;
};

// sum_y G_m^A = E[binom(T+m-1,m)] exactly (nested solves vs exact law) and
// within `sigmas` standard errors of Monte Carlo.
CheckResult exit_identity_check(const WeightedGraph& g, const std::vector<ExitInstance>& instances,
                                std::span<const int> orders, std::size_t trials,
                                std::uint64_t seed, double sigmas = 3.0);

CheckResult exit_tail_check(const WeightedGraph& g, const DistanceSource& rho, int m, Vertex x,
                            std::span<const double> radii, std::span<const std::size_t> n_grid,
                            const TailBoundConfig& cfg, double safe_factor = 2.0);

// E[Q_{m+1}(T)] / E[T^m] in [1/(m! 2^m), 2^m] and E_m^{1/m} / E_rho across scales.
CheckResult exit_envelope_check(const WeightedGraph& g, const DistanceSource& rho, int m,
                                std::span<const Vertex> centers, std::span<const double> radii,
                                double safe_factor = 2.0, double window = 16.0);

}  // namespace rlab
