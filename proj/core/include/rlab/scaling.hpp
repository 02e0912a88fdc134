#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rlab/graph.hpp"
#include "rlab/metric.hpp"

namespace rlab {

// Relative slack in ball membership: y is inside B(x, r) when
// rho(x, y) < r (1 - kRadiusSlack). Keeps exact ties such as sqrt(4) = 2 out.
inline constexpr double kRadiusSlack = 1e-9;

// Component of {y : rho(x,y) < r} containing x.
Region ball(const WeightedGraph& g, std::span<const double> dist_from_x, Vertex x, double r);
double volume(const WeightedGraph& g, const Region& b);

// Exact step function r -> V(x, r) from one distance row.
class VolumeProfile {
 public:
  VolumeProfile() = default;
  VolumeProfile(const WeightedGraph& g, std::span<const double> dist_from_x, Vertex x);

  Vertex center() const { return center_; }
  double volume(double r) const;
  std::size_t size(double r) const;
  // Distinct distances at which the ball can grow, ascending, starting at 0.
  std::span<const double> breakpoints() const { return breaks_; }
  double max_distance() const { return breaks_.back(); }

 private:
  std::size_t step(double r) const;
  Vertex center_ = 0;
  std::vector<double> breaks_;
  std::vector<double> volumes_;
  std::vector<std::size_t> sizes_;
};

// H(x, r) = r^2 V(x, r) and F(x, r) = H^{1/m}
double scale_H(const VolumeProfile& p, double r);
double scale_F(const VolumeProfile& p, int m, double r);

// inf { r > 0 : F(r) >= n } for nondecreasing F, by bisection to relative 1e-13.
double invert_scaling(const std::function<double(double)>& F, double n);
// f(x, n) for the profile's F.
double scale_f(const VolumeProfile& p, int m, double n);

struct ScaleRecord {
  Vertex center = 0;
  double radius = 0.0;
  std::size_t ball_size = 0;
  double volume = 0.0;
  double volume_double = 0.0;  // V(x, 2r)
  double F = 0.0;
  double H = 0.0;
  bool safe = false;
  std::size_t covering = 0;  // greedy cover of B(x,2r) by r-balls, safe records only
};

struct ScalingProfile {
  int order = 1;
  std::vector<ScaleRecord> records;
  double doubling_constant = 0.0;  // max V(x,2r)/V(x,r) over safe records
  double F_doubling = 0.0;         // max F(x,2r)/F(x,r)
  double beta_m = 0.0;             // least-squares slope of log H against log r
  double beta_upper = 0.0;         // max pairwise exponent of F (y in B(x,R), R > r, B(x,R) != {x})
  double beta_lower = 0.0;         // min pairwise exponent of F
  std::size_t covering_max = 0;
  bool in_W0 = false;
  bool in_W1 = false;
  bool beta_lower_flag = false;  // beta' <= 1
};

// True when B(x, factor r) avoids the generator boundary.
bool safe_radius(const WeightedGraph& g, std::span<const double> dist_from_x, Vertex x, double r,
                 double factor);

ScalingProfile vd_scan(const WeightedGraph& g, const DistanceSource& dist, int m,
                       std::span<const Vertex> centers, std::span<const double> radii,
                       double safe_factor = 2.0, bool with_covering = true);

// Greedy cover of B(x, 2r) by balls B(u, r) centred at uncovered points.
std::size_t covering_number(const WeightedGraph& g, const DistanceSource& dist, Vertex x, double r);

// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace rlab
