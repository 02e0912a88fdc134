#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rlab/graph.hpp"
#include "rlab/metric.hpp"

namespace rlab {

inline constexpr std::size_t kDefaultKernelBudget = 50'000'000;  // stored doubles

// p_n(x, .) = P_n(x, .) / mu(.) for 0 <= n <= N, stored densely.
class KernelSeries {
 public:
  KernelSeries() = default;
  KernelSeries(Vertex source, std::size_t horizon, std::size_t vertex_count, std::vector<double> rows);

  Vertex source() const { return source_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t vertex_count() const { return n_; }
  std::span<const double> row(std::size_t step) const;
  double p(std::size_t step, Vertex y) const { return row(step)[y]; }
  // p_n + p_{n+1}; needs n + 1 <= N
  double p_tilde(std::size_t step, Vertex y) const;
  std::vector<double> diagonal() const;

 private:
  Vertex source_ = 0;
  std::size_t horizon_ = 0;
  std::size_t n_ = 0;
  std::vector<double> rows_;
};

KernelSeries heat_kernel(const WeightedGraph& g, Vertex x, std::size_t horizon,
                         std::size_t budget = kDefaultKernelBudget);

// p_n(x, x) for 0 <= n <= N without storing rows.
std::vector<double> diagonal_series(const WeightedGraph& g, Vertex x, std::size_t horizon);

// k-fold difference (D f)_n = f_{n+step} - f_n applied at n. step 2 is the
// printed operator; step 1 is the variant used by the corrected energy identity.
double time_diff(std::span<const double> f, int k, std::size_t n, int step = 2);
double time_diff(const KernelSeries& s, Vertex y, int k, std::size_t n, int step = 2);

struct PdiffOrder {
  int k = 0;
  double best_constant = 0.0;  // max over n of lhs / rhs
  std::size_t violations = 0;
  std::size_t worst_n = 0;
  double min_positivity = 0.0;  // min of (-1)^k D^k f at 2n
};

struct PdiffResult {
  std::vector<PdiffOrder> orders;
  double worst_margin = 0.0;  // max over k, n of (lhs - rhs) / f_{2n}
  std::size_t violations = 0;
  double min_positivity = 0.0;
  bool pass = false;
};

// (-1)^k (D^k f)_{4n} <= (2n)^{-k} f_{2n} and (-1)^k (D^k f)_{2n} >= -1e-12 for
// the diagonal sequence f_j = p_j(x, x), 0 <= k <= k_max, n in [n_lo, n_hi].
PdiffResult pdiff_check(std::span<const double> diagonal, int k_max, std::size_t n_lo,
                        std::size_t n_hi);
PdiffResult pdiff_check(const KernelSeries& s, int k_max, std::size_t n_lo, std::size_t n_hi);

struct LedifResult {
  double lhs = 0.0;            // E_m(p_n(x,.), p_n(x,.))
  double step2_rhs = 0.0;      // (-1)^m (D^m f)_{2n}, step 2
  double corrected_rhs = 0.0;  // sum_i (-1)^i C(m,i) p_{2n+i}(x,x)
  double relative_error = 0.0; // |lhs - corrected| / max(|lhs|, tiny)
  double step2_discrepancy = 0.0;  // |lhs - step2_rhs|
};

LedifResult ledif_check(const WeightedGraph& g, const KernelSeries& s, int m, std::size_t n);

// E_x[T_A] from (I - P^A) h = 1.
double mean_exit(const WeightedGraph& g, const Region& a, Vertex x);
// h over the members of A.
std::vector<double> mean_exit_times(const WeightedGraph& g, const Region& a);

// Exact law of T_A from the killed kernel.
struct ExitDistribution {
  std::vector<double> survival;  // S_n = P(T > n), n = 0..N, from killed row sums
  std::vector<double> pmf;       // P(T = n), n = 0..N (pmf[0] = 0), from the mass leaving A
  bool truncated = false;        // stopped at the step cap before reaching the floor
  // P(T > n) rebuilt from the pmf
  double survival_from_pmf(std::size_t n) const;
  double prob_exit_before(std::size_t n) const;  // P(T < n)
  double prob_survive(std::size_t n) const;       // P(T >= n)
  // E[binom(T + m - 1, m)] = sum_n Q_m(n) S_n
  double moment_hockey(int m) const;
  // E[binom(T + m - 1, m)] summed against the pmf
  double moment_binomial(int m, int shift = -1) const;
  double raw_moment(int m) const;  // E[T^m]
  double mean() const;
};

ExitDistribution exit_distribution(const WeightedGraph& g, const Region& a, Vertex x,
                                   double survival_floor = 1e-26,
                                   std::size_t max_steps = 20'000'000);

struct ExitMoment {
  double green_sum = 0.0;      // sum_y G_m^A(x, y), nested solves
  double hockey = 0.0;         // E[binom(T+m-1, m)] from the exact law
  double shifted = 0.0;        // E[binom(T+m, m)], the literal Q_{m+1}(T)
};

ExitMoment exit_moment_exact(const WeightedGraph& g, const Region& a, int m, Vertex x);
// sum_y G_m^A(x, y) for every x in A, one nested solve.
std::vector<double> exit_moment_all(const WeightedGraph& g, const Region& a, int m);

struct ExitStats {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> samples;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
};

// Independent walks from x until the first step outside A. Trial t draws from
// substream(seed, walk stream, t); results are merged in trial order.
ExitStats simulate_exit(const WeightedGraph& g, const Region& a, Vertex x, std::size_t trials,
                        std::uint64_t seed);

struct SampleMoment {
  double mean = 0.0;
  double std_error = 0.0;
};
SampleMoment sample_moment(std::span<const std::uint64_t> samples,
                           const std::function<double(std::uint64_t)>& fn);

double binomial_real(double n, int k);  // C(n, k) for real n >= 0

struct TailBoundConfig {
  double q = 0.25;
  double C0 = 0.0;     // 0: use 2^m
  double c0 = 0.0;     // measured
  std::size_t k_cap = 64;
  std::size_t max_subcenters = 16;
};

// Largest k in [1, k_cap] with n^m / k <= q min_y E(y, r / k); k < 2 or no k
// means the bound is vacuous.
struct KdefResult {
  std::size_t k = 1;
  bool vacuous = true;
};
KdefResult kdef_scan(const std::function<double(double /*radius*/)>& min_exit_moment, double n,
                     int m, double r, double q, std::size_t k_cap, double min_radius = 0.0);

struct TailResult {
  Vertex center = 0;
  double radius = 0.0;
  std::size_t n = 0;
  std::size_t k = 1;
  bool vacuous = true;
  double exit_before = 0.0;    // P_x(T_B < n), exact
  double lemma_bound = 0.0;    // Lemma bound with C0
  double lemma_C0 = 0.0;       // smallest C >= 1 making the lemma hold here
  double exit_moment = 0.0;    // E_m(B | x)
  double exit_moment_max = 0.0;  // max over B
  double n_star = 0.0;         // (C0^{-2} E_m / 2)^{1/m}
  double survive_n_star = 0.0; // P_x(T_B >= n_star)
  double H = 0.0;              // r^2 V(x, r)
};

// Exact tail quantities on B = B(x, r); exit moments over sub-balls B(y, r/k)
// for a deterministic sample of y in B.
TailResult tail_and_kdef(const WeightedGraph& g, const DistanceSource& dist, int m, Vertex x,
                         double r, std::size_t n, const TailBoundConfig& cfg);

}  // namespace rlab
