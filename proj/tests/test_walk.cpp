#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "rlab/error.hpp"
#include "rlab/forms.hpp"
#include "rlab/generators.hpp"
#include "rlab/green.hpp"
#include "rlab/scaling.hpp"
#include "rlab/walk.hpp"

using namespace rlab;
using doctest::Approx;

namespace {

Region interval(Vertex c, Vertex r) {
  std::vector<Vertex> m;
  for (Vertex v = c - r + 1; v <= c + r - 1; ++v) m.push_back(v);
  return Region(m);
}

}  // namespace

TEST_SUITE("walk") {

TEST_CASE("heat kernel examples") {
  auto e = heat_kernel(fx::single_edge(), 0, 9);
  for (std::size_t n = 0; n <= 9; ++n) CHECK(e.p(n, 0) == (n % 2 == 0 ? 1.0 : 0.0));
  auto z = heat_kernel(gen_lattice(1, 41).graph, 20, 6);
  CHECK(z.p(2, 20) == 0.25);
  CHECK(z.p(4, 20) == Approx(3.0 / 16.0).epsilon(1e-15));
  CHECK(z.p(6, 20) == Approx(5.0 / 32.0).epsilon(1e-15));
  CHECK(z.p_tilde(2, 20) == 0.25);
  CHECK_THROWS_AS(heat_kernel(gen_lattice(2, 101).graph, 0, 100000), CapacityError);
}

TEST_CASE("heat kernel matches dense powers") {
  auto g = fx::random_graph(30, 25, 13);
  auto s = heat_kernel(g, 4, 12);
  for (int n : {0, 1, 5, 12}) {
    auto want = oracle::heat_row(g, 4, n);
    for (Vertex y = 0; y < 30; ++y) CHECK(s.p(static_cast<std::size_t>(n), y) == Approx(want[y]).epsilon(1e-12));
  }
}

TEST_CASE("heat kernel invariants") {
  for (const auto& g : {gen_gasket(3).graph, gen_lattice(2, 9).graph, fx::random_graph(40, 40, 14)}) {
    const std::size_t n = g.vertex_count();
    auto sx = heat_kernel(g, 0, 40);
    auto sy = heat_kernel(g, static_cast<Vertex>(n - 1), 40);
    for (std::size_t t = 0; t <= 40; ++t) {
      double mass = 0.0;
      for (Vertex y = 0; y < n; ++y) {
        CHECK(sx.p(t, y) >= 0.0);
        mass += sx.p(t, y) * g.measure(y);
      }
      CHECK(std::abs(mass - 1.0) <= 1e-12);
      CHECK(sx.p(t, static_cast<Vertex>(n - 1)) == Approx(sy.p(t, 0)).epsilon(1e-12));
    }
    // Chapman-Kolmogorov, a = 7, b = 9
    auto sz = heat_kernel(g, static_cast<Vertex>(n - 1), 9);
    double ck = 0.0;
    for (Vertex z = 0; z < n; ++z) ck += sx.p(7, z) * sz.p(9, z) * g.measure(z);
    CHECK(ck == Approx(sx.p(16, static_cast<Vertex>(n - 1))).epsilon(1e-12));
  }
}

TEST_CASE("diagonal series equals the stored diagonal") {
  auto g = gen_gasket(3).graph;
  auto d = diagonal_series(g, 5, 30);
  auto s = heat_kernel(g, 5, 30).diagonal();
  for (std::size_t n = 0; n <= 30; ++n) CHECK(d[n] == Approx(s[n]).epsilon(1e-14));
}

TEST_CASE("time differences") {
  std::vector<double> c(20, 3.0);
  for (int k = 1; k <= 4; ++k) CHECK(time_diff(c, k, 2) == 0.0);
  auto e = heat_kernel(fx::single_edge(), 0, 12);
  CHECK(time_diff(e, 0, 1, 2) == 0.0);
  auto z = heat_kernel(gen_lattice(1, 41).graph, 20, 8);
  CHECK(-time_diff(z, 20, 1, 4) == Approx(1.0 / 32.0).epsilon(1e-14));
  std::vector<double> f{1, 2, 4, 8, 16, 32, 64};
  CHECK(time_diff(f, 2, 0, 1) == 1.0);   // 4 - 2*2 + 1
  CHECK(time_diff(f, 1, 0, 2) == 3.0);
  CHECK_THROWS(time_diff(f, 3, 2, 2));
}

TEST_CASE("pdiff examples") {
  auto z = diagonal_series(gen_lattice(1, 4097).graph, 2048, 1100);
  auto r0 = pdiff_check(z, 0, 1, 256);
  CHECK(r0.violations == 0);
  auto r1 = pdiff_check(z, 1, 1, 1);
  CHECK(r1.violations == 0);
  CHECK(r1.orders[1].best_constant == Approx((1.0 / 32.0) / (0.5 * 0.25)).epsilon(1e-12));
  auto r = pdiff_check(z, 4, 4, 256);
  CHECK(r.min_positivity >= -1e-12);
  CHECK(r.orders[1].violations == 0);
  CHECK(r.orders[2].violations == 0);
  // on Z the per-order ratio tends to Gamma(k + 1/2) / sqrt(2 pi)
  for (int k = 3; k <= 4; ++k) {
    double limit = std::tgamma(k + 0.5) / std::sqrt(2.0 * M_PI);
    CHECK(r.orders[static_cast<std::size_t>(k)].best_constant == Approx(limit).epsilon(0.03));
  }
}

TEST_CASE("pdiff positivity on the gasket") {
  auto g = gen_gasket(4).graph;
  auto d = diagonal_series(g, 10, 1100);
  auto r = pdiff_check(d, 4, 4, 64);
  CHECK(r.min_positivity >= -1e-12);
  CHECK(r.orders[0].violations == 0);
  CHECK(r.orders[1].violations == 0);
}

TEST_CASE("ledif identity") {
  auto e = fx::single_edge();
  auto s = heat_kernel(e, 0, 30);
  for (std::size_t n : {2u, 4u, 10u}) {
    auto l = ledif_check(e, s, 1, n);
    CHECK(l.lhs == Approx(1.0));
    CHECK(l.corrected_rhs == Approx(1.0));
    CHECK(l.step2_rhs == 0.0);
    CHECK(l.step2_discrepancy == Approx(1.0));
  }
  auto z = gen_lattice(1, 201).graph;
  auto sz = heat_kernel(z, 100, 60);
  for (std::size_t n : {3u, 8u, 20u}) {
    auto l = ledif_check(z, sz, 1, n);
    CHECK(l.lhs == Approx(sz.p(2 * n, 100) - sz.p(2 * n + 1, 100)).epsilon(1e-12));
  }
  for (const auto& g : {gen_gasket(3).graph, gen_lattice(3, 5).graph, fx::random_graph(30, 30, 15)}) {
    auto sg = heat_kernel(g, 3, 80);
    for (int m = 1; m <= 3; ++m)
      for (std::size_t n : {1u, 4u, 16u, 35u}) CHECK(ledif_check(g, sg, m, n).relative_error <= 1e-10);
  }
}

TEST_CASE("mean exit times") {
  auto z = gen_lattice(1, 101).graph;
  CHECK(mean_exit(z, Region::single(50), 50) == 1.0);
  for (Vertex r : {5u, 10u, 20u}) CHECK(mean_exit(z, interval(50, r), 50) == Approx(double(r * r)).epsilon(1e-12));
  auto g = gen_gasket(3).graph;
  auto a = fx::hop_ball(g, 20, 3);
  auto h = mean_exit_times(g, a);
  CHECK(h[*a.index_of(20)] == Approx(mean_exit(g, a, 20)).epsilon(1e-12));
}

TEST_CASE("exit law") {
  auto g = gen_gasket(3).graph;
  auto a = fx::hop_ball(g, 20, 3);
  auto law = exit_distribution(g, a, 20);
  CHECK_FALSE(law.truncated);
  auto want = oracle::exit_pmf(g, a, 20, 60);
  for (std::size_t n = 0; n <= 60; ++n) CHECK(law.pmf[n] == Approx(want[n]).epsilon(1e-12));
  double prev = 1.0;
  for (std::size_t n = 0; n < law.survival.size(); ++n) {
    CHECK(law.survival[n] <= prev + 1e-15);
    CHECK(law.survival[n] >= 0.0);
    CHECK(std::abs(law.survival[n] - law.survival_from_pmf(n)) <= 1e-12);
    prev = law.survival[n];
  }
  CHECK(law.mean() == Approx(mean_exit(g, a, 20)).epsilon(1e-12));
  for (int m = 1; m <= 3; ++m) CHECK(law.moment_hockey(m) == Approx(law.moment_binomial(m)).epsilon(1e-12));
}

TEST_CASE("exit moments") {
  auto g = gen_gasket(3).graph;
  for (int m = 1; m <= 3; ++m) {
    auto one = exit_moment_exact(g, Region::single(7), m, 7);
    CHECK(one.green_sum == Approx(1.0).epsilon(1e-14));
    CHECK(one.hockey == Approx(1.0).epsilon(1e-14));
    CHECK(one.shifted == Approx(double(m + 1)).epsilon(1e-14));
  }
  auto a = fx::hop_ball(g, 20, 4);
  CHECK(exit_moment_exact(g, a, 1, 20).green_sum == Approx(mean_exit(g, a, 20)).epsilon(1e-12));
  for (int m = 1; m <= 3; ++m) {
    auto e = exit_moment_exact(g, a, m, 20);
    CHECK(e.green_sum == Approx(e.hockey).epsilon(1e-10));
    // C(T+m, m) = sum_{j<=m} C(T+j-1, j)
    double stacked = 1.0;
    for (int j = 1; j <= m; ++j) stacked += exit_moment_exact(g, a, j, 20).green_sum;
    CHECK(e.shifted == Approx(stacked).epsilon(1e-10));
    auto all = exit_moment_all(g, a, m);
    CHECK(all[*a.index_of(20)] == Approx(e.green_sum).epsilon(1e-10));
  }
}

TEST_CASE("moment envelope") {
  auto z = gen_lattice(1, 201).graph;
  auto g = gen_gasket(4).graph;
  std::vector<std::pair<const WeightedGraph*, std::pair<Region, Vertex>>> cases;
  for (Vertex r : {1u, 3u, 10u, 40u}) cases.push_back({&z, {interval(100, r), 100}});
  for (std::size_t h : {1u, 2u, 5u}) cases.push_back({&g, {fx::hop_ball(g, 40, h), 40}});
  for (const auto& [gr, inst] : cases) {
    auto law = exit_distribution(*gr, inst.first, inst.second);
    double fact = 1.0;
    for (int m = 1; m <= 3; ++m) {
      fact *= m;
      double ratio = law.moment_binomial(m, 0) / law.raw_moment(m);
      CHECK(ratio >= 1.0 / (fact * std::pow(2.0, m)));
      CHECK(ratio <= std::pow(2.0, m));
    }
  }
}

TEST_CASE("simulated exits") {
  auto z = gen_lattice(1, 101).graph;
  auto one = simulate_exit(z, Region::single(50), 50, 100, 3);
  for (auto t : one.samples) CHECK(t == 1);
  auto a = interval(50, 10);
  auto s = simulate_exit(z, a, 50, 100000, 42);
  CHECK(std::abs(s.mean - 100.0) <= 3.0 * s.std_error);
  auto again = simulate_exit(z, a, 50, 100000, 42);
  CHECK(again.samples == s.samples);
  auto other = simulate_exit(z, a, 50, 1000, 43);
  CHECK_FALSE(std::equal(other.samples.begin(), other.samples.end(), s.samples.begin()));
  auto sq = sample_moment(s.samples, [](std::uint64_t t) { return double(t) * double(t); });
  CHECK(sq.mean > 100.0 * 100.0);
}

TEST_CASE("binomials and kdef") {
  CHECK(binomial_real(5.0, 2) == Approx(10.0));
  CHECK(binomial_real(2.5, 0) == 1.0);
  auto toy = kdef_scan([](double s) { return std::pow(s, 4.0); }, 16.0, 1, 4.0, 1.0, 64);
  CHECK(toy.k == 2);
  CHECK_FALSE(toy.vacuous);
  auto vac = kdef_scan([](double) { return 1.0; }, 16.0, 1, 4.0, 0.25, 32);
  CHECK(vac.k == 1);
  CHECK(vac.vacuous);
}

TEST_CASE("tail quantities") {
  auto g = gen_lattice(1, 513).graph;
  std::vector<double> v(513 * 513);
  for (std::size_t i = 0; i < 513; ++i)
    for (std::size_t j = 0; j < 513; ++j) v[i * 513 + j] = std::sqrt(std::abs(double(i) - double(j)));
  TableDistances rho(MetricTable(513, 0.5, v));
  TailBoundConfig cfg;
  auto t = tail_and_kdef(g, rho, 1, 256, 8.0, 16, cfg);
  CHECK(t.exit_before >= 0.0);
  CHECK(t.exit_before <= 1.0);
  CHECK(t.exit_moment == Approx(64.0 * 64.0).epsilon(1e-10));  // ball is |i - 256| < 64
  CHECK(t.H == Approx(64.0 * volume(g, ball(g, rho.metric().row(256), 256, 8.0))));
  CHECK(t.lemma_C0 >= 1.0);
}

}
