#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "rlab/generators.hpp"
#include "rlab/metric.hpp"
#include "rlab/scaling.hpp"

using namespace rlab;
using doctest::Approx;

namespace {

// sqrt(|i - j|) on a path of n vertices, which is what metrizing R_1 gives.
std::shared_ptr<TableDistances> sqrt_path_metric(std::size_t n) {
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v[i * n + j] = std::sqrt(std::abs(double(i) - double(j)));
  return std::make_shared<TableDistances>(MetricTable(n, 0.5, v));
}

}  // namespace

TEST_SUITE("scaling") {

TEST_CASE("metrized path distance is the square root") {
  auto g = fx::path(9);
  auto mz = metrize(rm_matrix(g, 1), 0.5);
  for (Vertex j = 0; j < 9; ++j) CHECK(mz.metric.at(0, j) == Approx(std::sqrt(double(j))).epsilon(1e-12));
}

TEST_CASE("ball examples") {
  auto g = gen_lattice(1, 41).graph;
  auto rho = sqrt_path_metric(41);
  auto row = rho->row(20);
  auto tiny = ball(g, *row, 20, 1.0);
  CHECK(tiny.size() == 1);
  CHECK(volume(g, tiny) == 2.0);
  auto b = ball(g, *row, 20, 2.0);
  CHECK(b.size() == 7);
  CHECK(volume(g, b) == 14.0);
  CHECK(ball(g, *row, 20, 100.0).size() == 41);
}

TEST_CASE("balls keep the component of the centre") {
  // far vertex 3 is close in the table but only reachable through 2
  auto g = fx::path(4);
  MetricTable t(4, 1.0, {0, 5, 5, 1, 5, 0, 1, 5, 5, 1, 0, 5, 1, 5, 5, 0});
  auto row = t.row(0);
  auto b = ball(g, row, 0, 2.0);
  CHECK(b.size() == 1);
}

TEST_CASE("volume profile is a monotone step function") {
  auto g = gen_gasket(4).graph;
  auto t = std::make_shared<const QuasiMetricTable>(rm_matrix(g, 1));
  ChainDistances rho(t, 0.5);
  for (Vertex x : {0u, 20u, 60u}) {
    auto row = rho.row(x);
    VolumeProfile p(g, *row, x);
    CHECK(p.breakpoints()[0] == 0.0);
    double prev_v = 0.0, prev_F = 0.0, prev_H = 0.0;
    for (double r = 0.05; r < p.max_distance() * 1.2; r *= 1.1) {
      double v = p.volume(r);
      CHECK(v >= prev_v);
      CHECK(v == Approx(volume(g, ball(g, *row, x, r))).epsilon(1e-12));
      CHECK(scale_F(p, 1, r) >= prev_F);
      CHECK(scale_H(p, r) >= prev_H);
      prev_v = v;
      prev_F = scale_F(p, 1, r);
      prev_H = scale_H(p, r);
    }
    for (double r : {0.3, 0.9, 1.7}) {
      double F = scale_F(p, 2, r);
      double back = scale_f(p, 2, F);
      CHECK(back <= r * (1 + 1e-9));
      CHECK(scale_F(p, 2, back * (1 + 1e-9)) >= F * (1 - 1e-9));
    }
  }
}

TEST_CASE("monomial scaling") {
  auto F = [](double r) { return std::pow(r, 4.0); };
  CHECK(invert_scaling(F, 16.0) == Approx(2.0).epsilon(1e-12));
  std::vector<double> x{1, 2, 4, 8}, y;
  for (double v : x) y.push_back(F(v));
  CHECK(loglog_slope(x, y) == Approx(4.0).epsilon(1e-12));
}

TEST_CASE("doubling on Z tends to 4") {
  auto g = gen_lattice(1, 2049).graph;
  // only the centre row is needed
  std::vector<double> row(g.vertex_count());
  for (Vertex j = 0; j < g.vertex_count(); ++j) row[j] = std::sqrt(std::abs(double(j) - 1024.0));
  VolumeProfile p(g, row, 1024);
  double ratio = p.volume(32.0) / p.volume(16.0);
  CHECK(ratio == Approx(4.0).epsilon(0.01));
  CHECK(safe_radius(g, row, 1024, 16.0, 2.0));
  CHECK_FALSE(safe_radius(g, row, 1024, 16.0, 3.0));
}

TEST_CASE("scaling profile on a small path") {
  auto g = gen_lattice(1, 129).graph;
  auto rho = sqrt_path_metric(129);
  std::vector<Vertex> c{64};
  std::vector<double> radii{1, 2, 4};
  auto prof = vd_scan(g, *rho, 1, c, radii);
  CHECK(prof.in_W0);
  CHECK(prof.doubling_constant <= 9.0);
  CHECK(prof.beta_m == Approx(4.0).epsilon(0.15));
  for (const auto& rec : prof.records)
    if (rec.safe) CHECK(rec.covering <= 9);
}

TEST_CASE("covering numbers") {
  auto g = gen_lattice(1, 129).graph;
  auto rho = sqrt_path_metric(129);
  CHECK(covering_number(g, *rho, 64, 0.5) == 1);
  for (double r : {1.5, 2.0, 3.0, 4.0}) CHECK(covering_number(g, *rho, 64, r) <= 9);
  std::size_t whole = covering_number(g, *rho, 64, 100.0);
  CHECK(whole >= 1);
}

}
