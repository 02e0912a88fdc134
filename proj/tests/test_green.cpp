#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "rlab/generators.hpp"
#include "rlab/green.hpp"
#include "rlab/walk.hpp"

using namespace rlab;
using doctest::Approx;

TEST_SUITE("green") {

TEST_CASE("qm values") {
  for (std::uint64_t n : {0u, 1u, 7u, 1000u}) CHECK(qm(1, n) == 1);
  CHECK(qm(2, 3) == 4);
  CHECK(qm(3, 2) == 6);
  CHECK(qm(0, 0) == 1);
  CHECK(qm(0, 5) == 0);
  CHECK(qm(4, 10) == 286);  // C(13, 3)
  CHECK_THROWS_AS(qm(40, std::uint64_t{1} << 40), std::overflow_error);
}

TEST_CASE("single-vertex region") {
  auto g = gen_gasket(2).graph;
  for (Vertex v : {0u, 5u, 9u})
    for (int m = 1; m <= 4; ++m)
      CHECK(green_row(g, Region::single(v), m, v).diagonal() == Approx(1.0 / g.measure(v)).epsilon(1e-14));
  CHECK(green_row(fx::path(3), Region::single(1), 1, 1).diagonal() == Approx(0.5));
}

TEST_CASE("order zero is the identity kernel") {
  auto g = gen_gasket(2).graph;
  auto a = fx::hop_ball(g, 4, 2);
  auto row = green_row(g, a, 0, 4);
  for (Vertex y : a.members()) CHECK(row.at(y) == (y == 4 ? 1.0 / g.measure(4) : 0.0));
}

TEST_CASE("rows match the dense killed inverse") {
  auto g = fx::random_graph(40, 30, 9);
  auto a = fx::hop_ball(g, 3, 3);
  REQUIRE(a.size() < g.vertex_count());
  for (int m = 1; m <= 3; ++m) {
    auto got = green_row(g, a, m, 3);
    auto want = oracle::green_row(g, a, m, 3);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(got.row[i] == Approx(want[i]).epsilon(1e-10));
  }
}

TEST_CASE("rows are symmetric, nonnegative, and peak at the source for m = 1") {
  auto g = gen_gasket(3).graph;
  auto a = fx::hop_ball(g, 20, 4);
  for (int m = 1; m <= 3; ++m) {
    for (Vertex x : {a[0], a[a.size() / 2]}) {
      auto rx = green_row(g, a, m, x);
      CHECK(rx.min_entry >= -1e-12);
      for (Vertex y : {a[1], a[a.size() - 1]}) {
        auto ry = green_row(g, a, m, y);
        CHECK(rx.at(y) == Approx(ry.at(x)).epsilon(1e-10));
      }
      if (m == 1)
        for (double v : rx.row) CHECK(v <= rx.diagonal() * (1 + 1e-12));
    }
  }
}

TEST_CASE("series oracle examples") {
  auto g = gen_gasket(2).graph;
  for (int m = 1; m <= 3; ++m) {
    auto s = green_series_oracle(g, Region::single(3), m, 3, 50);
    CHECK(s.partial[0] == 1.0);
    CHECK(s.converged);
    auto a = fx::hop_ball(g, 3, 2);
    auto z = green_series_oracle(g, a, m, 3, 50, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(z.partial[i] == (a[i] == 3 ? 1.0 : 0.0));
  }
}

TEST_CASE("order-one row sums are mean exit times") {
  auto g = gen_gasket(3).graph;
  auto a = fx::hop_ball(g, 12, 3);
  auto s = green_series_oracle(g, a, 1, 12, 20000, 1.0, 1e-12);
  REQUIRE(s.converged);
  double sum = 0.0;
  for (double v : s.partial) sum += v;
  CHECK(sum == Approx(mean_exit(g, a, 12)).epsilon(1e-10));
  CHECK(green_row(g, a, 1, 12).mass(g) == Approx(mean_exit(g, a, 12)).epsilon(1e-10));
}

TEST_CASE("series agrees with nested solves") {
  auto g = gen_lattice(2, 9).graph;
  auto a = fx::hop_ball(g, 40, 3);
  REQUIRE(killed_spectral_radius(g, a) <= 0.99);
  for (int m = 1; m <= 3; ++m) {
    auto s = green_series_oracle(g, a, m, 40, 20000, 1.0, 1e-13);
    REQUIRE(s.converged);
    auto row = green_row(g, a, m, 40);
    double scale = 0.0, dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double G = row.row[i] * g.measure(a[i]);
      scale = std::max(scale, std::abs(G));
      dev = std::max(dev, std::abs(G - s.partial[i]));
    }
    CHECK(dev / scale <= 1e-8);
  }
}

TEST_CASE("spectral radius bound dominates the dense value") {
  auto g = fx::random_graph(30, 20, 12);
  auto a = fx::hop_ball(g, 0, 2);
  Eigen::MatrixXd q = oracle::restrict(oracle::transition(g), a);
  double exact = q.eigenvalues().cwiseAbs().maxCoeff();
  double bound = killed_spectral_radius(g, a);
  CHECK(bound >= exact * (1 - 1e-12));
  CHECK(bound < 1.0);
}

TEST_CASE("reproducing property") {
  auto g = gen_gasket(3).graph;
  auto a = fx::hop_ball(g, 20, 5);
  for (int m = 1; m <= 3; ++m) {
    auto row = green_row(g, a, m, 20);
    std::vector<double> u(g.vertex_count(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) u[a[i]] = row.row[i];
    auto self = reproducing_check(g, a, m, 20, u);
    CHECK(self.residual <= 1e-10 * row.diagonal());
    CHECK(self.self_residual <= 1e-10 * row.diagonal());
    for (std::uint64_t k = 0; k < 20; ++k) {
      auto r = fx::random_vector(g.vertex_count(), 71, k);
      for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (!a.contains(v)) r[v] = 0.0;
      CHECK(reproducing_check(g, a, m, 20, r).residual < 1e-8);
    }
  }
  std::vector<double> ind(g.vertex_count(), 0.0);
  ind[7] = 1.0;
  for (int m = 1; m <= 3; ++m) CHECK(reproducing_check(g, Region::single(7), m, 7, ind).residual < 1e-14);
  std::vector<double> outside(g.vertex_count(), 1.0);
  CHECK_THROWS(reproducing_check(g, a, 1, 20, outside));
}

TEST_CASE("resistance to the complement") {
  CHECK(rm_to_complement(fx::path(3), Region::single(1), 1, 1).value == Approx(0.5));
  CHECK(rm_to_complement(fx::single_edge(), Region::single(0), 1, 0).value == Approx(1.0));
  auto g = gen_lattice(2, 11).graph;
  for (int m = 1; m <= 3; ++m) {
    double prev = INFINITY;
    for (std::size_t h = 5; h >= 1; --h) {
      double v = rm_to_complement(g, fx::hop_ball(g, 60, h), m, 60).value;
      CHECK(v <= prev * (1 + 1e-12));
      prev = v;
    }
    auto c = rm_to_complement(g, fx::hop_ball(g, 60, 3), m, 60);
    CHECK(c.extremal[60] == Approx(1.0));
  }
}

TEST_CASE("set-to-set resistance") {
  CHECK(rm_set_to_set(fx::single_edge(), 1, Region::single(0), Region::single(1)) == Approx(1.0));
  CHECK(rm_set_to_set(fx::triangle(), 1, Region::single(0), Region::single(1)) == Approx(2.0 / 3.0));
  // vertex 4 hangs behind B and carries no current
  auto p = fx::path(5);
  CHECK(rm_set_to_set(p, 1, Region::single(0), Region({3, 4})) == Approx(3.0));
}

}
