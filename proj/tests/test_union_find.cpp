#include <doctest.h>

#include "perc/union_find.hpp"

using namespace perc;
using namespace perc::mc;

TEST_SUITE_BEGIN("union_find");

TEST_CASE("disjoint set basics") {
  DisjointSet dsu(6);
  CHECK_FALSE(dsu.same(0, 5));
  dsu.unite(0, 1);
  dsu.unite(1, 2);
  CHECK(dsu.same(0, 2));
  CHECK_FALSE(dsu.unite(0, 2));
  dsu.unite(3, 4);
  dsu.unite(2, 3);
  CHECK(dsu.same(0, 4));
  CHECK_FALSE(dsu.same(0, 5));
}

TEST_CASE("sweep endpoints: p=0 never crosses, p=1 always does") {
  for (ModelSpec model : {bond_model(2), site_model(2)}) {
    SweepCurve curve = union_find_sweep(model, 4, {0.0, 1.0}, 50, 3);
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.points[0].estimate == 0.0);
    CHECK(curve.points[1].estimate == 1.0);
  }
}

TEST_CASE("per-replica crossing indicators are monotone in p") {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  for (uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    SweepCurve curve = union_find_sweep(bond_model(2), 6, grid, 1, seed);
    for (size_t i = 0; i + 1 < curve.points.size(); ++i)
      CHECK(curve.points[i].estimate <= curve.points[i + 1].estimate);
  }
}

TEST_CASE("bond crossing curve passes one half within 0.03 of p = 0.5") {
  std::vector<double> grid{0.47, 0.50, 0.53};
  SweepCurve curve = union_find_sweep(bond_model(2), 32, grid, 800, 2025);
  CHECK(curve.points.front().estimate < 0.5);
  CHECK(curve.points.back().estimate > 0.5);
  // non-decreasing mean curve
  for (size_t i = 0; i + 1 < curve.points.size(); ++i)
    CHECK(curve.points[i].estimate <= curve.points[i + 1].estimate + 1e-12);
}

TEST_CASE("invalid sweeps are rejected") {
  CHECK_THROWS_AS(union_find_sweep(oriented_bond_model(2), 4, {0.5}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(union_find_sweep(bond_model(2), 4, {0.9, 0.1}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(union_find_sweep(bond_model(2), 4, {}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(union_find_sweep(bond_model(2), 0, {0.5}, 10, 1), std::invalid_argument);
}

TEST_SUITE_END();
