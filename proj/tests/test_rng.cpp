#include <doctest.h>

#include <cmath>
#include <vector>

#include "perc/lattice_view.hpp"

using namespace perc;

TEST_SUITE_BEGIN("rng");

TEST_CASE("states are memoized: re-querying an element repeats the answer") {
  LatticeView view(bond_model(3), {0.5}, RandomField(42, 0));
  Vertex v = Vertex::origin(3);
  for (int axis = 0; axis < 3; ++axis) {
    bool first = view.bond_open(v, axis, true);
    for (int i = 0; i < 5; ++i) CHECK(view.bond_open(v, axis, true) == first);
  }
  // both endpoints see the same edge
  CHECK(view.bond_open(v, 0, true) == view.bond_open(v.shifted(0, 1), 0, false));
}

TEST_CASE("sampling is order-independent") {
  std::vector<Vertex> sites;
  Vertex v = Vertex::origin(2);
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y) {
      v[0] = x;
      v[1] = y;
      sites.push_back(v);
    }
  LatticeView a(site_model(2), {0.37}, RandomField(9, 4));
  LatticeView b(site_model(2), {0.37}, RandomField(9, 4));
  std::vector<bool> forward, backward;
  for (const auto& s : sites) forward.push_back(a.site_open(s));
  for (auto it = sites.rbegin(); it != sites.rend(); ++it) backward.push_back(b.site_open(*it));
  for (size_t i = 0; i < sites.size(); ++i)
    CHECK(forward[i] == backward[sites.size() - 1 - i]);
}

TEST_CASE("replicas are distinct, same replica reproduces") {
  RandomField r0(123, 0), r0b(123, 0), r1(123, 1);
  LatticeElement e = site_element(Vertex::origin(3));
  CHECK(r0.uniform(e.hash()) == r0b.uniform(e.hash()));
  CHECK(r0.uniform(e.hash()) != r1.uniform(e.hash()));
}

TEST_CASE("empirical frequency tracks the parameter") {
  const int n = 200000;
  const double p = 0.31;
  int open = 0;
  Vertex v = Vertex::origin(2);
  for (int i = 0; i < n; ++i) {
    LatticeView view(site_model(2), {p}, RandomField(777, static_cast<uint64_t>(i)));
    if (view.site_open(v)) ++open;
  }
  double phat = static_cast<double>(open) / n;
  double sigma = std::sqrt(p * (1 - p) / n);
  CHECK(std::fabs(phat - p) < 4 * sigma);
}

TEST_CASE("uniforms land in [0,1)") {
  RandomField field(5, 0);
  for (uint64_t h = 0; h < 10000; ++h) {
    double u = field.uniform(h);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_SUITE_END();
