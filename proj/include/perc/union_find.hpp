#pragma once

#include <cstdint>
#include <vector>

#include "perc/model.hpp"

namespace perc {
namespace mc {

// Union-find with path halving and union by size.
class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(static_cast<size_t>(n)), size_(static_cast<size_t>(n), 1) {
    for (int i = 0; i < n; ++i) parent_[static_cast<size_t>(i)] = i;
  }

  int find(int x) {
    while (parent_[static_cast<size_t>(x)] != x) {
      parent_[static_cast<size_t>(x)] = parent_[static_cast<size_t>(parent_[static_cast<size_t>(x)])];
      x = parent_[static_cast<size_t>(x)];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[static_cast<size_t>(a)] < size_[static_cast<size_t>(b)]) std::swap(a, b);
    parent_[static_cast<size_t>(b)] = a;
    size_[static_cast<size_t>(a)] += size_[static_cast<size_t>(b)];
    return true;
  }

  bool same(int a, int b) { return find(a) == find(b); }

 private:
  std::vector<int> parent_;
  std::vector<int64_t> size_;
};

struct SweepPoint {
  double p = 0.0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct SweepCurve {
  int box_radius = 0;
  int64_t replicas = 0;
  std::vector<SweepPoint> points;
};

// Left-right crossing probability of the box [-L,L]^d for every p in the
// sorted grid, one random assignment per replica: each element owns one
// uniform, the open set at level p is {u < p}, and an incremental union-find
// over the sorted uniforms answers all grid points in a single pass. The
// per-replica crossing indicator is therefore non-decreasing in p. Only
// non-oriented models are supported.
SweepCurve union_find_sweep(const ModelSpec& model, int box_radius,
                            const std::vector<double>& p_grid, int64_t replicas,
                            uint64_t master_seed);

}  // namespace mc
}  // namespace perc
