#include "perc/union_find.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "perc/lattice.hpp"
#include "perc/rng.hpp"
#include "perc/stats.hpp"
#include "perc/vertex.hpp"

namespace perc {
namespace mc {

namespace {

struct SweepGeometry {
  int d = 0;
  int L = 0;
  int side = 0;
  int64_t nvertices = 0;

  int64_t vertex_index(const Vertex& v) const {
    int64_t idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * side + (v[i] + L);
    return idx;
  }

  Vertex vertex_at(int64_t idx) const {
    Vertex v = Vertex::origin(d);
    for (int i = d - 1; i >= 0; --i) {
      v[i] = static_cast<int32_t>(idx % side) - L;
      idx /= side;
    }
    return v;
  }
};

struct SweepElement {
  uint64_t hash;   // randomness key
  int64_t a, b;    // endpoints (bond) or site index in a (b unused)
};

}  // namespace

SweepCurve union_find_sweep(const ModelSpec& model, int box_radius,
                            const std::vector<double>& p_grid, int64_t replicas,
                            uint64_t master_seed) {
  if (model.oriented()) throw std::invalid_argument("union_find_sweep: oriented models unsupported");
  if (box_radius < 1) throw std::invalid_argument("union_find_sweep: box_radius must be >= 1");
  if (replicas < 1) throw std::invalid_argument("union_find_sweep: replicas must be >= 1");
  if (p_grid.empty() || !std::is_sorted(p_grid.begin(), p_grid.end()))
    throw std::invalid_argument("union_find_sweep: p_grid must be sorted ascending");
  for (double p : p_grid)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("union_find_sweep: p outside [0,1]");

  SweepGeometry geo;
  geo.d = model.d;
  geo.L = box_radius;
  geo.side = 2 * box_radius + 1;
  geo.nvertices = 1;
  for (int i = 0; i < model.d; ++i) geo.nvertices *= geo.side;
  if (geo.nvertices > (int64_t{1} << 26))
    throw std::invalid_argument("union_find_sweep: box too large");

  // Static element list (randomness hashes are per-replica via the field).
  std::vector<SweepElement> elements;
  for (int64_t idx = 0; idx < geo.nvertices; ++idx) {
    Vertex v = geo.vertex_at(idx);
    if (model.kind == Kind::site) {
      elements.push_back({site_element(v).hash(), idx, -1});
    }
    for (int axis = 0; axis < model.d; ++axis) {
      Vertex w = v.shifted(axis, 1);
      if (w[axis] > box_radius) continue;
      if (model.kind == Kind::bond)
        elements.push_back({zd_edge(v, axis, true).hash(), idx, geo.vertex_index(w)});
    }
  }

  const int left = static_cast<int>(geo.nvertices);
  const int right = left + 1;
  std::vector<int64_t> crossing_counts(p_grid.size(), 0);

  std::vector<std::pair<double, size_t>> order(elements.size());
  std::vector<char> active;  // site models: which sites are open so far
  for (int64_t r = 0; r < replicas; ++r) {
    RandomField field(master_seed, static_cast<uint64_t>(r));
    for (size_t i = 0; i < elements.size(); ++i)
      order[i] = {field.uniform(elements[i].hash), i};
    std::sort(order.begin(), order.end());

    DisjointSet dsu(static_cast<int>(geo.nvertices) + 2);
    if (model.kind == Kind::bond) {
      // all vertices present; faces wired to the virtual poles up front
      for (int64_t idx = 0; idx < geo.nvertices; ++idx) {
        Vertex v = geo.vertex_at(idx);
        if (v[0] == -box_radius) dsu.unite(left, static_cast<int>(idx));
        if (v[0] == box_radius) dsu.unite(right, static_cast<int>(idx));
      }
    } else {
      active.assign(static_cast<size_t>(geo.nvertices), 0);
    }

    size_t next = 0;
    for (size_t gi = 0; gi < p_grid.size(); ++gi) {
      double p = p_grid[gi];
      while (next < order.size() && order[next].first < p) {
        const SweepElement& el = elements[order[next].second];
        ++next;
        if (model.kind == Kind::bond) {
          dsu.unite(static_cast<int>(el.a), static_cast<int>(el.b));
        } else {
          active[static_cast<size_t>(el.a)] = 1;
          Vertex v = geo.vertex_at(el.a);
          if (v[0] == -box_radius) dsu.unite(left, static_cast<int>(el.a));
          if (v[0] == box_radius) dsu.unite(right, static_cast<int>(el.a));
          for (int axis = 0; axis < model.d; ++axis) {
            for (int sgn = -1; sgn <= 1; sgn += 2) {
              Vertex w = v.shifted(axis, sgn);
              if (std::abs(w[axis]) > box_radius) continue;
              int64_t wi = geo.vertex_index(w);
              if (active[static_cast<size_t>(wi)])
                dsu.unite(static_cast<int>(el.a), static_cast<int>(wi));
            }
          }
        }
      }
      if (dsu.same(left, right)) ++crossing_counts[gi];
    }
  }

  SweepCurve curve;
  curve.box_radius = box_radius;
  curve.replicas = replicas;
  curve.points.reserve(p_grid.size());
  for (size_t gi = 0; gi < p_grid.size(); ++gi) {
    SweepPoint pt;
    pt.p = p_grid[gi];
    pt.estimate = static_cast<double>(crossing_counts[gi]) / static_cast<double>(replicas);
    Interval iv = wilson_interval(crossing_counts[gi], replicas);
    pt.ci_low = iv.low;
    pt.ci_high = iv.high;
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace mc
}  // namespace perc
