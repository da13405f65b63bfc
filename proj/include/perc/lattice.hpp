#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "perc/model.hpp"
#include "perc/rng.hpp"
#include "perc/vertex.hpp"

namespace perc {

// ---------------------------------------------------------------------------
// Directions
// ---------------------------------------------------------------------------

// The three edge directions of the triangular lattice T = Z^2 plus diagonals.
inline constexpr int kTriDirCount = 3;
inline constexpr int32_t kTriDirs[kTriDirCount][2] = {{1, 0}, {0, 1}, {1, 1}};

inline Vertex tri_step(const Vertex& v, int dir_index, bool positive) {
  Vertex w = v;
  int s = positive ? 1 : -1;
  w[0] += s * kTriDirs[dir_index][0];
  w[1] += s * kTriDirs[dir_index][1];
  return w;
}

// Neighbors of v in Z^d under the given model. Non-oriented: the 2d vertices
// v +- e_i; oriented: the d forward vertices v + e_i. Order is canonical:
// direction index ascending, + before -.
inline std::vector<Vertex> neighbors(const ModelSpec& model, const Vertex& v) {
  require_dimension(model, v.dim, "neighbors");
  std::vector<Vertex> out;
  if (model.oriented()) {
    out.reserve(static_cast<size_t>(model.d));
    for (int i = 0; i < model.d; ++i) out.push_back(v.shifted(i, 1));
  } else {
    out.reserve(static_cast<size_t>(2 * model.d));
    for (int i = 0; i < model.d; ++i) {
      out.push_back(v.shifted(i, 1));
      out.push_back(v.shifted(i, -1));
    }
  }
  return out;
}

// The 6 neighbors of v in the triangular lattice: v +- (1,0), (0,1), (1,1).
inline std::vector<Vertex> triangular_neighbors(const Vertex& v) {
  if (v.dim != 2) throw std::invalid_argument("triangular_neighbors: vertex must be 2-dimensional");
  std::vector<Vertex> out;
  out.reserve(6);
  for (int t = 0; t < kTriDirCount; ++t) {
    out.push_back(tri_step(v, t, true));
    out.push_back(tri_step(v, t, false));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lattice elements (the objects that carry randomness)
// ---------------------------------------------------------------------------

enum class ElemKind : uint8_t {
  site,          // site of Z^d (or of the fold target's ambient lattice)
  zd_bond,       // edge <base, base + e_dir> of Z^d
  tri_bond,      // edge <base, base + tridir(dir)> of T
  split_edge,    // labelled copy <base, base + e_{d+1}>_label in Z^{d+1}_E
  split_vertex,  // copy base^(label) in Z^{d+1}_V, label in 1..2d-1
};

// Canonical identifier of one random element. `base` is the canonical base
// vertex (for bonds, the endpoint from which the direction points positively),
// `dir` the direction/class index, `label` the split copy where applicable.
struct LatticeElement {
  ElemKind kind = ElemKind::site;
  Vertex base;
  int16_t dir = -1;
  int16_t label = 0;

  bool operator==(const LatticeElement&) const = default;

  uint64_t hash() const {
    uint64_t h = 0x243F6A8885A308D3ull ^ static_cast<uint64_t>(kind);
    for (int i = 0; i < base.dim; ++i)
      h = mix64(h ^ static_cast<uint64_t>(static_cast<int64_t>(base[i])));
    h = mix64(h ^ (static_cast<uint64_t>(static_cast<uint16_t>(dir)) |
                   (static_cast<uint64_t>(static_cast<uint16_t>(label)) << 16) |
                   (static_cast<uint64_t>(base.dim) << 32)));
    return h;
  }
};

struct ElementHash {
  size_t operator()(const LatticeElement& e) const { return static_cast<size_t>(e.hash()); }
};

struct VertexHash {
  size_t operator()(const Vertex& v) const {
    uint64_t h = 0x452821E638D01377ull;
    for (int i = 0; i < v.dim; ++i) h = mix64(h ^ static_cast<uint64_t>(static_cast<int64_t>(v[i])));
    return static_cast<size_t>(mix64(h ^ static_cast<uint64_t>(v.dim)));
  }
};

inline LatticeElement site_element(const Vertex& v) { return {ElemKind::site, v, -1, 0}; }

// Canonical form of the Z^d edge out of `a` along +-e_axis.
inline LatticeElement zd_edge(const Vertex& a, int axis, bool positive) {
  LatticeElement e;
  e.kind = ElemKind::zd_bond;
  e.base = positive ? a : a.shifted(axis, -1);
  e.dir = static_cast<int16_t>(axis);
  return e;
}

// Canonical form of the T edge out of `a` along +-tridir(dir_index).
inline LatticeElement tri_edge(const Vertex& a, int dir_index, bool positive) {
  LatticeElement e;
  e.kind = ElemKind::tri_bond;
  e.base = positive ? a : tri_step(a, dir_index, false);
  e.dir = static_cast<int16_t>(dir_index);
  return e;
}

// The `label`-th parallel copy of <base, base + e_{d+1}> in Z^{d+1}_E.
// Labels run over the source unit vectors, 0..d-1.
inline LatticeElement split_edge(const Vertex& base, int label) {
  LatticeElement e;
  e.kind = ElemKind::split_edge;
  e.base = base;
  e.dir = static_cast<int16_t>(base.dim - 1);
  e.label = static_cast<int16_t>(label);
  return e;
}

// Split copy base^(index) in Z^{d+1}_V; index in 1..2d-1 (d = source dim).
inline LatticeElement split_vertex(const Vertex& base, int index) {
  LatticeElement e;
  e.kind = ElemKind::split_vertex;
  e.base = base;
  e.label = static_cast<int16_t>(index);
  return e;
}

// Identifies one of the parallel copies of an edge <v, v+u_{d+1}> in Z^{d+1}_E.
struct SplitEdgeId {
  Vertex base_vertex;
  int label = 0;  // index into the source unit vectors e_1..e_d
};

// Identifies one of the 2d-1 copies of a vertex of Z^{d+1}_V.
struct SplitVertexId {
  Vertex base_vertex;
  int index = 1;  // 1..2d-1
};

// Validated conversions to canonical element ids (d = source dimension).
inline LatticeElement element_of(const SplitEdgeId& id) {
  int d = id.base_vertex.dim - 1;
  if (id.label < 0 || id.label >= d) throw std::invalid_argument("split edge label out of range");
  return split_edge(id.base_vertex, id.label);
}

inline LatticeElement element_of(const SplitVertexId& id) {
  int d = id.base_vertex.dim - 1;
  if (id.index < 1 || id.index > 2 * d - 1)
    throw std::invalid_argument("split vertex index out of range");
  return split_vertex(id.base_vertex, id.index);
}

// ---------------------------------------------------------------------------
// Canonical total order
// ---------------------------------------------------------------------------

// Deterministic total order on edges/vertices of any of the lattices here:
// lexicographic on (L1 distance of base from origin, base coordinates,
// direction index, split label). The couplings use it to pick the smallest
// susceptible item, so it must agree across runs.
struct OrderKey {
  int64_t l1 = 0;
  Vertex base;
  int16_t dir = -1;
  int16_t label = 0;

  friend bool operator<(const OrderKey& a, const OrderKey& b) {
    if (a.l1 != b.l1) return a.l1 < b.l1;
    if (!(a.base == b.base)) return a.base.lex_less(b.base);
    if (a.dir != b.dir) return a.dir < b.dir;
    return a.label < b.label;
  }
  friend bool operator==(const OrderKey& a, const OrderKey& b) {
    return a.l1 == b.l1 && a.base == b.base && a.dir == b.dir && a.label == b.label;
  }
};

inline OrderKey canonical_order_key(const LatticeElement& e) {
  return OrderKey{e.base.l1(), e.base, e.dir, e.label};
}

inline OrderKey canonical_order_key(const Vertex& v) { return OrderKey{v.l1(), v, -1, 0}; }

// ---------------------------------------------------------------------------
// Direction maps between source and target lattices
// ---------------------------------------------------------------------------

struct SignedDir {
  int axis = 0;
  bool positive = true;
};

// Bookkeeping for the three couplings' direction assignments:
//  - tau: the 3 signed T directions -> the 3 signed axes of Z^3;
//  - sigma: e_i of Z^d -> u_i of Z^{d+1} (odd: -e_i -> -u_i);
//  - partition: {e_1..e_d} split into k classes D_{u_1}..D_{u_k} of equal
//    size d/k, with D_{-u} = -D_u. Class j owns axes j*(d/k)..(j+1)*(d/k)-1.
struct DirectionMap {
  enum class MapKind { tau, sigma, partition };
  MapKind kind;
  int source_dim = 0;
  int target_dim = 0;

  static DirectionMap tau_triangular_to_z3() { return {MapKind::tau, 2, 3}; }

  static DirectionMap sigma_embedding(int d) {
    if (d < 1) throw std::invalid_argument("sigma_embedding: d must be positive");
    return {MapKind::sigma, d, d + 1};
  }

  static DirectionMap uniform_partition(int d, int k) {
    if (k < 1 || d < 1 || d % k != 0)
      throw std::invalid_argument("uniform_partition: k must divide d");
    return {MapKind::partition, d, k};
  }

  // tau: T direction (dir_index, sign) -> signed axis of Z^3.
  SignedDir apply_tau(int tri_dir_index, bool positive) const {
    if (kind != MapKind::tau) throw std::logic_error("apply_tau on non-tau map");
    return {tri_dir_index, positive};
  }

  // sigma: signed e_axis of Z^d -> signed u_axis of Z^{d+1} (same index).
  SignedDir apply_sigma(int axis, bool positive) const {
    if (kind != MapKind::sigma) throw std::logic_error("apply_sigma on non-sigma map");
    if (axis < 0 || axis >= source_dim) throw std::invalid_argument("sigma: axis out of range");
    return {axis, positive};
  }

  int class_size() const { return source_dim / target_dim; }

  // partition: which class D_{u_j} the source axis belongs to.
  int class_of(int axis) const {
    if (kind != MapKind::partition) throw std::logic_error("class_of on non-partition map");
    return axis / class_size();
  }

  // partition: the source axes of class j, in canonical (ascending) order.
  std::vector<int> class_members(int j) const {
    if (kind != MapKind::partition) throw std::logic_error("class_members on non-partition map");
    if (j < 0 || j >= target_dim) throw std::invalid_argument("partition class out of range");
    std::vector<int> out;
    for (int a = j * class_size(); a < (j + 1) * class_size(); ++a) out.push_back(a);
    return out;
  }
};

}  // namespace perc
