#include "perc/explore.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace perc {
namespace mc {

namespace {

// Visited marks over [-L,L]^d, reusable across replicas via epoch stamps.
class DenseVisited {
 public:
  DenseVisited(int d, int L) : d_(d), L_(L), side_(2 * L + 1) {
    size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<size_t>(side_);
    stamp_.assign(n, 0);
  }

  void next_epoch() { ++epoch_; }

  // Returns false if already visited.
  bool mark(const Vertex& v) {
    size_t idx = 0;
    for (int i = 0; i < d_; ++i) idx = idx * static_cast<size_t>(side_) + static_cast<size_t>(v[i] + L_);
    if (stamp_[idx] == epoch_) return false;
    stamp_[idx] = epoch_;
    return true;
  }

 private:
  int d_, L_, side_;
  uint32_t epoch_ = 1;
  std::vector<uint32_t> stamp_;
};

// One BFS wave; Marker provides mark(v) -> bool (true if fresh).
template <class Marker>
ClusterReport bfs_in_radius(const LatticeView& view, const std::vector<Vertex>& starts, int L,
                            int64_t step_cap, bool stop_at_boundary, Marker&& mark) {
  const ModelSpec& model = view.model();
  if (step_cap < 1) throw std::invalid_argument("explore_cluster: step_cap must be >= 1");
  ClusterReport rep;
  std::vector<Vertex> queue;
  queue.reserve(256);
  for (const Vertex& s : starts) {
    require_dimension(model, s.dim, "explore_cluster start");
    if (s.linf() > L) throw std::invalid_argument("explore_cluster: start outside box");
    if (!mark(s)) continue;
    queue.push_back(s);
    ++rep.size;
    if (s.linf() == L) rep.boundary_hit = true;
  }
  if (rep.boundary_hit && stop_at_boundary) {
    rep.truncated = true;
    return rep;
  }
  const bool tri = view.is_triangular();
  const int dirs = tri ? kTriDirCount : model.d;
  const bool oriented = model.oriented();
  size_t head = 0;
  while (head < queue.size()) {
    Vertex v = queue[head++];
    ++rep.steps;
    for (int t = 0; t < dirs; ++t) {
      for (int sgn = 0; sgn < (oriented ? 1 : 2); ++sgn) {
        bool positive = sgn == 0;
        Vertex w = tri ? tri_step(v, t, positive)
                       : v.shifted(t, positive ? 1 : -1);
        if (w.linf() > L) continue;
        bool passable;
        if (model.kind == Kind::bond) {
          passable = tri ? view.tri_bond_open(v, t, positive) : view.bond_open(v, t, positive);
        } else {
          passable = view.site_open(w);
        }
        if (!passable) continue;
        if (!mark(w)) continue;
        queue.push_back(w);
        ++rep.size;
        if (w.linf() == L) {
          rep.boundary_hit = true;
          if (stop_at_boundary) {
            rep.truncated = true;
            return rep;
          }
        }
        if (rep.size >= step_cap) {
          rep.truncated = true;
          return rep;
        }
      }
    }
  }
  if (rep.boundary_hit) rep.truncated = true;
  return rep;
}

}  // namespace

ClusterReport explore_cluster(const LatticeView& view, const std::vector<Vertex>& starts,
                              int box_radius, int64_t step_cap, bool stop_at_boundary) {
  std::unordered_set<Vertex, VertexHash> seen;
  return bfs_in_radius(view, starts, box_radius, step_cap, stop_at_boundary,
                       [&seen](const Vertex& v) { return seen.insert(v).second; });
}

SurvivalEstimate survival_proxy(const ModelSpec& model, double p, int box_radius,
                                int64_t replicas, uint64_t master_seed) {
  if (replicas < 1) throw std::invalid_argument("survival_proxy: replicas must be >= 1");
  if (box_radius < 1) throw std::invalid_argument("survival_proxy: box_radius must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("survival_proxy: p outside [0,1]");
  if (model.d < 2 || model.d > kMaxDim) throw std::invalid_argument("survival_proxy: bad dimension");

  // Dense visited marks are worth it only when the box table fits comfortably.
  double cells = std::pow(2.0 * box_radius + 1.0, model.d);
  const bool dense = cells <= 8e7;

  auto worker = [&](int64_t lo, int64_t hi) -> int64_t {
    int64_t hits = 0;
    std::unique_ptr<DenseVisited> marks;
    if (dense) marks = std::make_unique<DenseVisited>(model.d, box_radius);
    std::vector<Vertex> start{Vertex::origin(model.d)};
    for (int64_t r = lo; r < hi; ++r) {
      LatticeView view(model, {p}, RandomField(master_seed, static_cast<uint64_t>(r)));
      ClusterReport rep;
      if (dense) {
        marks->next_epoch();
        rep = bfs_in_radius(view, start, box_radius, static_cast<int64_t>(1000000), true,
                            [&](const Vertex& v) { return marks->mark(v); });
      } else {
        rep = explore_cluster(view, start, box_radius, 1000000, true);
      }
      if (rep.boundary_hit) ++hits;
    }
    return hits;
  };

  unsigned hw = std::thread::hardware_concurrency();
  int64_t nthreads = std::max<int64_t>(1, std::min<int64_t>(hw ? hw : 1, replicas));
  int64_t hits = 0;
  if (nthreads == 1) {
    hits = worker(0, replicas);
  } else {
    std::vector<std::future<int64_t>> futs;
    int64_t chunk = (replicas + nthreads - 1) / nthreads;
    for (int64_t lo = 0; lo < replicas; lo += chunk)
      futs.push_back(std::async(std::launch::async, worker, lo, std::min(lo + chunk, replicas)));
    for (auto& f : futs) hits += f.get();
  }

  SurvivalEstimate est;
  est.p = p;
  est.box_radius = box_radius;
  est.replicas = replicas;
  est.hits = hits;
  est.estimate = static_cast<double>(hits) / static_cast<double>(replicas);
  Interval iv = wilson_interval(hits, replicas);
  est.ci_low = iv.low;
  est.ci_high = iv.high;
  return est;
}

Box box_linf(int d, int L) {
  if (d < 1 || d > kMaxDim || L < 0) throw std::invalid_argument("box_linf: bad parameters");
  Box box;
  box.starts.push_back(Vertex::origin(d));
  Vertex v = Vertex::origin(d);
  for (int i = 0; i < d; ++i) v[i] = -L;
  while (true) {
    box.vertices.push_back(v);
    int i = 0;
    for (; i < d; ++i) {
      if (v[i] < L) {
        ++v[i];
        break;
      }
      v[i] = -L;
    }
    if (i == d) break;
  }
  return box;
}

Box box_forward_simplex(int d, int L) {
  if (d < 1 || d > kMaxDim || L < 0) throw std::invalid_argument("box_forward_simplex: bad parameters");
  Box box;
  box.starts.push_back(Vertex::origin(d));
  Vertex v = Vertex::origin(d);
  // enumerate x >= 0 with sum <= L in lexicographic order
  while (true) {
    int64_t sum = 0;
    for (int i = 0; i < d; ++i) sum += v[i];
    if (sum <= L) box.vertices.push_back(v);
    int i = 0;
    for (; i < d; ++i) {
      if (v[i] < L) {
        ++v[i];
        break;
      }
      v[i] = 0;
    }
    if (i == d) break;
  }
  return box;
}

namespace {

struct BoxIndex {
  std::unordered_map<Vertex, int, VertexHash> index;
  std::vector<char> is_start;

  explicit BoxIndex(const Box& box) {
    index.reserve(box.vertices.size() * 2);
    for (size_t i = 0; i < box.vertices.size(); ++i)
      index.emplace(box.vertices[i], static_cast<int>(i));
    is_start.assign(box.vertices.size(), 0);
    for (const Vertex& s : box.starts) {
      auto it = index.find(s);
      if (it == index.end()) throw std::invalid_argument("box: start outside box");
      is_start[static_cast<size_t>(it->second)] = 1;
    }
  }
};

// Random elements of the box plus adjacency annotated with the element
// controlling each hop (the site element of the head, or the edge element).
struct BoxElements {
  int64_t count = 0;
  // adjacency[v] = list of (neighbor index, element index); element index is
  // -1 when the hop is unconditional (never happens here).
  std::vector<std::vector<std::pair<int, int>>> adjacency;
  std::vector<int> site_element_of;  // per vertex, -1 for starts (site models)
};

BoxElements enumerate_elements(const ModelSpec& model, const Box& box, const BoxIndex& bi) {
  BoxElements be;
  size_t n = box.vertices.size();
  be.adjacency.assign(n, {});
  if (model.kind == Kind::site) {
    be.site_element_of.assign(n, -1);
    for (size_t i = 0; i < n; ++i) {
      if (!bi.is_start[i]) be.site_element_of[i] = static_cast<int>(be.count++);
    }
  }
  for (size_t i = 0; i < n; ++i) {
    const Vertex& v = box.vertices[i];
    for (int axis = 0; axis < model.d; ++axis) {
      for (int sgn = 0; sgn < (model.oriented() ? 1 : 2); ++sgn) {
        bool positive = sgn == 0;
        if (!model.oriented() && !positive) continue;  // visit each undirected edge once
        Vertex w = v.shifted(axis, positive ? 1 : -1);
        auto it = bi.index.find(w);
        if (it == bi.index.end()) continue;
        int j = it->second;
        if (model.kind == Kind::bond) {
          int elem = static_cast<int>(be.count++);
          be.adjacency[i].push_back({j, elem});
          if (!model.oriented()) be.adjacency[static_cast<size_t>(j)].push_back({static_cast<int>(i), elem});
        } else {
          be.adjacency[i].push_back({j, be.site_element_of[static_cast<size_t>(j)]});
          if (!model.oriented())
            be.adjacency[static_cast<size_t>(j)].push_back({static_cast<int>(i), be.site_element_of[i]});
        }
      }
    }
  }
  return be;
}

}  // namespace

int64_t box_element_count(const ModelSpec& model, const Box& box) {
  BoxIndex bi(box);
  return enumerate_elements(model, box, bi).count;
}

SizeDistribution exact_cluster_distribution(const ModelSpec& model, double p, const Box& box) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("exact_cluster_distribution: p outside [0,1]");
  BoxIndex bi(box);
  BoxElements be = enumerate_elements(model, box, bi);
  if (be.count > 25) throw std::invalid_argument("exact_cluster_distribution: box too large (more than 25 random elements)");
  int n = static_cast<int>(be.count);
  size_t nv = box.vertices.size();

  // p^k (1-p)^(n-k) per popcount
  std::vector<double> wopen(static_cast<size_t>(n) + 1), wclosed(static_cast<size_t>(n) + 1);
  wopen[0] = wclosed[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    wopen[static_cast<size_t>(k)] = wopen[static_cast<size_t>(k - 1)] * p;
    wclosed[static_cast<size_t>(k)] = wclosed[static_cast<size_t>(k - 1)] * (1.0 - p);
  }

  std::map<int64_t, double> mass;
  std::vector<int> stack;
  std::vector<char> seen(nv);
  const uint64_t total = 1ull << n;
  for (uint64_t mask = 0; mask < total; ++mask) {
    // BFS over the open configuration
    std::fill(seen.begin(), seen.end(), 0);
    stack.clear();
    int64_t size = 0;
    for (const Vertex& s : box.starts) {
      int i = bi.index.at(s);
      if (!seen[static_cast<size_t>(i)]) {
        seen[static_cast<size_t>(i)] = 1;
        stack.push_back(i);
        ++size;
      }
    }
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, elem] : be.adjacency[static_cast<size_t>(v)]) {
        bool ok = elem < 0 || (mask >> elem) & 1;
        if (!ok || seen[static_cast<size_t>(w)]) continue;
        seen[static_cast<size_t>(w)] = 1;
        stack.push_back(w);
        ++size;
      }
    }
    int k = static_cast<int>(__builtin_popcountll(mask));
    mass[size] += wopen[static_cast<size_t>(k)] * wclosed[static_cast<size_t>(n - k)];
  }
  SizeDistribution dist;
  dist.mass = std::move(mass);
  dist.element_count = be.count;
  return dist;
}

ClusterReport explore_cluster_in_box(const LatticeView& view, const Box& box, int64_t step_cap) {
  const ModelSpec& model = view.model();
  if (step_cap < 1) throw std::invalid_argument("explore_cluster_in_box: step_cap must be >= 1");
  BoxIndex bi(box);
  ClusterReport rep;
  std::vector<char> seen(box.vertices.size(), 0);
  std::vector<int> queue;
  for (const Vertex& s : box.starts) {
    int i = bi.index.at(s);
    if (seen[static_cast<size_t>(i)]) continue;
    seen[static_cast<size_t>(i)] = 1;
    queue.push_back(i);
    ++rep.size;
  }
  size_t head = 0;
  while (head < queue.size()) {
    int vi = queue[head++];
    ++rep.steps;
    const Vertex& v = box.vertices[static_cast<size_t>(vi)];
    for (int axis = 0; axis < model.d; ++axis) {
      for (int sgn = 0; sgn < (model.oriented() ? 1 : 2); ++sgn) {
        bool positive = sgn == 0;
        Vertex w = v.shifted(axis, positive ? 1 : -1);
        auto it = bi.index.find(w);
        if (it == bi.index.end()) continue;
        int wi = it->second;
        if (seen[static_cast<size_t>(wi)]) continue;
        bool passable;
        if (model.kind == Kind::bond) {
          passable = view.bond_open(v, axis, positive);
        } else {
          passable = bi.is_start[static_cast<size_t>(wi)] || view.site_open(w);
        }
        if (!passable) continue;
        seen[static_cast<size_t>(wi)] = 1;
        queue.push_back(wi);
        ++rep.size;
        if (rep.size >= step_cap) {
          rep.truncated = true;
          return rep;
        }
      }
    }
  }
  return rep;
}

std::map<int64_t, double> empirical_cluster_distribution(const ModelSpec& model, double p,
                                                         const Box& box, int64_t replicas,
                                                         uint64_t master_seed) {
  if (replicas < 1) throw std::invalid_argument("empirical_cluster_distribution: replicas >= 1");
  std::map<int64_t, int64_t> counts;
  for (int64_t r = 0; r < replicas; ++r) {
    LatticeView view(model, {p}, RandomField(master_seed, static_cast<uint64_t>(r)));
    ClusterReport rep = explore_cluster_in_box(view, box, 1 << 20);
    ++counts[rep.size];
  }
  std::map<int64_t, double> dist;
  for (auto [size, c] : counts)
    dist[size] = static_cast<double>(c) / static_cast<double>(replicas);
  return dist;
}

double total_variation(const std::map<int64_t, double>& a, const std::map<int64_t, double>& b) {
  double tv = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      tv += std::fabs(ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      tv += std::fabs(ib->second);
      ++ib;
    } else {
      tv += std::fabs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * tv;
}

}  // namespace mc
}  // namespace perc
