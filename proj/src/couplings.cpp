#include "perc/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "perc/stats.hpp"

namespace perc {
namespace couplings {

namespace {

// Stream tags keep coupled runs, direct comparators and calibration samples
// on independent random fields even under one master seed.
constexpr uint64_t kStreamCoupling = 0x434F5550ull;
constexpr uint64_t kStreamDirect = 0x44495243ull;
constexpr uint64_t kStreamCalibration = 0x43414C49ull;

void require_unit_interval(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + ": parameter outside [0,1]");
}

void require_open_unit_interval(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument(std::string(what) + ": parameter outside (0,1)");
}

}  // namespace

double combine_last_two_directions(double p_d, double p_d1) {
  require_unit_interval(p_d, "combine_last_two_directions");
  require_unit_interval(p_d1, "combine_last_two_directions");
  return 1.0 - (1.0 - p_d) * (1.0 - p_d1);
}

// ---------------------------------------------------------------------------
// EdgeFrontierProcess
// ---------------------------------------------------------------------------

EdgeFrontierProcess::EdgeFrontierProcess(EdgeProcessConfig cfg, ImagePoint origin_image,
                                         Resolver resolver, ImageCheck image_check)
    : cfg_(cfg), resolver_(std::move(resolver)), image_check_(std::move(image_check)) {
  Vertex origin = Vertex::origin(cfg_.dim);
  infected_.emplace(origin, origin_image);
  image_points_.insert(origin_image);
  if (image_check_ && !image_check_(origin, origin_image)) ++identity_violations_;
  settle_vertex(origin);
}

LatticeElement EdgeFrontierProcess::edge_element(const Vertex& from, int dir, bool positive) const {
  return cfg_.triangular ? tri_edge(from, dir, positive) : zd_edge(from, dir, positive);
}

void EdgeFrontierProcess::insert_frontier(const Vertex& from, int dir, bool positive) {
  LatticeElement elem = edge_element(from, dir, positive);
  if (removed_.count(elem)) return;
  frontier_.emplace(canonical_order_key(elem), FrontierEdge{from, dir, positive});
}

// Update the susceptible set around a newly infected vertex: its edges toward
// non-infected vertices join, edges from other infected vertices into it leave.
void EdgeFrontierProcess::settle_vertex(const Vertex& w) {
  const int dirs = cfg_.triangular ? kTriDirCount : cfg_.dim;
  for (int t = 0; t < dirs; ++t) {
    if (cfg_.oriented) {
      Vertex head = w.shifted(t, 1);
      if (!infected_.count(head)) insert_frontier(w, t, true);
      Vertex tail = w.shifted(t, -1);
      if (infected_.count(tail)) frontier_.erase(canonical_order_key(edge_element(tail, t, true)));
    } else {
      for (int sgn = 0; sgn < 2; ++sgn) {
        bool positive = sgn == 0;
        Vertex nbr = cfg_.triangular ? tri_step(w, t, positive) : w.shifted(t, positive ? 1 : -1);
        if (infected_.count(nbr)) {
          frontier_.erase(canonical_order_key(edge_element(w, t, positive)));
        } else {
          insert_frontier(w, t, positive);
        }
      }
    }
  }
}

bool EdgeFrontierProcess::step(StepRecord* rec) {
  if (frontier_.empty()) return false;
  auto it = frontier_.begin();
  FrontierEdge fe = it->second;
  frontier_.erase(it);
  LatticeElement elem = edge_element(fe.from, fe.dir, fe.positive);
  removed_.insert(elem);
  Vertex to = cfg_.triangular ? tri_step(fe.from, fe.dir, fe.positive)
                              : fe.from.shifted(fe.dir, fe.positive ? 1 : -1);
  ImagePoint landing;
  EventOutcome out = resolver_(fe.from, infected_.at(fe.from), fe.dir, fe.positive, landing);
  ++steps_;
  if (out.occurred) {
    if (!image_points_.insert(landing).second) ++identity_violations_;
    if (image_check_ && !image_check_(to, landing)) ++identity_violations_;
    infected_.emplace(to, landing);
    settle_vertex(to);
  }
  if (rec) {
    rec->n = steps_;
    rec->item = elem;
    rec->event = out;
    rec->infected_size = infected_size();
  }
  return true;
}

bool EdgeFrontierProcess::frontier_matches_definition() const {
  std::map<OrderKey, FrontierEdge> expect;
  const int dirs = cfg_.triangular ? kTriDirCount : cfg_.dim;
  for (const auto& [v, img] : infected_) {
    for (int t = 0; t < dirs; ++t) {
      for (int sgn = 0; sgn < (cfg_.oriented ? 1 : 2); ++sgn) {
        bool positive = sgn == 0;
        Vertex nbr = cfg_.triangular ? tri_step(v, t, positive) : v.shifted(t, positive ? 1 : -1);
        if (infected_.count(nbr)) continue;
        LatticeElement elem = edge_element(v, t, positive);
        if (removed_.count(elem)) continue;
        expect.emplace(canonical_order_key(elem), FrontierEdge{v, t, positive});
      }
    }
  }
  if (expect.size() != frontier_.size()) return false;
  auto a = expect.begin();
  auto b = frontier_.begin();
  for (; a != expect.end(); ++a, ++b)
    if (!(a->first == b->first)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// SiteFrontierProcess
// ---------------------------------------------------------------------------

SiteFrontierProcess::SiteFrontierProcess(SiteProcessConfig cfg,
                                         std::vector<std::pair<Vertex, ImagePoint>> starts,
                                         Resolver resolver, ImageCheck image_check)
    : cfg_(cfg), resolver_(std::move(resolver)), image_check_(std::move(image_check)) {
  if (starts.empty()) throw std::invalid_argument("site process: needs at least one start");
  for (auto& [v, img] : starts) {
    infected_.emplace(v, img);
    if (!image_points_.insert(img).second) ++identity_violations_;
    if (image_check_ && !image_check_(v, img)) ++identity_violations_;
  }
  for (auto& [v, img] : starts) enqueue_neighbors(v);
}

void SiteFrontierProcess::enqueue_neighbors(const Vertex& w) {
  for (int t = 0; t < cfg_.dim; ++t) {
    for (int sgn = 0; sgn < (cfg_.oriented ? 1 : 2); ++sgn) {
      Vertex u = w.shifted(t, sgn == 0 ? 1 : -1);
      if (infected_.count(u) || removed_.count(u) || frontier_set_.count(u)) continue;
      frontier_.emplace(canonical_order_key(u), u);
      frontier_set_.insert(u);
    }
  }
}

bool SiteFrontierProcess::step(StepRecord* rec) {
  if (frontier_.empty()) return false;
  Vertex target = frontier_.begin()->second;

  // anchor = canonically smallest infected neighbor of the target
  const Vertex* anchor = nullptr;
  int dir = -1;
  bool positive = true;
  for (int t = 0; t < cfg_.dim; ++t) {
    for (int sgn = 0; sgn < 2; ++sgn) {
      bool pos = sgn == 0;
      if (cfg_.oriented && !pos) continue;  // oriented: anchors are predecessors
      Vertex v = target.shifted(t, pos ? -1 : 1);
      auto it = infected_.find(v);
      if (it == infected_.end()) continue;
      if (anchor == nullptr || canonical_order_key(v) < canonical_order_key(*anchor)) {
        anchor = &it->first;
        dir = t;
        positive = pos;
      }
    }
  }
  if (anchor == nullptr) throw std::logic_error("site process: frontier vertex without infected neighbor");
  Vertex from = *anchor;

  // fanout: susceptible neighbors of the anchor, the target included
  int fanout = 0;
  for (int t = 0; t < cfg_.dim; ++t) {
    for (int sgn = 0; sgn < (cfg_.oriented ? 1 : 2); ++sgn) {
      Vertex u = from.shifted(t, sgn == 0 ? 1 : -1);
      if (frontier_set_.count(u)) ++fanout;
    }
  }
  last_fanout_ = fanout;

  ImagePoint landing;
  EventOutcome out = resolver_(from, infected_.at(from), dir, positive, fanout, landing);
  ++steps_;
  frontier_.erase(frontier_.begin());
  frontier_set_.erase(target);
  if (out.occurred) {
    if (!image_points_.insert(landing).second) ++identity_violations_;
    if (image_check_ && !image_check_(target, landing)) ++identity_violations_;
    infected_.emplace(target, landing);
    enqueue_neighbors(target);
  } else {
    removed_.insert(target);
  }
  if (rec) {
    rec->n = steps_;
    rec->item = site_element(target);
    rec->event = out;
    rec->infected_size = infected_size();
    rec->fanout = fanout;
  }
  return true;
}

bool SiteFrontierProcess::frontier_matches_definition() const {
  std::unordered_set<Vertex, VertexHash> expect;
  for (const auto& [v, img] : infected_) {
    for (int t = 0; t < cfg_.dim; ++t) {
      for (int sgn = 0; sgn < (cfg_.oriented ? 1 : 2); ++sgn) {
        Vertex u = v.shifted(t, sgn == 0 ? 1 : -1);
        if (infected_.count(u) || removed_.count(u)) continue;
        expect.insert(u);
      }
    }
  }
  if (expect.size() != frontier_set_.size()) return false;
  for (const Vertex& u : expect)
    if (!frontier_set_.count(u)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Frontier-item resolution
// ---------------------------------------------------------------------------

EventOutcome try_cross_edge_split(const EdgeSplitView& view, const Vertex& anchor, int axis,
                                  Vertex* landing) {
  if (axis < 0 || axis >= view.source_dim())
    throw std::invalid_argument("try_cross_edge_split: axis out of range");
  Vertex cur = anchor;
  for (int k = 0; k <= kLadderCap; ++k) {
    if (view.direct_open(cur, axis)) {
      if (landing) *landing = cur.shifted(axis, 1);
      return {true, k, 0};
    }
    if (!view.split_open(cur, axis)) return {false, 0, 0};
    cur = cur.shifted(view.source_dim(), 1);
  }
  throw std::runtime_error("try_cross_edge_split: ladder cap reached (parameters too extreme)");
}

EventOutcome try_cross_vertex_split(const VertexSplitView& view, const Vertex& anchor_base,
                                    int axis, bool positive, int escalation_index,
                                    ImagePoint* landing) {
  if (axis < 0 || axis >= view.source_dim())
    throw std::invalid_argument("try_cross_vertex_split: axis out of range");
  if (escalation_index < 1 || escalation_index > view.copies())
    throw std::invalid_argument("try_cross_vertex_split: escalation index out of range");
  const int extra = view.source_dim();  // the (d+1)-th coordinate
  Vertex across = anchor_base.shifted(axis, positive ? 1 : -1);
  for (int k = 0; k <= kLadderCap; ++k) {
    Vertex col = across.shifted(extra, k);
    for (int l = 1; l <= view.copies(); ++l) {
      if (view.open(col, l)) {
        if (landing) *landing = {col, l};
        return {true, k, l};
      }
    }
    Vertex esc = anchor_base.shifted(extra, k + 1);
    if (!view.open(esc, escalation_index)) return {false, 0, 0};
  }
  throw std::runtime_error("try_cross_vertex_split: ladder cap reached (parameters too extreme)");
}

EventOutcome try_open_in_class(const LatticeView& sites, const DirectionMap& partition,
                               const Vertex& anchor, int class_index, bool positive,
                               Vertex* landing) {
  std::vector<int> members = partition.class_members(class_index);
  for (size_t i = 0; i < members.size(); ++i) {
    Vertex w = anchor.shifted(members[i], positive ? 1 : -1);
    if (sites.site_open(w)) {
      if (landing) *landing = w;
      return {true, 0, static_cast<int32_t>(i)};
    }
  }
  return {false, 0, 0};
}

double edge_split_event_probability(int d, double p) {
  require_open_unit_interval(p, "edge_split_event_probability");
  return p / (p + std::pow(1.0 - p, (d + 1.0) / d));
}

double vertex_split_event_probability(int d, double p) {
  require_open_unit_interval(p, "vertex_split_event_probability");
  return p / (p + std::pow(1.0 - p, (2.0 * d) / (2.0 * d - 1.0)));
}

double fold_event_probability(int d, int k, double p) {
  if (k < 1 || d % k != 0) throw std::invalid_argument("fold_event_probability: k must divide d");
  require_unit_interval(p, "fold_event_probability");
  return 1.0 - std::pow(1.0 - p, static_cast<double>(d) / k);
}

// ---------------------------------------------------------------------------
// Sampled-region cluster replay (the pathwise certificate)
// ---------------------------------------------------------------------------

namespace {

bool log_open(const StateLog& log, const LatticeElement& e) {
  auto it = log.find(e);
  return it != log.end() && it->second;
}

// Non-oriented bond cluster of the origin in Z^3 over the sampled states.
std::unordered_set<Vertex, VertexHash> replay_z3_bond(const StateLog& log) {
  std::unordered_set<Vertex, VertexHash> reached;
  std::vector<Vertex> queue{Vertex::origin(3)};
  reached.insert(queue[0]);
  while (!queue.empty()) {
    Vertex v = queue.back();
    queue.pop_back();
    for (int axis = 0; axis < 3; ++axis) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        bool positive = sgn == 0;
        if (!log_open(log, zd_edge(v, axis, positive))) continue;
        Vertex w = v.shifted(axis, positive ? 1 : -1);
        if (reached.insert(w).second) queue.push_back(w);
      }
    }
  }
  return reached;
}

// Oriented cluster of the origin in Z^{d+1}_E over the sampled states.
std::unordered_set<Vertex, VertexHash> replay_edge_split(const StateLog& log, int d) {
  std::unordered_set<Vertex, VertexHash> reached;
  std::vector<Vertex> queue{Vertex::origin(d + 1)};
  reached.insert(queue[0]);
  while (!queue.empty()) {
    Vertex v = queue.back();
    queue.pop_back();
    for (int axis = 0; axis < d; ++axis) {
      if (!log_open(log, zd_edge(v, axis, true))) continue;
      Vertex w = v.shifted(axis, 1);
      if (reached.insert(w).second) queue.push_back(w);
    }
    for (int label = 0; label < d; ++label) {
      if (!log_open(log, split_edge(v, label))) continue;
      Vertex w = v.shifted(d, 1);
      if (reached.insert(w).second) queue.push_back(w);
      break;  // all copies land on the same vertex
    }
  }
  return reached;
}

// Site cluster of the start copies in Z^{d+1}_V over the sampled states.
std::unordered_set<ImagePoint, ImagePointHash> replay_vertex_split(
    const StateLog& log, int d, const std::vector<ImagePoint>& starts) {
  std::unordered_set<ImagePoint, ImagePointHash> reached;
  std::vector<ImagePoint> queue;
  for (const ImagePoint& s : starts) {
    if (reached.insert(s).second) queue.push_back(s);
  }
  const int copies = 2 * d - 1;
  while (!queue.empty()) {
    ImagePoint x = queue.back();
    queue.pop_back();
    for (int axis = 0; axis < d + 1; ++axis) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        Vertex nb = x.base.shifted(axis, sgn == 0 ? 1 : -1);
        for (int l = 1; l <= copies; ++l) {
          ImagePoint y{nb, l};
          if (reached.count(y)) continue;
          if (!log_open(log, split_vertex(nb, l))) continue;
          reached.insert(y);
          queue.push_back(y);
        }
      }
    }
  }
  return reached;
}

// Site cluster of the origin in Z^d over the sampled states (origin open by
// the start convention).
std::unordered_set<Vertex, VertexHash> replay_site(const StateLog& log, int d, bool oriented) {
  std::unordered_set<Vertex, VertexHash> reached;
  std::vector<Vertex> queue{Vertex::origin(d)};
  reached.insert(queue[0]);
  while (!queue.empty()) {
    Vertex v = queue.back();
    queue.pop_back();
    for (int axis = 0; axis < d; ++axis) {
      for (int sgn = 0; sgn < (oriented ? 1 : 2); ++sgn) {
        Vertex w = v.shifted(axis, sgn == 0 ? 1 : -1);
        if (reached.count(w)) continue;
        if (!log_open(log, site_element(w))) continue;
        reached.insert(w);
        queue.push_back(w);
      }
    }
  }
  return reached;
}

// Drives a process to freezing or the step cap and fills the shared trace
// fields.
template <class Process>
CouplingTrace drive(Process& proc, const CouplingOptions& opts) {
  CouplingTrace trace;
  StepRecord rec;
  while (proc.steps_taken() < opts.step_cap && !proc.frozen()) {
    proc.step(opts.keep_log ? &rec : nullptr);
    if (opts.keep_log) trace.log.push_back(rec);
  }
  trace.infected_size = proc.infected_size();
  trace.steps = proc.steps_taken();
  trace.frozen = proc.frozen();
  trace.step_cap_hit = !trace.frozen;
  trace.identity_violations = proc.identity_violations();
  return trace;
}

template <class Member>
void finish_pathwise(CouplingTrace& trace, int64_t reached_size, Member&& images_covered) {
  trace.image_cluster_size = reached_size;
  trace.pathwise_ok = trace.infected_size <= reached_size && images_covered();
}

}  // namespace

// ---------------------------------------------------------------------------
// Coupling runs
// ---------------------------------------------------------------------------

CouplingTrace run_triangular_coupling(double p1, double p2, double p3,
                                      const CouplingOptions& opts, uint64_t master_seed,
                                      uint64_t replica) {
  require_unit_interval(p1, "run_triangular_coupling");
  require_unit_interval(p2, "run_triangular_coupling");
  require_unit_interval(p3, "run_triangular_coupling");
  StateLog log;
  LatticeView z3(bond_model(3), {p1, p2, p3}, RandomField(master_seed, replica, kStreamCoupling));
  if (opts.compute_image_cluster) z3.attach_log(&log);
  DirectionMap tau = DirectionMap::tau_triangular_to_z3();

  EdgeFrontierProcess proc(
      {2, true, false}, ImagePoint{Vertex::origin(3), 0},
      [&](const Vertex&, const ImagePoint& img, int dir, bool positive, ImagePoint& landing) {
        SignedDir sd = tau.apply_tau(dir, positive);
        bool open = z3.bond_open(img.base, sd.axis, sd.positive);
        if (open) landing = {img.base.shifted(sd.axis, sd.positive ? 1 : -1), 0};
        return EventOutcome{open, 0, 0};
      },
      [](const Vertex& v, const ImagePoint& x) {
        return v[0] == x.base[0] + x.base[2] && v[1] == x.base[1] + x.base[2];
      });

  CouplingTrace trace = drive(proc, opts);
  if (opts.compute_image_cluster) {
    auto reached = replay_z3_bond(log);
    finish_pathwise(trace, static_cast<int64_t>(reached.size()), [&] {
      for (const auto& [v, img] : proc.infected())
        if (!reached.count(img.base)) return false;
      return true;
    });
  } else {
    trace.image_cluster_size = trace.infected_size;
  }
  return trace;
}

CouplingTrace run_oriented_edge_split_coupling(int d, double p, const CouplingOptions& opts,
                                               uint64_t master_seed, uint64_t replica) {
  require_open_unit_interval(p, "run_oriented_edge_split_coupling");
  if (d < 2) throw std::invalid_argument("run_oriented_edge_split_coupling: d must be >= 2");
  StateLog log;
  EdgeSplitView view(d, p, RandomField(master_seed, replica, kStreamCoupling));
  if (opts.compute_image_cluster) view.attach_log(&log);

  EdgeFrontierProcess proc(
      {d, false, true}, ImagePoint{Vertex::origin(d + 1), 0},
      [&](const Vertex&, const ImagePoint& img, int axis, bool, ImagePoint& landing) {
        Vertex land;
        EventOutcome out = try_cross_edge_split(view, img.base, axis, &land);
        if (out.occurred) landing = {land, 0};
        return out;
      },
      [d](const Vertex& v, const ImagePoint& x) {
        for (int i = 0; i < d; ++i)
          if (v[i] != x.base[i]) return false;
        return true;
      });

  CouplingTrace trace = drive(proc, opts);
  if (opts.compute_image_cluster) {
    auto reached = replay_edge_split(log, d);
    finish_pathwise(trace, static_cast<int64_t>(reached.size()), [&] {
      for (const auto& [v, img] : proc.infected())
        if (!reached.count(img.base)) return false;
      return true;
    });
  } else {
    trace.image_cluster_size = trace.infected_size;
  }
  return trace;
}

CouplingTrace run_site_vertex_split_coupling(int d, double p, const CouplingOptions& opts,
                                             uint64_t master_seed, uint64_t replica) {
  require_open_unit_interval(p, "run_site_vertex_split_coupling");
  if (d < 2) throw std::invalid_argument("run_site_vertex_split_coupling: d must be >= 2");
  StateLog log;
  VertexSplitView view(d, p, RandomField(master_seed, replica, kStreamCoupling));
  if (opts.compute_image_cluster) view.attach_log(&log);

  Vertex src_origin = Vertex::origin(d);
  Vertex src_e1 = src_origin.shifted(0, 1);
  ImagePoint img_origin{Vertex::origin(d + 1), 1};
  ImagePoint img_e1{Vertex::origin(d + 1).shifted(0, 1), 1};

  SiteFrontierProcess proc(
      {d, false}, {{src_origin, img_origin}, {src_e1, img_e1}},
      [&](const Vertex&, const ImagePoint& img, int axis, bool positive, int fanout,
          ImagePoint& landing) {
        return try_cross_vertex_split(view, img.base, axis, positive, fanout, &landing);
      },
      [d](const Vertex& v, const ImagePoint& x) {
        for (int i = 0; i < d; ++i)
          if (v[i] != x.base[i]) return false;
        return x.split_index >= 1 && x.split_index <= 2 * d - 1;
      });

  CouplingTrace trace = drive(proc, opts);
  if (opts.compute_image_cluster) {
    auto reached = replay_vertex_split(log, d, {img_origin, img_e1});
    finish_pathwise(trace, static_cast<int64_t>(reached.size()), [&] {
      for (const auto& [v, img] : proc.infected())
        if (!reached.count(img)) return false;
      return true;
    });
  } else {
    trace.image_cluster_size = trace.infected_size;
  }
  return trace;
}

CouplingTrace run_dimension_fold_coupling(int d, int k, double p, Orientation orientation,
                                          const CouplingOptions& opts, uint64_t master_seed,
                                          uint64_t replica) {
  require_open_unit_interval(p, "run_dimension_fold_coupling");
  if (k < 1 || d < k || d % k != 0)
    throw std::invalid_argument("run_dimension_fold_coupling: k must divide d");
  StateLog log;
  LatticeView sites(site_model(d), {p}, RandomField(master_seed, replica, kStreamCoupling));
  if (opts.compute_image_cluster) sites.attach_log(&log);
  DirectionMap part = DirectionMap::uniform_partition(d, k);

  SiteFrontierProcess proc(
      {k, orientation == Orientation::oriented},
      {{Vertex::origin(k), ImagePoint{Vertex::origin(d), 0}}},
      [&](const Vertex&, const ImagePoint& img, int cls, bool positive, int,
          ImagePoint& landing) {
        Vertex land;
        EventOutcome out = try_open_in_class(sites, part, img.base, cls, positive, &land);
        if (out.occurred) landing = {land, 0};
        return out;
      },
      [&part, d, k](const Vertex& v, const ImagePoint& x) {
        for (int j = 0; j < k; ++j) {
          int64_t sum = 0;
          for (int axis : part.class_members(j)) sum += x.base[axis];
          if (sum != v[j]) return false;
        }
        (void)d;
        return true;
      });

  CouplingTrace trace = drive(proc, opts);
  if (opts.compute_image_cluster) {
    auto reached = replay_site(log, d, orientation == Orientation::oriented);
    finish_pathwise(trace, static_cast<int64_t>(reached.size()), [&] {
      for (const auto& [v, img] : proc.infected())
        if (!reached.count(img.base)) return false;
      return true;
    });
  } else {
    trace.image_cluster_size = trace.infected_size;
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Direct comparators
// ---------------------------------------------------------------------------

CouplingTrace run_direct_triangular(double p1, double p2, double p3, const CouplingOptions& opts,
                                    uint64_t master_seed, uint64_t replica) {
  require_unit_interval(p1, "run_direct_triangular");
  require_unit_interval(p2, "run_direct_triangular");
  require_unit_interval(p3, "run_direct_triangular");
  LatticeView view =
      LatticeView::triangular(p1, p2, p3, RandomField(master_seed, replica, kStreamDirect));

  EdgeFrontierProcess proc(
      {2, true, false}, ImagePoint{Vertex::origin(2), 0},
      [&](const Vertex& from, const ImagePoint&, int dir, bool positive, ImagePoint& landing) {
        bool open = view.tri_bond_open(from, dir, positive);
        if (open) landing = {tri_step(from, dir, positive), 0};
        return EventOutcome{open, 0, 0};
      },
      [](const Vertex& v, const ImagePoint& x) { return v == x.base; });

  CouplingTrace trace = drive(proc, opts);
  trace.image_cluster_size = trace.infected_size;
  return trace;
}

CouplingTrace run_direct_bond(int d, double p, Orientation orientation,
                              const CouplingOptions& opts, uint64_t master_seed,
                              uint64_t replica) {
  require_unit_interval(p, "run_direct_bond");
  ModelSpec model{d, Kind::bond, orientation};
  LatticeView view(model, {p}, RandomField(master_seed, replica, kStreamDirect));

  EdgeFrontierProcess proc(
      {d, false, orientation == Orientation::oriented}, ImagePoint{Vertex::origin(d), 0},
      [&](const Vertex& from, const ImagePoint&, int axis, bool positive, ImagePoint& landing) {
        bool open = view.bond_open(from, axis, positive);
        if (open) landing = {from.shifted(axis, positive ? 1 : -1), 0};
        return EventOutcome{open, 0, 0};
      },
      [](const Vertex& v, const ImagePoint& x) { return v == x.base; });

  CouplingTrace trace = drive(proc, opts);
  trace.image_cluster_size = trace.infected_size;
  return trace;
}

CouplingTrace run_direct_site(int d, double p, Orientation orientation, bool pair_start,
                              const CouplingOptions& opts, uint64_t master_seed,
                              uint64_t replica) {
  require_unit_interval(p, "run_direct_site");
  ModelSpec model{d, Kind::site, orientation};
  LatticeView view(model, {p}, RandomField(master_seed, replica, kStreamDirect));

  std::vector<std::pair<Vertex, ImagePoint>> starts;
  Vertex origin = Vertex::origin(d);
  starts.push_back({origin, ImagePoint{origin, 0}});
  if (pair_start) {
    Vertex e1 = origin.shifted(0, 1);
    starts.push_back({e1, ImagePoint{e1, 0}});
  }

  SiteFrontierProcess proc(
      {d, orientation == Orientation::oriented}, starts,
      [&](const Vertex& from, const ImagePoint&, int axis, bool positive, int,
          ImagePoint& landing) {
        Vertex target = from.shifted(axis, positive ? 1 : -1);
        bool open = view.site_open(target);
        if (open) landing = {target, 0};
        return EventOutcome{open, 0, 0};
      },
      [](const Vertex& v, const ImagePoint& x) { return v == x.base; });

  CouplingTrace trace = drive(proc, opts);
  trace.image_cluster_size = trace.infected_size;
  return trace;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

CouplingKindId parse_coupling_kind(const std::string& s) {
  if (s == "triangular") return CouplingKindId::triangular;
  if (s == "edge-split") return CouplingKindId::edge_split;
  if (s == "vertex-split") return CouplingKindId::vertex_split;
  if (s == "fold") return CouplingKindId::fold;
  throw std::invalid_argument("unknown coupling kind: " + s);
}

std::string coupling_kind_name(CouplingKindId k) {
  switch (k) {
    case CouplingKindId::triangular: return "triangular";
    case CouplingKindId::edge_split: return "edge-split";
    case CouplingKindId::vertex_split: return "vertex-split";
    case CouplingKindId::fold: return "fold";
  }
  return "?";
}

CalibrationResult calibrate_event(const CouplingParams& params, int64_t samples,
                                  uint64_t master_seed) {
  if (samples < 1) throw std::invalid_argument("calibrate_event: samples must be >= 1");
  double expected = 0.0;
  int64_t hits = 0;
  switch (params.kind) {
    case CouplingKindId::triangular: {
      require_unit_interval(params.p1, "calibrate_event");
      expected = params.p1;
      for (int64_t s = 0; s < samples; ++s) {
        LatticeView z3(bond_model(3), {params.p1, params.p2, params.p3},
                       RandomField(master_seed, static_cast<uint64_t>(s), kStreamCalibration));
        if (z3.bond_open(Vertex::origin(3), 0, true)) ++hits;
      }
      break;
    }
    case CouplingKindId::edge_split: {
      expected = edge_split_event_probability(params.d, params.p);
      for (int64_t s = 0; s < samples; ++s) {
        EdgeSplitView view(params.d, params.p,
                           RandomField(master_seed, static_cast<uint64_t>(s), kStreamCalibration));
        if (try_cross_edge_split(view, Vertex::origin(params.d + 1), 0).occurred) ++hits;
      }
      break;
    }
    case CouplingKindId::vertex_split: {
      expected = vertex_split_event_probability(params.d, params.p);
      for (int64_t s = 0; s < samples; ++s) {
        VertexSplitView view(params.d, params.p,
                             RandomField(master_seed, static_cast<uint64_t>(s), kStreamCalibration));
        if (try_cross_vertex_split(view, Vertex::origin(params.d + 1), 0, true, 1).occurred)
          ++hits;
      }
      break;
    }
    case CouplingKindId::fold: {
      expected = fold_event_probability(params.d, params.k, params.p);
      DirectionMap part = DirectionMap::uniform_partition(params.d, params.k);
      for (int64_t s = 0; s < samples; ++s) {
        LatticeView sites(site_model(params.d), {params.p},
                          RandomField(master_seed, static_cast<uint64_t>(s), kStreamCalibration));
        if (try_open_in_class(sites, part, Vertex::origin(params.d), 0, true).occurred) ++hits;
      }
      break;
    }
  }
  CalibrationResult res;
  res.expected = expected;
  res.samples = samples;
  res.empirical = static_cast<double>(hits) / static_cast<double>(samples);
  double sd = std::sqrt(expected * (1.0 - expected) / static_cast<double>(samples));
  res.sigma_units = sd > 0 ? std::fabs(res.empirical - expected) / sd : 0.0;
  res.pass = res.sigma_units <= 3.0;
  return res;
}

namespace {

CouplingTrace run_coupling_dispatch(const CouplingParams& params, const CouplingOptions& opts,
                                    uint64_t seed, uint64_t replica) {
  switch (params.kind) {
    case CouplingKindId::triangular:
      return run_triangular_coupling(params.p1, params.p2, params.p3, opts, seed, replica);
    case CouplingKindId::edge_split:
      return run_oriented_edge_split_coupling(params.d, params.p, opts, seed, replica);
    case CouplingKindId::vertex_split:
      return run_site_vertex_split_coupling(params.d, params.p, opts, seed, replica);
    case CouplingKindId::fold:
      return run_dimension_fold_coupling(params.d, params.k, params.p, params.orientation, opts,
                                         seed, replica);
  }
  throw std::logic_error("unreachable");
}

CouplingTrace run_direct_dispatch(const CouplingParams& params, const CouplingOptions& opts,
                                  uint64_t seed, uint64_t replica) {
  switch (params.kind) {
    case CouplingKindId::triangular:
      return run_direct_triangular(params.p1, params.p2, params.p3, opts, seed, replica);
    case CouplingKindId::edge_split:
      return run_direct_bond(params.d, edge_split_event_probability(params.d, params.p),
                             Orientation::oriented, opts, seed, replica);
    case CouplingKindId::vertex_split:
      return run_direct_site(params.d, vertex_split_event_probability(params.d, params.p),
                             Orientation::non_oriented, true, opts, seed, replica);
    case CouplingKindId::fold:
      return run_direct_site(params.k, fold_event_probability(params.d, params.k, params.p),
                             params.orientation, false, opts, seed, replica);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

DominationReport validate_domination(const CouplingParams& params, int64_t replicas,
                                     const std::vector<int64_t>& size_grid, int64_t step_cap,
                                     uint64_t master_seed, double alpha_total) {
  if (replicas < 100) throw std::invalid_argument("validate_domination: needs at least 100 replicas");
  if (size_grid.empty()) throw std::invalid_argument("validate_domination: empty size grid");

  DominationReport report;
  report.replicas = replicas;
  report.step_cap = step_cap;
  report.alpha_total = alpha_total;

  CouplingOptions copts;
  copts.step_cap = step_cap;
  copts.keep_log = false;
  copts.compute_image_cluster = true;
  CouplingOptions dopts;
  dopts.step_cap = step_cap;
  dopts.keep_log = false;
  dopts.compute_image_cluster = false;

  // Replicas are independent; run them in parallel chunks. Results land in
  // per-replica slots and the violation counters are plain sums, so the
  // outcome matches any serial execution order.
  std::vector<int64_t> sizes_c(static_cast<size_t>(replicas)),
      sizes_d(static_cast<size_t>(replicas));
  auto worker = [&](int64_t lo, int64_t hi) {
    int64_t pathwise = 0, identity = 0;
    for (int64_t r = lo; r < hi; ++r) {
      CouplingTrace t = run_coupling_dispatch(params, copts, master_seed, static_cast<uint64_t>(r));
      if (!t.pathwise_ok) ++pathwise;
      identity += t.identity_violations;
      sizes_c[static_cast<size_t>(r)] = t.infected_size;
      CouplingTrace u = run_direct_dispatch(params, dopts, master_seed, static_cast<uint64_t>(r));
      identity += u.identity_violations;
      sizes_d[static_cast<size_t>(r)] = u.infected_size;
    }
    return std::pair<int64_t, int64_t>{pathwise, identity};
  };
  unsigned hw = std::thread::hardware_concurrency();
  int64_t nthreads = std::max<int64_t>(1, std::min<int64_t>(hw ? hw : 1, replicas / 64));
  if (nthreads <= 1) {
    auto [pathwise, identity] = worker(0, replicas);
    report.pathwise_violations = pathwise;
    report.identity_violations = identity;
  } else {
    std::vector<std::future<std::pair<int64_t, int64_t>>> futs;
    int64_t chunk = (replicas + nthreads - 1) / nthreads;
    for (int64_t lo = 0; lo < replicas; lo += chunk)
      futs.push_back(std::async(std::launch::async, worker, lo, std::min(lo + chunk, replicas)));
    for (auto& f : futs) {
      auto [pathwise, identity] = f.get();
      report.pathwise_violations += pathwise;
      report.identity_violations += identity;
    }
  }

  double alpha_point = alpha_total / static_cast<double>(size_grid.size());
  report.distributional_pass = true;
  for (int64_t m : size_grid) {
    auto tail = [m](const std::vector<int64_t>& v) {
      return static_cast<int64_t>(std::count_if(v.begin(), v.end(), [m](int64_t s) { return s >= m; }));
    };
    int64_t x1 = tail(sizes_c), x2 = tail(sizes_d);
    TailComparison cmp;
    cmp.m = m;
    cmp.coupling = static_cast<double>(x1) / static_cast<double>(replicas);
    cmp.direct = static_cast<double>(x2) / static_cast<double>(replicas);
    cmp.pvalue = two_proportion_pvalue(x1, replicas, x2, replicas);
    cmp.pass = cmp.pvalue >= alpha_point;
    if (!cmp.pass) report.distributional_pass = false;
    report.tails.push_back(cmp);
  }

  report.pass = report.pathwise_violations == 0 && report.identity_violations == 0 &&
                report.distributional_pass;
  return report;
}

}  // namespace couplings
}  // namespace perc
