#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "perc/lattice.hpp"
#include "perc/lattice_view.hpp"
#include "perc/model.hpp"
#include "perc/vertex.hpp"

namespace perc {
namespace couplings {

// Folding identity for the last two directions: the combined class is open
// with probability 1 - (1-p_d)(1-p_{d+1}).
double combine_last_two_directions(double p_d, double p_d1);

// Outcome of resolving one frontier item. `landing_k` counts the extra-
// direction steps taken before the crossing opened; `landing_label` is the
// split copy used (vertex-split) or the in-class position (fold).
struct EventOutcome {
  bool occurred = false;
  int32_t landing_k = 0;
  int32_t landing_label = 0;
};

// Image of a source vertex in the target lattice: a base vertex plus the
// split copy index (0 for unsplit lattices).
struct ImagePoint {
  Vertex base;
  int32_t split_index = 0;
  bool operator==(const ImagePoint&) const = default;
};

struct ImagePointHash {
  size_t operator()(const ImagePoint& x) const {
    return static_cast<size_t>(mix64(VertexHash{}(x.base) ^
                                     (static_cast<uint64_t>(static_cast<uint32_t>(x.split_index)) << 32)));
  }
};

struct StepRecord {
  int64_t n = 0;
  LatticeElement item;  // the source-lattice item that was resolved
  EventOutcome event;
  int64_t infected_size = 0;
  int32_t fanout = 0;  // susceptible neighbors of the anchor (site processes)
};

// Result of one coupling run.
struct CouplingTrace {
  int64_t infected_size = 0;
  int64_t image_cluster_size = 0;  // target cluster size within the sampled region
  int64_t steps = 0;
  bool frozen = false;        // frontier emptied
  bool step_cap_hit = false;
  int64_t identity_violations = 0;  // injectivity/projection failures (must stay 0)
  bool pathwise_ok = true;          // infected <= image cluster, images all reached
  std::vector<StepRecord> log;
};

struct CouplingOptions {
  int64_t step_cap = 100000;          // resolutions
  bool keep_log = true;
  bool compute_image_cluster = true;  // replay the sampled states to size the target cluster
};

// ---------------------------------------------------------------------------
// Susceptible-infected engines
// ---------------------------------------------------------------------------
// Both engines grow an infected set over a source lattice, resolving one
// frontier item per step (the canonically smallest), exactly in the shape of
// the quadruple (infected, image, removed, frontier). The resolver owns the
// target-lattice randomness.

struct EdgeProcessConfig {
  int dim = 2;
  bool triangular = false;  // use the 3 T directions instead of unit axes
  bool oriented = false;    // frontier = out-edges of infected vertices
};

class EdgeFrontierProcess {
 public:
  struct FrontierEdge {
    Vertex from;  // infected endpoint
    int dir = 0;
    bool positive = true;
  };
  // Resolves edge <from, from+dir>; on success fills `landing` with the image
  // of the new vertex.
  using Resolver = std::function<EventOutcome(const Vertex& from, const ImagePoint& image,
                                              int dir, bool positive, ImagePoint& landing)>;
  // Source/image consistency predicate (projection identity).
  using ImageCheck = std::function<bool(const Vertex&, const ImagePoint&)>;

  EdgeFrontierProcess(EdgeProcessConfig cfg, ImagePoint origin_image, Resolver resolver,
                      ImageCheck image_check = nullptr);

  bool frozen() const { return frontier_.empty(); }
  // One resolution; returns false (and changes nothing) when frozen.
  bool step(StepRecord* rec = nullptr);

  int64_t infected_size() const { return static_cast<int64_t>(infected_.size()); }
  int64_t steps_taken() const { return steps_; }
  int64_t identity_violations() const { return identity_violations_; }
  const std::unordered_map<Vertex, ImagePoint, VertexHash>& infected() const { return infected_; }
  size_t frontier_size() const { return frontier_.size(); }

  // Recomputes the susceptible set from (infected, removed) and compares.
  bool frontier_matches_definition() const;

 private:
  void insert_frontier(const Vertex& from, int dir, bool positive);
  void settle_vertex(const Vertex& w);
  LatticeElement edge_element(const Vertex& from, int dir, bool positive) const;

  EdgeProcessConfig cfg_;
  Resolver resolver_;
  ImageCheck image_check_;
  std::unordered_map<Vertex, ImagePoint, VertexHash> infected_;
  std::unordered_set<ImagePoint, ImagePointHash> image_points_;
  std::unordered_set<LatticeElement, ElementHash> removed_;
  std::map<OrderKey, FrontierEdge> frontier_;
  int64_t steps_ = 0;
  int64_t identity_violations_ = 0;
};

struct SiteProcessConfig {
  int dim = 2;
  bool oriented = false;  // frontier = forward neighbors of infected vertices
};

class SiteFrontierProcess {
 public:
  // Resolves frontier vertex from+dir; `fanout` is the number of susceptible
  // neighbors of the anchor (the escalation copy index for the vertex-split
  // coupling; other resolvers ignore it).
  using Resolver = std::function<EventOutcome(const Vertex& from, const ImagePoint& image,
                                              int dir, bool positive, int fanout,
                                              ImagePoint& landing)>;
  using ImageCheck = std::function<bool(const Vertex&, const ImagePoint&)>;

  SiteFrontierProcess(SiteProcessConfig cfg,
                      std::vector<std::pair<Vertex, ImagePoint>> starts, Resolver resolver,
                      ImageCheck image_check = nullptr);

  bool frozen() const { return frontier_.empty(); }
  bool step(StepRecord* rec = nullptr);

  int64_t infected_size() const { return static_cast<int64_t>(infected_.size()); }
  int64_t steps_taken() const { return steps_; }
  int64_t identity_violations() const { return identity_violations_; }
  const std::unordered_map<Vertex, ImagePoint, VertexHash>& infected() const { return infected_; }
  size_t frontier_size() const { return frontier_.size(); }
  int last_fanout() const { return last_fanout_; }

  bool frontier_matches_definition() const;

 private:
  void enqueue_neighbors(const Vertex& w);

  SiteProcessConfig cfg_;
  Resolver resolver_;
  ImageCheck image_check_;
  std::unordered_map<Vertex, ImagePoint, VertexHash> infected_;
  std::unordered_set<ImagePoint, ImagePointHash> image_points_;
  std::unordered_set<Vertex, VertexHash> removed_;
  std::map<OrderKey, Vertex> frontier_;
  std::unordered_set<Vertex, VertexHash> frontier_set_;
  int64_t steps_ = 0;
  int64_t identity_violations_ = 0;
  int last_fanout_ = 0;
};

// ---------------------------------------------------------------------------
// Frontier-item resolution against the split/target lattices
// ---------------------------------------------------------------------------

// Cap on the extra-direction walk; reaching it signals parameters too extreme
// for desk scale and throws.
inline constexpr int kLadderCap = 10000;

// Oriented edge-split crossing: either <anchor, anchor+u_axis> is open, or a
// run of labelled copies climbs k levels before the crossing at level k opens.
EventOutcome try_cross_edge_split(const EdgeSplitView& view, const Vertex& anchor, int axis,
                                  Vertex* landing = nullptr);

// Vertex-split crossing from anchor toward sigma(e); `escalation_index` is the
// split copy the climb uses (the fanout j of the anchor).
EventOutcome try_cross_vertex_split(const VertexSplitView& view, const Vertex& anchor_base,
                                    int axis, bool positive, int escalation_index,
                                    ImagePoint* landing = nullptr);

// Fold probe: first open site among anchor+e, e in the class D_u (negative
// class for negative u).
EventOutcome try_open_in_class(const LatticeView& sites, const DirectionMap& partition,
                               const Vertex& anchor, int class_index, bool positive,
                               Vertex* landing = nullptr);

// Closed forms for the three event probabilities.
double edge_split_event_probability(int d, double p);    // p / (p + (1-p)^{(d+1)/d})
double vertex_split_event_probability(int d, double p);  // p / (p + (1-p)^{2d/(2d-1)})
double fold_event_probability(int d, int k, double p);   // 1 - (1-p)^{d/k}

// ---------------------------------------------------------------------------
// Coupling runs
// ---------------------------------------------------------------------------

// Infection process on T driven by openness queries in Z^3 with direction
// parameters (p1,p2,p3); starts at the origin.
CouplingTrace run_triangular_coupling(double p1, double p2, double p3,
                                      const CouplingOptions& opts, uint64_t master_seed,
                                      uint64_t replica = 0);

// Oriented process on Z^d resolved through the edge-split multigraph
// Z^{d+1}_E at parameter p.
CouplingTrace run_oriented_edge_split_coupling(int d, double p, const CouplingOptions& opts,
                                               uint64_t master_seed, uint64_t replica = 0);

// Non-oriented site process on Z^d resolved through Z^{d+1}_V; starts with the
// two infected vertices {0, e_1}.
CouplingTrace run_site_vertex_split_coupling(int d, double p, const CouplingOptions& opts,
                                             uint64_t master_seed, uint64_t replica = 0);

// Site process on Z^k resolved through class probes in Z^d (k | d), matching
// the requested orientation.
CouplingTrace run_dimension_fold_coupling(int d, int k, double p, Orientation orientation,
                                          const CouplingOptions& opts, uint64_t master_seed,
                                          uint64_t replica = 0);

// Direct counterparts: the same engines, same canonical ordering and caps,
// with every frontier item resolved by its own Bernoulli state on the source
// lattice (images are the identity).
CouplingTrace run_direct_triangular(double p1, double p2, double p3, const CouplingOptions& opts,
                                    uint64_t master_seed, uint64_t replica = 0);
CouplingTrace run_direct_bond(int d, double p, Orientation orientation,
                              const CouplingOptions& opts, uint64_t master_seed,
                              uint64_t replica = 0);
CouplingTrace run_direct_site(int d, double p, Orientation orientation, bool pair_start,
                              const CouplingOptions& opts, uint64_t master_seed,
                              uint64_t replica = 0);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class CouplingKindId { triangular, edge_split, vertex_split, fold };

CouplingKindId parse_coupling_kind(const std::string& s);
std::string coupling_kind_name(CouplingKindId k);

struct CouplingParams {
  CouplingKindId kind = CouplingKindId::triangular;
  int d = 3;
  int k = 1;                  // fold only
  double p = 0.5;             // edge-split / vertex-split / fold
  double p1 = 0, p2 = 0, p3 = 0;  // triangular only
  Orientation orientation = Orientation::non_oriented;  // fold only
};

struct CalibrationResult {
  double expected = 0.0;
  double empirical = 0.0;
  int64_t samples = 0;
  double sigma_units = 0.0;  // |empirical - expected| in binomial SDs
  bool pass = false;
};

// Empirical event frequency over independent resolutions vs the closed form,
// within 3 binomial standard deviations.
CalibrationResult calibrate_event(const CouplingParams& params, int64_t samples,
                                  uint64_t master_seed);

struct TailComparison {
  int64_t m = 0;
  double coupling = 0.0;
  double direct = 0.0;
  double pvalue = 1.0;
  bool pass = true;
};

struct DominationReport {
  int64_t replicas = 0;
  int64_t step_cap = 0;
  int64_t pathwise_violations = 0;
  int64_t identity_violations = 0;
  std::vector<TailComparison> tails;
  double alpha_total = 0.001;
  bool distributional_pass = true;
  bool pass = false;
};

// Pathwise and distributional validation: (i) within every coupled replica
// the infected-set size must not exceed the explored image-cluster size;
// (ii) the truncated tail functionals P(|I| >= m) must agree with direct
// simulation of the source model, via two-sample proportion tests at the
// Bonferroni-corrected level.
DominationReport validate_domination(const CouplingParams& params, int64_t replicas,
                                     const std::vector<int64_t>& size_grid, int64_t step_cap,
                                     uint64_t master_seed, double alpha_total = 0.001);

}  // namespace couplings
}  // namespace perc
