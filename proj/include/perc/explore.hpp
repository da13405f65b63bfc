#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "perc/lattice_view.hpp"
#include "perc/model.hpp"
#include "perc/stats.hpp"
#include "perc/vertex.hpp"

namespace perc {
namespace mc {

// Outcome of one cluster exploration.
struct ClusterReport {
  int64_t size = 0;        // vertices in the cluster found so far
  bool truncated = false;  // hit the step cap or was cut by the box
  bool boundary_hit = false;  // cluster touched the L-inf sphere of radius L
  int64_t steps = 0;       // vertices expanded
};

// Finite-box survival proxy for theta(p) > 0.
struct SurvivalEstimate {
  double p = 0.0;
  int box_radius = 0;
  int64_t replicas = 0;
  int64_t hits = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Breadth-first exploration of the open cluster of `starts` inside the L-inf
// box of radius `box_radius`, honoring the model's kind (bond: traverse open
// edges; site: the neighbor must be open, start vertices are treated as open)
// and orientation (forward directions only). Exploration never leaves the
// box; `boundary_hit` is set when a radius-L vertex joins the cluster, and
// with `stop_at_boundary` the walk returns at that moment. `step_cap` bounds
// the number of cluster vertices.
ClusterReport explore_cluster(const LatticeView& view, const std::vector<Vertex>& starts,
                              int box_radius, int64_t step_cap, bool stop_at_boundary = false);

// Fraction of replicas whose origin cluster reaches the boundary of the
// radius-L box, with a Wilson 95% interval. Deterministic in
// (master_seed, replicas, box_radius); replicas may be evaluated in parallel.
SurvivalEstimate survival_proxy(const ModelSpec& model, double p, int box_radius,
                                int64_t replicas, uint64_t master_seed);

// An explicit finite box: vertex set plus start vertices (starts are treated
// as open in site models).
struct Box {
  std::vector<Vertex> vertices;
  std::vector<Vertex> starts;
};

// [-L,L]^d with the origin as start.
Box box_linf(int d, int L);
// Forward simplex {x >= 0, sum x_i <= L} with the origin as start (the finite
// window natural to oriented exploration).
Box box_forward_simplex(int d, int L);

// Number of random elements (edges or non-start sites) the model sees in the box.
int64_t box_element_count(const ModelSpec& model, const Box& box);

struct SizeDistribution {
  std::map<int64_t, double> mass;  // cluster size -> probability
  int64_t element_count = 0;
};

// Exact distribution of the start-cluster size restricted to the box, by
// summing p^{#open} (1-p)^{#closed} over all 2^n open/closed configurations.
// Requires at most 25 random elements.
SizeDistribution exact_cluster_distribution(const ModelSpec& model, double p, const Box& box);

// Cluster exploration restricted to an explicit box (companion to the exact
// enumeration; same reachability convention).
ClusterReport explore_cluster_in_box(const LatticeView& view, const Box& box, int64_t step_cap);

// Empirical size distribution over `replicas` explorations of the box.
std::map<int64_t, double> empirical_cluster_distribution(const ModelSpec& model, double p,
                                                         const Box& box, int64_t replicas,
                                                         uint64_t master_seed);

// Total variation distance between two size distributions.
double total_variation(const std::map<int64_t, double>& a, const std::map<int64_t, double>& b);

}  // namespace mc
}  // namespace perc
