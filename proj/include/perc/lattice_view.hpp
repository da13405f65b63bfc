#pragma once

#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "perc/lattice.hpp"
#include "perc/model.hpp"
#include "perc/rng.hpp"
#include "perc/vertex.hpp"

namespace perc {

// Sampled states by canonical element id. Views fill this when a log is
// attached; the couplings replay it to explore the target cluster inside the
// region the run actually touched.
using StateLog = std::unordered_map<LatticeElement, bool, ElementHash>;

namespace detail {
inline bool sample_state(const RandomField& field, StateLog* log, const LatticeElement& e,
                         double p) {
  bool open = field.uniform(e.hash()) < p;
  if (log) log->emplace(e, open);
  return open;
}
}  // namespace detail

// Lazily sampled open/closed states for edges or sites of Z^d or T, with
// per-direction-class open probabilities. States are a pure function of
// (field, element id): querying an element twice gives the same answer, in
// any order, from any thread.
class LatticeView {
 public:
  // Z^d view. `class_probs` has one entry per direction class (size d) for
  // bond models, or a single entry for site models.
  LatticeView(ModelSpec model, std::vector<double> class_probs, RandomField field)
      : model_(model), probs_(std::move(class_probs)), field_(field), triangular_(false) {
    size_t want = model.kind == Kind::bond ? static_cast<size_t>(model.d) : 1;
    if (probs_.size() == 1 && want > 1) probs_.assign(want, probs_[0]);
    if (probs_.size() != want) throw std::invalid_argument("LatticeView: wrong number of class probabilities");
    check_probs();
  }

  // Anisotropic bond view on the triangular lattice; probabilities attach to
  // the direction classes (1,0), (0,1), (1,1).
  static LatticeView triangular(double p1, double p2, double p3, RandomField field) {
    LatticeView v(bond_model(2), {p1, p2, p3}, field, true);
    return v;
  }

  const ModelSpec& model() const { return model_; }
  bool is_triangular() const { return triangular_; }
  const std::vector<double>& class_probs() const { return probs_; }

  void attach_log(StateLog* log) { log_ = log; }
  StateLog* log() const { return log_; }

  // Edge <from, from +- e_axis> (Z^d) open?
  bool bond_open(const Vertex& from, int axis, bool positive) const {
    return detail::sample_state(field_, log_, zd_edge(from, axis, positive),
                                probs_[static_cast<size_t>(axis)]);
  }

  // Edge <from, from +- tridir(dir_index)> (T) open?
  bool tri_bond_open(const Vertex& from, int dir_index, bool positive) const {
    return detail::sample_state(field_, log_, tri_edge(from, dir_index, positive),
                                probs_[static_cast<size_t>(dir_index)]);
  }

  bool site_open(const Vertex& v) const {
    return detail::sample_state(field_, log_, site_element(v), probs_[0]);
  }

 private:
  LatticeView(ModelSpec model, std::vector<double> probs, RandomField field, bool tri)
      : model_(model), probs_(std::move(probs)), field_(field), triangular_(tri) {
    check_probs();
  }

  void check_probs() const {
    for (double p : probs_)
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability out of [0,1]");
  }

  ModelSpec model_;
  std::vector<double> probs_;
  RandomField field_;
  bool triangular_;
  StateLog* log_ = nullptr;
};

// Oriented bond view on the multigraph Z^{d+1}_E: edges along u_1..u_d keep
// probability p, while each edge parallel to u_{d+1} is split into d labelled
// copies, each open with probability q, (1-p) = (1-q)^d.
class EdgeSplitView {
 public:
  EdgeSplitView(int source_d, double p, RandomField field)
      : d_(source_d), p_(p), field_(field) {
    if (source_d < 2 || source_d + 1 > kMaxDim)
      throw std::invalid_argument("EdgeSplitView: source dimension out of range");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("EdgeSplitView: p must be in (0,1)");
    q_ = 1.0 - std::pow(1.0 - p, 1.0 / source_d);
  }

  int source_dim() const { return d_; }
  int ambient_dim() const { return d_ + 1; }
  double p() const { return p_; }
  double q() const { return q_; }
  void attach_log(StateLog* log) { log_ = log; }

  // Unsplit edge <base, base + u_axis>, axis in 0..d-1.
  bool direct_open(const Vertex& base, int axis) const {
    return detail::sample_state(field_, log_, zd_edge(base, axis, true), p_);
  }

  // Labelled copy <base, base + u_{d+1}>_label, label in 0..d-1.
  bool split_open(const Vertex& base, int label) const {
    return detail::sample_state(field_, log_, split_edge(base, label), q_);
  }

 private:
  int d_;
  double p_, q_;
  RandomField field_;
  StateLog* log_ = nullptr;
};

// Site view on Z^{d+1}_V: every vertex of Z^{d+1} is split into 2d-1 copies,
// each open with probability q, (1-p) = (1-q)^{2d-1}.
class VertexSplitView {
 public:
  VertexSplitView(int source_d, double p, RandomField field)
      : d_(source_d), p_(p), field_(field) {
    if (source_d < 2 || source_d + 1 > kMaxDim)
      throw std::invalid_argument("VertexSplitView: source dimension out of range");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("VertexSplitView: p must be in (0,1)");
    q_ = 1.0 - std::pow(1.0 - p, 1.0 / (2 * source_d - 1));
  }

  int source_dim() const { return d_; }
  int ambient_dim() const { return d_ + 1; }
  int copies() const { return 2 * d_ - 1; }
  double p() const { return p_; }
  double q() const { return q_; }
  void attach_log(StateLog* log) { log_ = log; }

  // Copy base^(index) open? index in 1..2d-1.
  bool open(const Vertex& base, int index) const {
    return detail::sample_state(field_, log_, split_vertex(base, index), q_);
  }

 private:
  int d_;
  double p_, q_;
  RandomField field_;
  StateLog* log_ = nullptr;
};

}  // namespace perc
