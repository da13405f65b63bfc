#include "perc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace perc {
namespace bounds {

namespace {

constexpr double kBracketLo = 1e-9;
constexpr double kBracketHi = 1.0 - 1e-9;
constexpr double kRootTol = 1e-12;

void require_probability(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument(std::string(what) + ": value outside (0,1)");
}

BoundResult make_result(ModelSpec model, double value, Method method,
                        std::vector<ProvenanceEntry> parents) {
  require_probability(value, "bound value");
  BoundResult r;
  r.model = model;
  r.value = value;
  r.rounded = round_up_4dp(value);
  r.method = method;
  r.provenance = std::move(parents);
  r.provenance.push_back({method, model.d, value});
  return r;
}

// Solve and certify: root solved on the standard bracket, then a grid scan
// confirms the residual changes sign exactly once on (0,1).
double solve_certified(const std::function<double(double)>& residual, const char* what) {
  RootProblem prob{residual, kBracketLo, kBracketHi, kRootTol};
  double r = solve_bracketed_root(prob);
  if (count_sign_changes(residual) != 1)
    throw std::runtime_error(std::string(what) + ": residual does not have a unique sign change on (0,1)");
  return r;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::thm1: return "thm1";
    case Method::thm2_1: return "thm2.1";
    case Method::thm2_2: return "thm2.2";
    case Method::thm2_3: return "thm2.3";
    case Method::thm3_1: return "thm3.1";
    case Method::thm3_2: return "thm3.2";
    case Method::thm3_3: return "thm3.3";
    case Method::thm4_1: return "thm4.1";
    case Method::thm4_2: return "thm4.2";
    case Method::registry: return "registry";
  }
  return "?";
}

const std::array<KnownConstant, 4>& known_constants() {
  static const std::array<KnownConstant, 4> table = {{
      {oriented_bond_model(2), 2.0 / 3.0, "Liggett 1995"},
      {site_model(2), 0.68, "Wierman 1995"},
      {site_model(3), 0.5, "Campanino-Russo 1985"},
      {oriented_site_model(2), 0.75, "Liggett 1995"},
  }};
  return table;
}

const KnownConstant& registry_constant(const ModelSpec& family, int d) {
  for (const auto& kc : known_constants()) {
    if (kc.model.kind == family.kind && kc.model.orientation == family.orientation &&
        kc.model.d == d)
      return kc;
  }
  throw std::invalid_argument("no registry constant for " + family_name(family) + " d=" +
                              std::to_string(d));
}

BoundResult registry_bound(const ModelSpec& family, int d) {
  const KnownConstant& kc = registry_constant(family, d);
  return make_result(kc.model, kc.value, Method::registry, {});
}

double round_up_4dp(double v) { return std::ceil(v * 1e4) / 1e4; }

double solve_bracketed_root(const RootProblem& problem) {
  if (!(problem.tolerance > 0.0)) throw std::invalid_argument("root solver: tolerance must be positive");
  double lo = problem.lo, hi = problem.hi;
  double flo = problem.residual(lo);
  double fhi = problem.residual(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw std::invalid_argument("root solver: no sign change on the bracket");
  double mid = lo, fmid = flo;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    fmid = problem.residual(mid);
    if (std::fabs(fmid) < problem.tolerance && (hi - lo) < problem.tolerance) return mid;
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
    if (mid == lo || mid == hi) {
      // Bracket no longer representable; accept if the residual target holds.
      if (std::fabs(fmid) < problem.tolerance) return mid;
    }
  }
  if (std::fabs(fmid) < problem.tolerance && (hi - lo) < problem.tolerance) return mid;
  throw std::runtime_error("root solver: iteration cap reached before convergence");
}

bool residual_certificate(const std::function<double(double)>& residual, double root,
                          double residual_tol, double window) {
  if (std::fabs(residual(root)) >= residual_tol) return false;
  double a = residual(root - window);
  double b = residual(root + window);
  return (a < 0.0) != (b < 0.0);
}

int count_sign_changes(const std::function<double(double)>& residual, int grid) {
  // scan the standard bracket endpoints plus the interior grid, so roots
  // hugging 0 or 1 still register
  int changes = 0;
  double prev = residual(kBracketLo);
  for (int j = 1; j <= grid; ++j) {
    double p = j < grid ? static_cast<double>(j) / grid : kBracketHi;
    double cur = residual(p);
    if (prev != 0.0 && cur != 0.0 && (prev < 0.0) != (cur < 0.0)) ++changes;
    if (cur != 0.0) prev = cur;
  }
  return changes;
}

std::function<double(double)> theorem1_residual(int d) {
  if (d < 3) throw std::invalid_argument("theorem1: d must be >= 3");
  int e0 = d / 3, e1 = (d + 1) / 3, e2 = (d + 2) / 3;
  return [e0, e1, e2](double p) {
    double s = 1.0 - p;
    double a = std::pow(s, e0), b = std::pow(s, e1), c = std::pow(s, e2);
    return (1.0 - a) * (1.0 - b) * (1.0 - c) - (2.0 - (a + b + c));
  };
}

std::function<double(double)> crossover_residual(double base, double alpha) {
  return [base, alpha](double p) { return p - base * (p + std::pow(1.0 - p, alpha)); };
}

BoundResult theorem1_bound(int d) {
  if (d < 3) throw std::invalid_argument("theorem1_bound: d must be >= 3");
  double root = solve_certified(theorem1_residual(d), "theorem1_bound");
  return make_result(bond_model(d), root, Method::thm1, {});
}

BoundResult folded_even_bound(int d, const KnownConstant& base) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("folded_even_bound: d must be even, >= 2");
  if (base.model.d != 2) throw std::invalid_argument("folded_even_bound: base must be 2-dimensional");
  Method method;
  if (base.model == oriented_bond_model(2)) method = Method::thm2_1;
  else if (base.model == site_model(2)) method = Method::thm3_1;
  else if (base.model == oriented_site_model(2)) method = Method::thm4_1;
  else throw std::invalid_argument("folded_even_bound: no even-fold theorem for this family");
  double value = 1.0 - std::pow(1.0 - base.value, 2.0 / d);
  return make_result({d, base.model.kind, base.model.orientation}, value, method,
                     {{Method::registry, 2, base.value}});
}

BoundResult folded_div3_site_bound(int d) {
  if (d < 3 || d % 3 != 0)
    throw std::invalid_argument("folded_div3_site_bound: d must be divisible by 3");
  double value = 1.0 - std::pow(0.5, 3.0 / d);
  return make_result(site_model(d), value, Method::thm3_2, {{Method::registry, 3, 0.5}});
}

double highdim_constant(int d) {
  if (d < 4) throw std::invalid_argument("highdim_constant: d must be >= 4");
  double dd = d;
  double tail = std::pow(dd, 2.5) / std::pow(std::sqrt(2.0 * M_PI), dd - 1.0) *
                ((dd - 1.0) / (dd - 3.0)) * std::exp(1.0 / (12.0 * dd));
  return 1.0 + 8.0 / dd + tail;
}

BoundResult oriented_bond_highdim_bound(int d) {
  if (d < 4) throw std::invalid_argument("oriented_bond_highdim_bound: d must be >= 4");
  double dd = d;
  double value = 1.0 / dd + highdim_constant(d) / (dd * dd);
  return make_result(oriented_bond_model(d), value, Method::thm2_2, {});
}

BoundResult crossover_bound(const BoundResult& base, double alpha) {
  require_probability(base.value, "crossover_bound base");
  if (!(alpha > 1.0)) throw std::invalid_argument("crossover_bound: alpha must exceed 1");
  Method method;
  if (base.model.kind == Kind::bond && base.model.oriented()) method = Method::thm2_3;
  else if (base.model.kind == Kind::site && !base.model.oriented()) method = Method::thm3_3;
  else if (base.model.kind == Kind::site && base.model.oriented()) method = Method::thm4_2;
  else throw std::invalid_argument("crossover_bound: no crossover theorem for this family");
  double root = solve_certified(crossover_residual(base.value, alpha), "crossover_bound");
  if (!(root < base.value))
    throw std::runtime_error("crossover_bound: root is not below the base value");
  ModelSpec model{base.model.d + 1, base.model.kind, base.model.orientation};
  return make_result(model, root, method, base.provenance);
}

BoundResult crossover_bound(const KnownConstant& base, double alpha) {
  return crossover_bound(registry_bound(base.model, base.model.d), alpha);
}

BoundResult fold_general(const ModelSpec& family, int d, int k, const BoundResult& base) {
  if (k < 1 || d < k || d % k != 0) throw std::invalid_argument("fold_general: k must divide d");
  if (base.model.d != k) throw std::invalid_argument("fold_general: base must be a dimension-k bound");
  if (base.model.kind != family.kind || base.model.orientation != family.orientation)
    throw std::invalid_argument("fold_general: base family mismatch");
  if (k == d) return base;
  Method method;
  if (family == oriented_bond_model(d) && k == 2) method = Method::thm2_1;
  else if (family == site_model(d) && k == 2) method = Method::thm3_1;
  else if (family == site_model(d) && k == 3) method = Method::thm3_2;
  else if (family == oriented_site_model(d) && k == 2) method = Method::thm4_1;
  else throw std::invalid_argument("fold_general: no theorem item covers this fold");
  double value = 1.0 - std::pow(1.0 - base.value, static_cast<double>(k) / d);
  return make_result({d, family.kind, family.orientation}, value, method, base.provenance);
}

namespace {

double crossover_alpha(const ModelSpec& base_model) {
  int d = base_model.d;
  if (base_model.kind == Kind::site && !base_model.oriented())
    return (2.0 * d) / (2.0 * d - 1.0);
  return (d + 1.0) / d;
}

BoundResult crossover_from(const BoundResult& base) {
  return crossover_bound(base, crossover_alpha(base.model));
}

BoundResult best_oriented_bond(int d);
BoundResult best_site(int d);
BoundResult best_oriented_site(int d);

BoundResult min_over(std::vector<BoundResult> candidates) {
  if (candidates.empty()) throw std::logic_error("no applicable bound method");
  auto best = std::min_element(candidates.begin(), candidates.end(),
                               [](const BoundResult& a, const BoundResult& b) { return a.value < b.value; });
  return *best;
}

BoundResult best_oriented_bond(int d) {
  if (d == 3) return crossover_from(registry_bound(oriented_bond_model(2), 2));
  if (d == 4) return folded_even_bound(4, registry_constant(oriented_bond_model(2), 2));
  if (d == 5) return crossover_from(best_oriented_bond(4));
  if (d <= 9) return oriented_bond_highdim_bound(d);
  std::vector<BoundResult> cands;
  if (d % 2 == 0) cands.push_back(folded_even_bound(d, registry_constant(oriented_bond_model(2), 2)));
  cands.push_back(oriented_bond_highdim_bound(d));
  cands.push_back(crossover_from(best_oriented_bond(d - 1)));
  return min_over(std::move(cands));
}

BoundResult best_site(int d) {
  if (d == 3) return registry_bound(site_model(3), 3);
  if (d == 4 || d == 8) return folded_even_bound(d, registry_constant(site_model(2), 2));
  if (d == 6 || d == 9) return folded_div3_site_bound(d);
  if (d == 5 || d == 7) return crossover_from(best_site(d - 1));
  std::vector<BoundResult> cands;
  if (d % 2 == 0) cands.push_back(folded_even_bound(d, registry_constant(site_model(2), 2)));
  if (d % 3 == 0) cands.push_back(folded_div3_site_bound(d));
  cands.push_back(crossover_from(best_site(d - 1)));
  return min_over(std::move(cands));
}

BoundResult best_oriented_site(int d) {
  if (d % 2 == 0) {
    if (d <= 9) return folded_even_bound(d, registry_constant(oriented_site_model(2), 2));
    std::vector<BoundResult> cands;
    cands.push_back(folded_even_bound(d, registry_constant(oriented_site_model(2), 2)));
    cands.push_back(crossover_from(best_oriented_site(d - 1)));
    return min_over(std::move(cands));
  }
  if (d == 3) return crossover_from(registry_bound(oriented_site_model(2), 2));
  return crossover_from(best_oriented_site(d - 1));
}

}  // namespace

BoundResult best_bound(const ModelSpec& family, int d) {
  if (d < 3) throw std::invalid_argument("best_bound: d must be >= 3");
  if (family.kind == Kind::bond && !family.oriented()) return theorem1_bound(d);
  if (family.kind == Kind::bond) return best_oriented_bond(d);
  if (!family.oriented()) return best_site(d);
  return best_oriented_site(d);
}

std::vector<TableRow> generate_table(int d_min, int d_max) {
  if (d_min < 3 || d_min > d_max) throw std::invalid_argument("generate_table: invalid range");
  std::vector<TableRow> rows;
  rows.reserve(static_cast<size_t>(d_max - d_min + 1));
  for (int d = d_min; d <= d_max; ++d) {
    TableRow row;
    row.d = d;
    row.cells[0] = best_bound(bond_model(d), d);
    row.cells[1] = best_bound(oriented_bond_model(d), d);
    row.cells[2] = best_bound(site_model(d), d);
    row.cells[3] = best_bound(oriented_site_model(d), d);
    row.method_extended = d > 9;
    rows.push_back(std::move(row));
  }
  return rows;
}

const std::array<std::array<double, 4>, 7>& reference_table() {
  static const std::array<std::array<double, 4>, 7> table = {{
      {0.3473, 0.5680, 0.5000, 0.6422},
      {0.2788, 0.4227, 0.4344, 0.5000},
      {0.2284, 0.3926, 0.4156, 0.4615},
      {0.1922, 0.2734, 0.2929, 0.3701},
      {0.1682, 0.2028, 0.2866, 0.3533},
      {0.1486, 0.1627, 0.2479, 0.2929},
      {0.1326, 0.1371, 0.2063, 0.2844},
  }};
  return table;
}

}  // namespace bounds
}  // namespace perc
