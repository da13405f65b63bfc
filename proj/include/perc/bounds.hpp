#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "perc/model.hpp"

namespace perc {
namespace bounds {

// Method that produced a bound. The thmX_Y tags follow the theorem items:
// thm1 non-oriented bond; thm2_* oriented bond (even fold, high-d expansion,
// dimensional crossover); thm3_* non-oriented site (even fold, /3 fold,
// crossover); thm4_* oriented site (even fold, crossover); registry for an
// imported base constant.
enum class Method {
  thm1,
  thm2_1,
  thm2_2,
  thm2_3,
  thm3_1,
  thm3_2,
  thm3_3,
  thm4_1,
  thm4_2,
  registry,
};

std::string method_name(Method m);

struct ProvenanceEntry {
  Method method;
  int d;
  double value;
};

// A computed upper bound on a critical probability, with the chain of base
// bounds it was derived from. `rounded` is `value` rounded up at the fourth
// decimal so the printed number stays a valid upper bound.
struct BoundResult {
  ModelSpec model;
  double value = 0.0;
  double rounded = 0.0;
  Method method = Method::registry;
  std::vector<ProvenanceEntry> provenance;
};

// An imported base bound (registry input).
struct KnownConstant {
  ModelSpec model;
  double value;
  std::string source_tag;
};

// The four registry entries: oriented bond d=2 (2/3), non-oriented site d=2
// (0.68), non-oriented site d=3 (1/2), oriented site d=2 (3/4).
const std::array<KnownConstant, 4>& known_constants();
const KnownConstant& registry_constant(const ModelSpec& family, int d);
BoundResult registry_bound(const ModelSpec& family, int d);

double round_up_4dp(double v);

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

struct RootProblem {
  std::function<double(double)> residual;
  double lo = 0.0;
  double hi = 1.0;
  double tolerance = 1e-12;
};

// Bisection to |residual| < tolerance and bracket width < tolerance, at most
// 200 iterations. Throws if the bracket carries no sign change or the
// iteration cap is reached.
double solve_bracketed_root(const RootProblem& problem);

// Certificate helpers used by the tests and the acceptance suite.
bool residual_certificate(const std::function<double(double)>& residual, double root,
                          double residual_tol = 1e-12, double window = 1e-10);
// Scans (0,1) on a 1000-point grid and counts sign changes of the residual.
int count_sign_changes(const std::function<double(double)>& residual, int grid = 1000);

// Residual of the theorem-1 implicit equation for p*(d).
std::function<double(double)> theorem1_residual(int d);
// Residual of the crossover fixed-point equation p = base*(p + (1-p)^alpha).
std::function<double(double)> crossover_residual(double base, double alpha);

// ---------------------------------------------------------------------------
// Bound formulas
// ---------------------------------------------------------------------------

// Non-oriented bond bound p*(d): unique root in (0,1) of
//   prod_{i=0..2} (1 - (1-p)^{floor((d+i)/3)}) = 2 - sum_{i=0..2} (1-p)^{floor((d+i)/3)}.
BoundResult theorem1_bound(int d);

// Even-dimension fold: value = 1 - (1 - base.value)^{2/d}; base must be the
// matching family's 2-dimensional registry constant.
BoundResult folded_even_bound(int d, const KnownConstant& base);

// Non-oriented site, d divisible by 3: value = 1 - 0.5^{3/d}.
BoundResult folded_div3_site_bound(int d);

// Oriented bond, d >= 4: value = 1/d + C_d/d^2 with
//   C_d = 1 + 8/d + d^{5/2} / (sqrt(2*pi))^{d-1} * (d-1)/(d-3) * e^{1/(12d)}.
BoundResult oriented_bond_highdim_bound(int d);
double highdim_constant(int d);  // C_d

// Crossover to dimension base.d + 1: unique root of p = base*(p + (1-p)^alpha)
// with alpha = (d+1)/d (oriented families) or 2d/(2d-1) (non-oriented site),
// d the base dimension.
BoundResult crossover_bound(const BoundResult& base, double alpha);
BoundResult crossover_bound(const KnownConstant& base, double alpha);

// General dimension fold d -> k (k | d): value = 1 - (1 - base.value)^{k/d}.
// base must be a bound for dimension k of the same family. Only folds backed
// by a theorem item (or the identity k = d) are accepted.
BoundResult fold_general(const ModelSpec& family, int d, int k, const BoundResult& base);

// The per-family recipe behind the published table; for d > 9 the minimum
// over all applicable methods.
BoundResult best_bound(const ModelSpec& family, int d);

struct TableRow {
  int d;
  std::array<BoundResult, 4> cells;  // bond, oriented bond, site, oriented site
  bool method_extended = false;      // true for d > 9 (minimum over methods)
};

std::vector<TableRow> generate_table(int d_min, int d_max);

// The published reference table (rows d=3..9, four columns, four decimals).
const std::array<std::array<double, 4>, 7>& reference_table();

}  // namespace bounds
}  // namespace perc
