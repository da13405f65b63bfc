#pragma once

#include <cstdint>
#include <vector>

namespace perc {

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval for a binomial proportion at 95% confidence.
Interval wilson_interval(int64_t hits, int64_t n);

// Upper tail of the standard normal, P(Z > z).
double normal_sf(double z);

// Two-sided p-value of the pooled two-sample proportion z-test. Returns 1
// when the pooled variance vanishes (both samples all-0 or all-1).
double two_proportion_pvalue(int64_t x1, int64_t n1, int64_t x2, int64_t n2);

// P(chi^2_df > x) via the regularized upper incomplete gamma function.
double chi_square_tail(double x, int df);

// Two-sample chi-square homogeneity test over categorical counts (same
// category space). Bins with zero pooled count are dropped. Returns the
// p-value; df = (#nonempty bins - 1).
double chi_square_homogeneity_pvalue(const std::vector<int64_t>& a, const std::vector<int64_t>& b);

}  // namespace perc
