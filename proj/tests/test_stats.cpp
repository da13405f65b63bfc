#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "perc/stats.hpp"

using namespace perc;

TEST_SUITE_BEGIN("stats");

TEST_CASE("wilson interval brackets the estimate and stays in [0,1]") {
  for (int64_t hits : {0, 1, 50, 99, 100}) {
    Interval iv = wilson_interval(hits, 100);
    double phat = hits / 100.0;
    CHECK(iv.low >= 0.0);
    CHECK(iv.high <= 1.0);
    CHECK(iv.low <= phat + 1e-12);
    CHECK(iv.high >= phat - 1e-12);
  }
  CHECK(wilson_interval(0, 100).low == 0.0);
  CHECK(wilson_interval(100, 100).high == 1.0);
  CHECK(wilson_interval(1, 10000).low > 0.0);
  CHECK_THROWS_AS(wilson_interval(5, 0), std::invalid_argument);
}

TEST_CASE("normal tail at the acceptance thresholds") {
  CHECK(std::fabs(normal_sf(1.959963984540054) - 0.025) < 1e-9);
  CHECK(std::fabs(2 * normal_sf(3.7190164854557084) - 2e-4) < 1e-8);
}

TEST_CASE("two-proportion test degenerates gracefully") {
  CHECK(two_proportion_pvalue(0, 1000, 0, 1000) == 1.0);
  CHECK(two_proportion_pvalue(1000, 1000, 1000, 1000) == 1.0);
  CHECK(two_proportion_pvalue(500, 1000, 500, 1000) == 1.0);
  // strongly different proportions reject
  CHECK(two_proportion_pvalue(900, 1000, 500, 1000) < 1e-10);
  // identical draws do not
  CHECK(two_proportion_pvalue(480, 1000, 500, 1000) > 0.05);
}

TEST_CASE("chi-square tail matches reference quantiles") {
  CHECK(std::fabs(chi_square_tail(3.841458820694124, 1) - 0.05) < 1e-6);
  CHECK(std::fabs(chi_square_tail(18.307038053275146, 10) - 0.05) < 1e-6);
  CHECK(chi_square_tail(0.0, 3) == 1.0);
  CHECK(chi_square_tail(1000.0, 3) < 1e-12);
}

TEST_CASE("chi-square homogeneity accepts identical counts") {
  std::vector<int64_t> a{100, 200, 300}, b{100, 200, 300};
  CHECK(chi_square_homogeneity_pvalue(a, b) > 0.999);
  std::vector<int64_t> c{300, 200, 100};
  CHECK(chi_square_homogeneity_pvalue(a, c) < 1e-6);
}

TEST_SUITE_END();
