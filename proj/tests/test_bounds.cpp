#include <doctest.h>

#include <cmath>
#include <random>

#include "perc/bounds.hpp"

using namespace perc;
using namespace perc::bounds;

TEST_SUITE_BEGIN("bounds");

namespace {

// Independent oracle for the d=3 reduced equation p^3 - 3p + 1 = 0: dense
// grid scan to bracket the unique (0,1) root, then bisection of the cubic.
double cubic_root_oracle() {
  auto cubic = [](double p) { return p * p * p - 3.0 * p + 1.0; };
  double lo = 0.0, hi = 0.0;
  int crossings = 0;
  double prev = cubic(1e-6);
  for (int i = 2; i < 1000000; ++i) {
    double p = i * 1e-6;
    double cur = cubic(p);
    if ((prev < 0) != (cur < 0)) {
      ++crossings;
      lo = (i - 1) * 1e-6;
      hi = p;
    }
    prev = cur;
  }
  REQUIRE(crossings == 1);
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    if ((cubic(mid) < 0) == (cubic(lo) < 0)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("root solver: linear, cubic, and failure modes") {
  RootProblem linear{[](double p) { return p - 0.5; }, 1e-9, 1 - 1e-9, 1e-12};
  CHECK(std::fabs(solve_bracketed_root(linear) - 0.5) < 1e-12);

  RootProblem cubic{[](double p) { return p * p * p - 3 * p + 1; }, 1e-9, 1 - 1e-9, 1e-12};
  CHECK(std::fabs(solve_bracketed_root(cubic) - 0.3472963553338607) < 1e-11);

  RootProblem nosign{[](double p) { return p + 1.0; }, 1e-9, 1 - 1e-9, 1e-12};
  CHECK_THROWS_AS(solve_bracketed_root(nosign), std::invalid_argument);
}

TEST_CASE("theorem 1: d=3 reduces to the cubic") {
  BoundResult r = theorem1_bound(3);
  CHECK(r.rounded == doctest::Approx(0.3473).epsilon(1e-12));
  CHECK(std::fabs(r.value - cubic_root_oracle()) < 1e-10);
  CHECK(r.method == Method::thm1);
  CHECK(r.provenance.size() == 1);
  CHECK_THROWS_AS(theorem1_bound(2), std::invalid_argument);
}

TEST_CASE("theorem 1: frozen roots for d = 4..9") {
  const double expected[] = {0.27874433576265647, 0.22832540498332570, 0.19209923587971567,
                             0.16811498942314856, 0.14851265028350395, 0.13256152898259017};
  for (int d = 4; d <= 9; ++d)
    CHECK(std::fabs(theorem1_bound(d).value - expected[d - 4]) < 1e-11);
  // d=6 rounds to 0.1921 under the ceiling convention (the published table
  // prints 0.1922; the acceptance tolerance covers the difference)
  CHECK(theorem1_bound(6).rounded == doctest::Approx(0.1921).epsilon(1e-12));
}

TEST_CASE("even fold recovers the base at d=2 and the published cells") {
  const KnownConstant& liggett = registry_constant(oriented_bond_model(2), 2);
  BoundResult d2 = folded_even_bound(2, liggett);
  CHECK(d2.value == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  BoundResult d4 = folded_even_bound(4, liggett);
  CHECK(d4.rounded == doctest::Approx(0.4227).epsilon(1e-12));
  CHECK(d4.value == doctest::Approx(1.0 - std::pow(1.0 / 3.0, 0.5)).epsilon(1e-15));

  const KnownConstant& wierman = registry_constant(site_model(2), 2);
  CHECK(folded_even_bound(8, wierman).rounded == doctest::Approx(0.2479).epsilon(1e-12));

  CHECK_THROWS_AS(folded_even_bound(5, liggett), std::invalid_argument);
  KnownConstant bogus{bond_model(2), 0.5, "none"};
  CHECK_THROWS_AS(folded_even_bound(4, bogus), std::invalid_argument);
}

TEST_CASE("site fold by thirds") {
  CHECK(folded_div3_site_bound(3).value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(folded_div3_site_bound(6).rounded == doctest::Approx(0.2929).epsilon(1e-12));
  CHECK(folded_div3_site_bound(9).rounded == doctest::Approx(0.2063).epsilon(1e-12));
  CHECK_THROWS_AS(folded_div3_site_bound(4), std::invalid_argument);
}

TEST_CASE("high-dimension oriented bond expansion") {
  CHECK(oriented_bond_highdim_bound(6).rounded == doctest::Approx(0.2734).epsilon(1e-12));
  CHECK(oriented_bond_highdim_bound(9).rounded == doctest::Approx(0.1371).epsilon(1e-12));
  // d=4: the constant is ~9.22, so the bound exceeds 1/2 and never enters the table
  CHECK(highdim_constant(4) == doctest::Approx(9.2237).epsilon(1e-4));
  CHECK(oriented_bond_highdim_bound(4).value > 0.5);
  CHECK_THROWS_AS(oriented_bond_highdim_bound(3), std::invalid_argument);
}

TEST_CASE("crossover cells of the published table") {
  BoundResult ob3 = crossover_bound(registry_bound(oriented_bond_model(2), 2), 1.5);
  CHECK(ob3.rounded == doctest::Approx(0.5680).epsilon(1e-12));
  CHECK(std::fabs(ob3.value - 0.5679591996669042) < 1e-11);
  CHECK(ob3.model.d == 3);
  CHECK(ob3.provenance.size() == 2);

  BoundResult os3 = crossover_bound(registry_bound(oriented_site_model(2), 2), 1.5);
  CHECK(os3.rounded == doctest::Approx(0.6422).epsilon(1e-12));
  CHECK(std::fabs(os3.value - 0.6421645388178981) < 1e-11);

  // the registry-constant overload agrees
  BoundResult via_kc = crossover_bound(registry_constant(oriented_site_model(2), 2), 1.5);
  CHECK(via_kc.value == os3.value);
}

TEST_CASE("crossover near a base of 1 pushes the root toward 1") {
  BoundResult base;
  base.model = oriented_bond_model(2);
  base.value = 1.0 - 1e-6;
  base.rounded = round_up_4dp(base.value);
  base.method = Method::registry;
  base.provenance = {{Method::registry, 2, base.value}};
  BoundResult r = crossover_bound(base, 1.5);
  CHECK(r.value > 0.999);
  base.value = 1.0;
  CHECK_THROWS_AS(crossover_bound(base, 1.5), std::invalid_argument);
}

TEST_CASE("general fold: identity, equivalence, published cell") {
  BoundResult base = registry_bound(oriented_bond_model(2), 2);
  BoundResult same = fold_general(oriented_bond_model(2), 2, 2, base);
  CHECK(same.value == base.value);
  CHECK(same.method == base.method);

  BoundResult via_fold = fold_general(oriented_bond_model(4), 4, 2, base);
  BoundResult via_even = folded_even_bound(4, registry_constant(oriented_bond_model(2), 2));
  CHECK(via_fold.value == doctest::Approx(via_even.value).epsilon(1e-15));

  BoundResult site9 = fold_general(site_model(9), 9, 3, registry_bound(site_model(3), 3));
  CHECK(site9.rounded == doctest::Approx(0.2063).epsilon(1e-12));

  CHECK_THROWS_AS(fold_general(site_model(9), 9, 2, base), std::invalid_argument);
}

TEST_CASE("fold is monotone in the base value") {
  BoundResult lo = registry_bound(site_model(3), 3);
  for (double b = 0.1; b < 0.9; b += 0.1) {
    BoundResult b1 = lo, b2 = lo;
    b1.value = b;
    b2.value = b + 0.05;
    CHECK(fold_general(site_model(9), 9, 3, b1).value <
          fold_general(site_model(9), 9, 3, b2).value);
  }
}

TEST_CASE("best_bound follows the published recipe") {
  BoundResult site3 = best_bound(site_model(3), 3);
  CHECK(site3.method == Method::registry);
  CHECK(site3.rounded == doctest::Approx(0.5000).epsilon(1e-12));

  BoundResult ob5 = best_bound(oriented_bond_model(5), 5);
  CHECK(ob5.method == Method::thm2_3);
  CHECK(ob5.rounded == doctest::Approx(0.3926).epsilon(1e-12));
  REQUIRE(ob5.provenance.size() == 3);  // registry -> thm2.1(4) -> thm2.3(5)
  CHECK(ob5.provenance[1].method == Method::thm2_1);
  CHECK(ob5.provenance[1].d == 4);
  CHECK(ob5.provenance[1].value == doctest::Approx(0.4226497).epsilon(1e-6));

  BoundResult site7 = best_bound(site_model(7), 7);
  CHECK(site7.method == Method::thm3_3);
  CHECK(site7.rounded == doctest::Approx(0.2866).epsilon(1e-12));
  CHECK(site7.provenance[site7.provenance.size() - 2].value ==
        doctest::Approx(0.2928932188134525).epsilon(1e-12));

  CHECK_THROWS_AS(best_bound(site_model(2), 2), std::invalid_argument);
}

TEST_CASE("table rows 3..9 reproduce the published cells") {
  auto rows = generate_table(3, 9);
  REQUIRE(rows.size() == 7);
  const auto& ref = reference_table();
  int exact = 0;
  for (size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < 4; ++c) {
      double ours = rows[r].cells[static_cast<size_t>(c)].rounded;
      double paper = ref[r][static_cast<size_t>(c)];
      CHECK(std::fabs(ours - paper) <= 2e-4 + 1e-12);
      if (std::fabs(ours - paper) < 1e-9) ++exact;
    }
    CHECK_FALSE(rows[r].method_extended);
  }
  CHECK(exact >= 24);
}

TEST_CASE("table shapes and the extended rows") {
  CHECK(generate_table(3, 3).size() == 1);
  auto rows = generate_table(3, 12);
  REQUIRE(rows.size() == 10);
  CHECK(rows[7].method_extended);  // d=10
  CHECK(rows[9].method_extended);  // d=12
  CHECK_THROWS_AS(generate_table(2, 5), std::invalid_argument);
  CHECK_THROWS_AS(generate_table(5, 4), std::invalid_argument);
}

TEST_CASE("bounds decrease strictly in the dimension, 3..9") {
  auto rows = generate_table(3, 9);
  for (int c = 0; c < 4; ++c)
    for (size_t r = 0; r + 1 < rows.size(); ++r)
      CHECK(rows[r].cells[static_cast<size_t>(c)].value >
            rows[r + 1].cells[static_cast<size_t>(c)].value);
}

TEST_CASE("crossover contracts: root strictly below the base") {
  for (double alpha : {1.5, 1.25, 12.0 / 11.0, 8.0 / 7.0}) {
    for (int i = 0; i < 50; ++i) {
      double b = 0.05 + 0.9 * (i + 0.5) / 50.0;
      double root = solve_bracketed_root({crossover_residual(b, alpha), 1e-9, 1 - 1e-9, 1e-12});
      CHECK(root < b);
    }
  }
}

TEST_CASE("residual certificates hold for every solved cell") {
  for (int d = 3; d <= 12; ++d) {
    auto res = theorem1_residual(d);
    double root = theorem1_bound(d).value;
    CHECK(residual_certificate(res, root));
    CHECK(count_sign_changes(res) == 1);
  }
  auto res = crossover_residual(2.0 / 3.0, 1.5);
  double root = crossover_bound(registry_bound(oriented_bond_model(2), 2), 1.5).value;
  CHECK(residual_certificate(res, root));
}

TEST_CASE("rounding up keeps printed values valid upper bounds") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> unif(1e-6, 1 - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    double v = unif(gen);
    double r = round_up_4dp(v);
    CHECK(r >= v);
    CHECK(r - v < 1e-4);
  }
  CHECK(round_up_4dp(0.5) == 0.5);
  CHECK(round_up_4dp(2.0 / 3.0) == doctest::Approx(0.6667).epsilon(1e-12));
}

TEST_CASE("registry holds exactly the four imported constants") {
  const auto& regs = known_constants();
  CHECK(regs.size() == 4);
  CHECK(registry_constant(oriented_bond_model(2), 2).value == doctest::Approx(2.0 / 3.0));
  CHECK(registry_constant(site_model(2), 2).value == doctest::Approx(0.68));
  CHECK(registry_constant(site_model(3), 3).value == doctest::Approx(0.5));
  CHECK(registry_constant(oriented_site_model(2), 2).value == doctest::Approx(0.75));
  CHECK_THROWS_AS(registry_constant(bond_model(2), 2), std::invalid_argument);
}

TEST_CASE("every table value lies strictly inside (0,1)") {
  for (const auto& row : generate_table(3, 14))
    for (const auto& cell : row.cells) {
      CHECK(cell.value > 0.0);
      CHECK(cell.value < 1.0);
      CHECK(cell.rounded >= cell.value);
    }
}

TEST_SUITE_END();
