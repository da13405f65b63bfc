#include "perc/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace perc {

namespace {

constexpr double kZ95 = 1.959963984540054;

// Regularized lower incomplete gamma P(a,x) by series expansion (x < a+1).
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by Lentz continued fraction
// (x >= a+1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

Interval wilson_interval(int64_t hits, int64_t n) {
  if (n <= 0 || hits < 0 || hits > n) throw std::invalid_argument("wilson_interval: bad counts");
  double z = kZ95;
  double nn = static_cast<double>(n);
  double phat = static_cast<double>(hits) / nn;
  double z2 = z * z;
  double denom = 1.0 + z2 / nn;
  double center = (phat + z2 / (2.0 * nn)) / denom;
  double half = (z / denom) * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  Interval iv;
  iv.low = center - half;
  iv.high = center + half;
  if (iv.low < 0.0) iv.low = 0.0;
  if (iv.high > 1.0) iv.high = 1.0;
  if (hits == 0) iv.low = 0.0;
  if (hits == n) iv.high = 1.0;
  return iv;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double two_proportion_pvalue(int64_t x1, int64_t n1, int64_t x2, int64_t n2) {
  if (n1 <= 0 || n2 <= 0) throw std::invalid_argument("two_proportion_pvalue: empty sample");
  double p1 = static_cast<double>(x1) / static_cast<double>(n1);
  double p2 = static_cast<double>(x2) / static_cast<double>(n2);
  double pool = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
  double var = pool * (1.0 - pool) * (1.0 / n1 + 1.0 / n2);
  if (var <= 0.0) return 1.0;
  double z = (p1 - p2) / std::sqrt(var);
  return 2.0 * normal_sf(std::fabs(z));
}

double chi_square_tail(double x, int df) {
  if (df <= 0) throw std::invalid_argument("chi_square_tail: df must be positive");
  if (x <= 0.0) return 1.0;
  double a = 0.5 * df;
  double xx = 0.5 * x;
  if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
  return gamma_q_cf(a, xx);
}

double chi_square_homogeneity_pvalue(const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_homogeneity: size mismatch");
  double na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    na += static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]);
  }
  if (na <= 0 || nb <= 0) throw std::invalid_argument("chi_square_homogeneity: empty sample");
  double total = na + nb;
  double stat = 0.0;
  int bins = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double row = static_cast<double>(a[i] + b[i]);
    if (row == 0) continue;
    ++bins;
    double ea = row * na / total;
    double eb = row * nb / total;
    double da = static_cast<double>(a[i]) - ea;
    double db = static_cast<double>(b[i]) - eb;
    stat += da * da / ea + db * db / eb;
  }
  if (bins <= 1) return 1.0;
  return chi_square_tail(stat, bins - 1);
}

}  // namespace perc
