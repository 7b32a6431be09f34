#include "qit/stats.hpp"

#include <algorithm>
#include <cmath>

#include "qit/error.hpp"

namespace qit::stats {

namespace {

// Series expansion of the regularized lower incomplete gamma P(a, x),
// accurate for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) via modified Lentz, accurate for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1 - a;
  double c = 1 / tiny;
  double d = 1 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double binomial_std_error(double p_hat, std::int64_t n) {
  if (n < 1) raise(errc::bad_value, "sample size must be positive");
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) raise(errc::bad_value, "frequency outside [0, 1]");
  return std::sqrt(p_hat * (1 - p_hat) / static_cast<double>(n));
}

double correlator_std_error(double corr, std::int64_t n) {
  if (n < 1) raise(errc::bad_value, "sample size must be positive");
  return std::sqrt(std::max(0.0, 1 - corr * corr) / static_cast<double>(n));
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0 || x < 0) raise(errc::bad_value, "gamma Q needs a > 0, x >= 0");
  if (x == 0) return 1;
  if (x < a + 1) return 1 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi_square_pvalue(double statistic, int dof) {
  if (dof < 1) raise(errc::bad_value, "dof must be positive");
  if (statistic < 0) raise(errc::bad_value, "chi-square statistic must be nonnegative");
  return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

double chi_square_uniform_statistic(std::span<const std::int64_t> counts) {
  if (counts.size() < 2) raise(errc::bad_length, "need at least two cells");
  std::int64_t total = 0;
  for (std::int64_t c : counts) {
    if (c < 0) raise(errc::bad_value, "negative count");
    total += c;
  }
  if (total == 0) raise(errc::bad_value, "no observations");
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0;
  for (std::int64_t c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

double monobit_pvalue(std::span<const std::int8_t> bits) {
  if (bits.empty()) raise(errc::bad_length, "no bits");
  std::int64_t sum = 0;
  for (std::int8_t b : bits) sum += b ? 1 : -1;
  const double s_obs =
      std::abs(static_cast<double>(sum)) / std::sqrt(static_cast<double>(bits.size()));
  return std::erfc(s_obs / std::sqrt(2.0));
}

double runs_pvalue(std::span<const std::int8_t> bits) {
  const auto n = static_cast<double>(bits.size());
  if (bits.size() < 2) raise(errc::bad_length, "need at least two bits");
  std::int64_t ones = 0;
  for (std::int8_t b : bits) ones += b ? 1 : 0;
  const double pi = static_cast<double>(ones) / n;
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) return 0.0;  // frequency precondition
  std::int64_t runs = 1;
  for (std::size_t i = 1; i < bits.size(); ++i)
    if (bits[i] != bits[i - 1]) ++runs;
  const double expected = 2.0 * n * pi * (1 - pi);
  return std::erfc(std::abs(static_cast<double>(runs) - expected) /
                   (2.0 * std::sqrt(2.0 * n) * pi * (1 - pi)));
}

double lag1_autocorrelation(std::span<const std::int8_t> bits) {
  if (bits.size() < 2) raise(errc::bad_length, "need at least two bits");
  double mean = 0;
  for (std::int8_t b : bits) mean += b ? 1.0 : -1.0;
  mean /= static_cast<double>(bits.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const double x = (bits[i] ? 1.0 : -1.0) - mean;
    den += x * x;
    if (i + 1 < bits.size()) {
      const double y = (bits[i + 1] ? 1.0 : -1.0) - mean;
      num += x * y;
    }
  }
  if (den == 0) return 0;
  return num / den;
}

}  // namespace qit::stats
