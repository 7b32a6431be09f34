#pragma once

#include <cstdint>
#include <span>

namespace qit::stats {

// sqrt(p(1-p)/n) for a sampled proportion.
double binomial_std_error(double p_hat, std::int64_t n);

// sqrt((1 - E^2)/n) for a correlator estimated from n +/-1 products.
double correlator_std_error(double corr, std::int64_t n);

// Regularized upper incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);

// Upper-tail p-value of a chi-square statistic.
double chi_square_pvalue(double statistic, int dof);

// Pearson statistic against the uniform expectation over the cells.
double chi_square_uniform_statistic(std::span<const std::int64_t> counts);

// Frequency (monobit) test p-value over 0/1 bits.
double monobit_pvalue(std::span<const std::int8_t> bits);

// Runs test p-value over 0/1 bits; 0 when the frequency precondition fails.
double runs_pvalue(std::span<const std::int8_t> bits);

// Lag-1 autocorrelation of the +/-1 mapping of the bits.
double lag1_autocorrelation(std::span<const std::int8_t> bits);

}  // namespace qit::stats
