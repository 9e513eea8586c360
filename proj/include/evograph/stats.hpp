#ifndef EVOGRAPH_STATS_HPP
#define EVOGRAPH_STATS_HPP

#include <cstddef>
#include <utility>
#include <vector>

namespace evograph::stats {

// standard normal CDF
double normal_cdf(double x);

// inverse standard normal CDF (Acklam's rational approximation, refined with
// one Halley step; relative error well below 1e-12)
double normal_quantile(double p);

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_ci(long long successes, long long trials,
                                    double level);

// one-sided upper Wilson bound at the given confidence
double wilson_upper_bound(long long successes, long long trials,
                          double confidence);

// two-proportion pooled z statistic
double two_proportion_z(long long x1, long long n1, long long x2, long long n2);

// Spearman rank correlation; ties get midranks.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace evograph::stats

#endif
