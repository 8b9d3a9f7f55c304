#pragma once

#include <span>
#include <vector>

namespace psml {

double mean(std::span<const double> xs);

// Sample standard deviation with the (n - 1) denominator.
double sample_sd(std::span<const double> xs);

// Sample coefficient of variation sd / mean, (n - 1) denominator.
double sample_cv(std::span<const double> xs);

// Empirical quantile with linear interpolation between order statistics
// (Hyndman-Fan type 7). Invariant under permutation of `xs`.
double quantile(std::vector<double> xs, double p);

// log(sum(exp(xs))), stable for large magnitudes.
double log_sum_exp(std::span<const double> xs);

}  // namespace psml
