#include "psml/stats.hpp"

#include "psml/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace psml {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("sample_sd needs at least two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double sample_cv(std::span<const double> xs) {
  // Rescale by the largest value so tiny weights do not underflow when squared.
  const double top = *std::max_element(xs.begin(), xs.end());
  if (!(top > 0.0)) throw DomainError("sample_cv needs a positive mean");
  std::vector<double> scaled(xs.begin(), xs.end());
  for (double& x : scaled) x /= top;
  const double m = mean(scaled);
  if (!(m > 0.0)) throw DomainError("sample_cv needs a positive mean");
  return sample_sd(scaled) / m;
}

double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw DomainError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level outside [0,1]");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double log_sum_exp(std::span<const double> xs) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : xs) top = std::max(top, x);
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - top);
  return top + std::log(s);
}

}  // namespace psml
