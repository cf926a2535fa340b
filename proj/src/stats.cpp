#include "copularank/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "copularank/copulas.hpp"

namespace copularank {

TestOutcome decide(double statistic, double threshold, double level) {
  TestOutcome outcome;
  outcome.statistic = statistic;
  outcome.threshold = threshold;
  outcome.reject = statistic > threshold;
  outcome.level = level;
  return outcome;
}

double upper_quantile(std::vector<double> values, double alpha) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  const auto count = static_cast<double>(values.size());
  // Guard against (1 - alpha) * K landing a hair above an integer.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * count - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("correlation needs paired data, N >= 2");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

PearsonTest pearson_test(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() < 3) throw std::invalid_argument("Pearson test needs N >= 3");
  const double r = pearson_correlation(xs, ys);
  const double dof = static_cast<double>(xs.size()) - 2.0;
  const double one_minus = std::max(1.0 - r * r, 1e-300);
  const double t = r * std::sqrt(dof / one_minus);
  const double p = 2.0 * student_cdf(-std::abs(t), dof);
  return {r, t, std::min(1.0, p)};
}

double ks_exponential_statistic(std::vector<double> values, double mean) {
  if (values.empty()) throw std::invalid_argument("KS statistic of an empty sample");
  if (!(mean > 0.0)) throw std::invalid_argument("exponential mean must be positive");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double distance = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = values[i] <= 0.0 ? 0.0 : -std::expm1(-values[i] / mean);
    distance = std::max({distance, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return distance;
}

}  // namespace copularank
