#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace copularank {

/// Result of a hypothesis test. reject == (statistic > threshold).
struct TestOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;
  double level = 0.05;
  std::map<std::string, double> details;
};

TestOutcome decide(double statistic, double threshold, double level);

/// Empirical (1 - alpha) quantile: the order statistic of rank ceil((1 - alpha) K)
/// (1-based) among the K values.
double upper_quantile(std::vector<double> values, double alpha);

double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

struct PearsonTest {
  double r;
  double t;        // r sqrt((N-2)/(1-r^2))
  double p_value;  // two-sided, Student t with N-2 degrees of freedom
};

PearsonTest pearson_test(std::span<const double> xs, std::span<const double> ys);

/// Kolmogorov-Smirnov distance between the empirical CDF of `values` and the
/// exponential distribution with the given mean.
double ks_exponential_statistic(std::vector<double> values, double mean);

}  // namespace copularank
