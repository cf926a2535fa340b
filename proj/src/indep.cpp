#include "copularank/indep.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "copularank/copulas.hpp"
#include "copularank/divergence.hpp"
#include "copularank/parallel.hpp"

namespace copularank {

const char* to_string(DependenceKind kind) {
  switch (kind) {
    case DependenceKind::Linear: return "linear";
    case DependenceKind::Quadratic: return "quadratic";
    case DependenceKind::Donut: return "donut";
    case DependenceKind::Butterfly: return "butterfly";
  }
  return "unknown";
}

DependenceKind parse_dependence_kind(const std::string& text) {
  if (text == "linear") return DependenceKind::Linear;
  if (text == "quadratic") return DependenceKind::Quadratic;
  if (text == "donut") return DependenceKind::Donut;
  if (text == "butterfly") return DependenceKind::Butterfly;
  throw std::invalid_argument("unknown dependence kind '" + text + "'");
}

std::string describe(const DependenceScenario& scenario) {
  std::ostringstream out;
  out << to_string(scenario.kind) << "(a=" << scenario.amplitude << ")";
  return out.str();
}

BivariateSample scenario_sample(const DependenceScenario& scenario, std::size_t size, RandomStream& stream) {
  if (!(scenario.amplitude >= 0.0)) throw std::invalid_argument("scenario amplitude must be >= 0");
  if (size < 2) throw std::invalid_argument("scenario samples need N >= 2");
  const double a = scenario.amplitude;
  std::vector<double> xs(size), ys(size);
  for (std::size_t i = 0; i < size; ++i) {
    switch (scenario.kind) {
      case DependenceKind::Linear: {
        const double x = stream.standard_normal();
        xs[i] = x;
        ys[i] = a * x + stream.standard_normal();
        break;
      }
      case DependenceKind::Quadratic: {
        const double x = stream.standard_normal();
        xs[i] = x;
        ys[i] = a * x * x + stream.standard_normal();
        break;
      }
      case DependenceKind::Donut: {
        const double angle = 2.0 * std::numbers::pi * stream.uniform01();
        xs[i] = a * std::cos(angle) + stream.standard_normal();
        ys[i] = a * std::sin(angle) + stream.standard_normal();
        break;
      }
      case DependenceKind::Butterfly: {
        const double x = stream.standard_normal();
        xs[i] = x;
        ys[i] = (1.0 + a * std::abs(x)) * stream.standard_normal();
        break;
      }
    }
  }
  return BivariateSample(std::move(xs), std::move(ys));
}

std::vector<double> indep_thresholds(std::size_t size, std::span<const int> subsample_sizes,
                                     const GammaConfig& config, double alpha, std::size_t reps,
                                     std::uint64_t seed) {
  if (reps == 0) throw std::invalid_argument("threshold simulation needs reps >= 1");
  const std::size_t sizes = subsample_sizes.size();
  std::vector<double> stats(sizes * reps);
  parallel_for(reps, [&](unsigned, std::size_t r) {
    RandomStream stream = derive_stream(seed, r);
    const BivariateSample null_sample = independence_sample(size, stream);
    const std::uint64_t estimator_seed = derive_seed(seed, r);
    if (config.method == GammaMethod::Limit) {
      const QuadrantCounts quadrants(null_sample);
      for (std::size_t k = 0; k < sizes; ++k) {
        stats[k * reps + r] = indep_statistic(quadrants.limit_gamma(subsample_sizes[k]));
      }
    } else {
      for (std::size_t k = 0; k < sizes; ++k) {
        GammaConfig sized = config;
        sized.subsample_size = subsample_sizes[k];
        stats[k * reps + r] = indep_statistic(gamma_density(null_sample, sized, estimator_seed).density);
      }
    }
  });
  std::vector<double> thresholds(sizes);
  for (std::size_t k = 0; k < sizes; ++k) {
    thresholds[k] = upper_quantile({stats.begin() + static_cast<std::ptrdiff_t>(k * reps),
                                    stats.begin() + static_cast<std::ptrdiff_t>((k + 1) * reps)},
                                   alpha);
  }
  return thresholds;
}

double indep_threshold(std::size_t size, const GammaConfig& config, double alpha, std::size_t reps,
                       std::uint64_t seed) {
  const int sizes[] = {config.subsample_size};
  return indep_thresholds(size, sizes, config, alpha, reps, seed).front();
}

TestOutcome indep_test(const BivariateSample& sample, const GammaConfig& config, std::uint64_t seed,
                       double alpha, double threshold) {
  const GammaEstimate estimate = gamma_density(sample, config, seed);
  TestOutcome outcome = decide(indep_statistic(estimate.density), threshold, alpha);
  outcome.details["subsample_size"] = config.subsample_size;
  outcome.details["discarded_subsamples"] = static_cast<double>(estimate.discarded);
  return outcome;
}

double deheuvels_statistic(const BivariateSample& sample) {
  const JointRanks ranks = compute_ranks(sample);
  const std::size_t size = ranks.size();
  const auto n = static_cast<double>(size);
  // D(r, s) = int_0^1 phi_r(u) phi_s(u) du, where phi_r(u) = 1{r/(N+1) <= u}
  // minus the empirical margin at u. Both coordinates hold the ranks 1..N, so
  // one table serves for both.
  std::vector<double> kernel(size * size);
  for (std::size_t a = 1; a <= size; ++a) {
    for (std::size_t b = 1; b <= size; ++b) {
      const double ra = static_cast<double>(a), rb = static_cast<double>(b);
      kernel[(a - 1) * size + (b - 1)] = (2 * n + 1) / (6 * n) + ra * (ra - 1) / (2 * n * (n + 1)) +
                                         rb * (rb - 1) / (2 * n * (n + 1)) - std::max(ra, rb) / (n + 1);
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double* row_r = &kernel[(ranks.r[i] - 1) * size];
    const double* row_s = &kernel[(ranks.s[i] - 1) * size];
    double inner = 0.0;
    for (std::size_t k = 0; k < size; ++k) inner += row_r[ranks.r[k] - 1] * row_s[ranks.s[k] - 1];
    total += inner;
  }
  return std::max(0.0, total / n);
}

double deheuvels_threshold(std::size_t size, double alpha, std::size_t reps, std::uint64_t seed) {
  std::vector<double> stats(reps);
  parallel_for(reps, [&](unsigned, std::size_t r) {
    RandomStream stream = derive_stream(seed, r);
    stats[r] = deheuvels_statistic(independence_sample(size, stream));
  });
  return upper_quantile(std::move(stats), alpha);
}

TestOutcome deheuvels_test(const BivariateSample& sample, double alpha, double threshold) {
  return decide(deheuvels_statistic(sample), threshold, alpha);
}

double donut_ks_statistic(const BivariateSample& sample) {
  std::vector<double> radii(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    radii[i] = sample.xs()[i] * sample.xs()[i] + sample.ys()[i] * sample.ys()[i];
  }
  return ks_exponential_statistic(std::move(radii), 2.0);
}

double donut_ks_threshold(std::size_t size, double alpha, std::size_t reps, std::uint64_t seed) {
  std::vector<double> stats(reps);
  parallel_for(reps, [&](unsigned, std::size_t r) {
    RandomStream stream = derive_stream(seed, r);
    stats[r] = donut_ks_statistic(scenario_sample({DependenceKind::Donut, 0.0}, size, stream));
  });
  return upper_quantile(std::move(stats), alpha);
}

TestOutcome smart_test(DependenceKind kind, const BivariateSample& sample, double alpha, double ks_threshold) {
  if (kind == DependenceKind::Donut) {
    if (!(ks_threshold > 0.0)) throw std::invalid_argument("donut smart test needs a simulated KS threshold");
    return decide(donut_ks_statistic(sample), ks_threshold, alpha);
  }
  std::vector<double> xs(sample.xs().begin(), sample.xs().end());
  std::vector<double> ys(sample.ys().begin(), sample.ys().end());
  if (kind == DependenceKind::Quadratic) {
    for (double& x : xs) x = x * x;
  } else if (kind == DependenceKind::Butterfly) {
    for (double& x : xs) x = std::abs(x);
    for (double& y : ys) y = std::abs(y);
  }
  const PearsonTest pearson = pearson_test(xs, ys);
  TestOutcome outcome = decide(1.0 - pearson.p_value, 1.0 - alpha, alpha);
  outcome.details["r"] = pearson.r;
  outcome.details["t"] = pearson.t;
  outcome.details["p_value"] = pearson.p_value;
  return outcome;
}

}  // namespace copularank
