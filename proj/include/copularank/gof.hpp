#pragma once

#include <cstddef>
#include <cstdint>

#include "copularank/copulas.hpp"
#include "copularank/density.hpp"
#include "copularank/estimator.hpp"
#include "copularank/stats.hpp"

namespace copularank {

struct GofConfig {
  GammaConfig gamma{};
  std::size_t reference_multiplier = 1000;  // reference sample holds multiplier * N draws
  std::size_t null_replicates = 500;        // K
  double alpha = 0.05;
  std::uint64_t seed = 0;
  bool refit_null = false;      // re-estimate theta on every null sample (parametric bootstrap)
  double smoothing_weight = 0;  // 0 selects n^2 / rank points of the reference

  /// Throws std::invalid_argument unless alpha in (0,1), K >= 100, multiplier >= 100.
  void validate() const;
};

/// Rank density of a reference_multiplier * N sample drawn from `model`,
/// smoothed to strict positivity.
DiscreteCopulaDensity reference_density(const CopulaModel& model, std::size_t size, const GofConfig& config,
                                        std::uint64_t seed);

/// kullback(rank density of sample, reference).
double gof_statistic(const BivariateSample& sample, const DiscreteCopulaDensity& reference,
                     const GofConfig& config, std::uint64_t seed);

/// Goodness of fit to the likeliest Frank copula:
///   1. fit theta by frank_mle;
///   2. build the reference density from the fitted copula;
///   3. simulate K samples of size N from it and take their distances to the reference;
///   4. reject when the sample's own distance exceeds the (1 - alpha) quantile.
/// details carries theta_hat and the reference sample size.
TestOutcome gof_test(const BivariateSample& sample, const GofConfig& config);

}  // namespace copularank
