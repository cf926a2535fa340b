#include "copularank/gof.hpp"

#include <stdexcept>
#include <vector>

#include "copularank/divergence.hpp"
#include "copularank/parallel.hpp"

namespace copularank {
namespace {

// Stream layout of one test.
enum StreamTag : std::uint64_t { kReference = 0, kSampleSide = 1, kNull = 2 };

}  // namespace

void GofConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (null_replicates < 100) throw std::invalid_argument("null replicates K must be >= 100");
  if (reference_multiplier < 100) throw std::invalid_argument("reference multiplier must be >= 100");
  if (smoothing_weight < 0.0) throw std::invalid_argument("smoothing weight must be >= 0");
}

DiscreteCopulaDensity reference_density(const CopulaModel& model, std::size_t size, const GofConfig& config,
                                        std::uint64_t seed) {
  validate_model(model);
  RandomStream stream = derive_stream(seed, 0);
  const BivariateSample big = sample_copula(model, config.reference_multiplier * size, stream);
  const GammaEstimate estimate = gamma_density(big, config.gamma, derive_seed(seed, 1));
  const double weight = config.smoothing_weight > 0.0
                            ? config.smoothing_weight
                            : default_smoothing_weight(config.gamma.subsample_size, estimate.rank_points);
  return smooth(estimate.density, weight);
}

double gof_statistic(const BivariateSample& sample, const DiscreteCopulaDensity& reference,
                     const GofConfig& config, std::uint64_t seed) {
  return kullback(gamma_density(sample, config.gamma, seed).density, reference);
}

TestOutcome gof_test(const BivariateSample& sample, const GofConfig& config) {
  config.validate();
  if (sample.size() < 10) throw std::invalid_argument("goodness-of-fit test needs N >= 10");
  const std::size_t size = sample.size();
  const FrankFit fit = frank_mle(sample);
  const CopulaModel lfc = FrankCopula{fit.theta};

  const DiscreteCopulaDensity reference =
      reference_density(lfc, size, config, derive_seed(config.seed, kReference));
  const double statistic = gof_statistic(sample, reference, config, derive_seed(config.seed, kSampleSide));

  const std::uint64_t null_seed = derive_seed(config.seed, kNull);
  std::vector<double> null_stats(config.null_replicates);
  parallel_for(config.null_replicates, [&](unsigned, std::size_t r) {
    RandomStream stream = derive_stream(null_seed, r);
    const BivariateSample null_sample = sample_copula(lfc, size, stream);
    const std::uint64_t replicate_seed = derive_seed(null_seed, r);
    if (!config.refit_null) {
      null_stats[r] = gof_statistic(null_sample, reference, config, replicate_seed);
      return;
    }
    const FrankFit refit = frank_mle(null_sample);
    const DiscreteCopulaDensity own_reference =
        reference_density(FrankCopula{refit.theta}, size, config, derive_seed(replicate_seed, kReference));
    null_stats[r] = gof_statistic(null_sample, own_reference, config, derive_seed(replicate_seed, kSampleSide));
  });

  TestOutcome outcome = decide(statistic, upper_quantile(std::move(null_stats), config.alpha), config.alpha);
  outcome.details["theta_hat"] = fit.theta;
  outcome.details["reference_size"] = static_cast<double>(config.reference_multiplier * size);
  outcome.details["null_replicates"] = static_cast<double>(config.null_replicates);
  outcome.details["subsample_size"] = config.gamma.subsample_size;
  return outcome;
}

}  // namespace copularank
