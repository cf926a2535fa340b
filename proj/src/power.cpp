#include "copularank/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "copularank/divergence.hpp"
#include "copularank/parallel.hpp"

namespace copularank {

const char* to_string(TestKind kind) {
  switch (kind) {
    case TestKind::New: return "new";
    case TestKind::Deheuvels: return "deheuvels";
    case TestKind::Smart: return "smart";
  }
  return "unknown";
}

TestKind parse_test_kind(const std::string& text) {
  if (text == "new") return TestKind::New;
  if (text == "deheuvels") return TestKind::Deheuvels;
  if (text == "smart") return TestKind::Smart;
  throw std::invalid_argument("unknown test '" + text + "' (expected new, deheuvels or smart)");
}

namespace {

ThresholdKey plain_key(const std::string& test, std::size_t size, const ThresholdSettings& settings) {
  ThresholdKey key;
  key.test = test;
  key.sample_size = size;
  key.alpha = settings.alpha;
  key.reps = settings.reps;
  key.seed = settings.seed;
  return key;
}

template <typename Compute>
double cached(const ThresholdKey& key, const ThresholdSettings& settings, Compute compute) {
  if (settings.cache) {
    if (const auto hit = settings.cache->lookup(key)) return *hit;
  }
  const double value = compute();
  if (settings.cache) settings.cache->store(key, value);
  return value;
}

}  // namespace

ThresholdKey new_test_key(std::size_t size, int subsample_size, const GammaConfig& gamma,
                          const ThresholdSettings& settings) {
  ThresholdKey key = plain_key("new", size, settings);
  key.subsample_size = subsample_size;
  key.estimator = to_string(gamma.method);
  if (gamma.method == GammaMethod::Subsample) {
    GammaConfig sized = gamma;
    sized.subsample_size = subsample_size;
    key.num_subsamples = sized.effective_count();
  }
  return key;
}

std::vector<double> new_test_thresholds(std::size_t size, std::span<const int> subsample_sizes,
                                        const GammaConfig& gamma, const ThresholdSettings& settings) {
  std::vector<double> thresholds(subsample_sizes.size(), 0.0);
  std::vector<int> missing;
  std::vector<std::size_t> missing_at;
  for (std::size_t k = 0; k < subsample_sizes.size(); ++k) {
    const auto hit = settings.cache ? settings.cache->lookup(new_test_key(size, subsample_sizes[k], gamma, settings))
                                    : std::nullopt;
    if (hit) {
      thresholds[k] = *hit;
    } else {
      missing.push_back(subsample_sizes[k]);
      missing_at.push_back(k);
    }
  }
  if (!missing.empty()) {
    const auto computed = indep_thresholds(size, missing, gamma, settings.alpha, settings.reps, settings.seed);
    for (std::size_t j = 0; j < missing.size(); ++j) {
      thresholds[missing_at[j]] = computed[j];
      if (settings.cache) settings.cache->store(new_test_key(size, missing[j], gamma, settings), computed[j]);
    }
  }
  return thresholds;
}

double threshold_for(const TestSpec& test, DependenceKind kind, std::size_t size,
                     const ThresholdSettings& settings) {
  switch (test.kind) {
    case TestKind::New: {
      const int sizes[] = {test.gamma.subsample_size};
      return new_test_thresholds(size, sizes, test.gamma, settings).front();
    }
    case TestKind::Deheuvels:
      return cached(plain_key("deheuvels", size, settings), settings,
                    [&] { return deheuvels_threshold(size, settings.alpha, settings.reps, settings.seed); });
    case TestKind::Smart:
      if (kind != DependenceKind::Donut) return 1.0 - settings.alpha;
      return cached(plain_key("smart-donut", size, settings), settings,
                    [&] { return donut_ks_threshold(size, settings.alpha, settings.reps, settings.seed); });
  }
  throw std::logic_error("unhandled test kind");
}

double estimate_power(const TestSpec& test, const DependenceScenario& scenario, std::size_t size,
                      std::size_t reps, double alpha, double threshold, std::uint64_t seed) {
  if (reps == 0) throw std::invalid_argument("power estimation needs reps >= 1");
  std::vector<char> rejected(reps, 0);
  parallel_for(reps, [&](unsigned, std::size_t r) {
    RandomStream stream = derive_stream(seed, r);
    const BivariateSample sample = scenario_sample(scenario, size, stream);
    bool reject = false;
    switch (test.kind) {
      case TestKind::New:
        reject = indep_test(sample, test.gamma, derive_seed(seed, r), alpha, threshold).reject;
        break;
      case TestKind::Deheuvels:
        reject = deheuvels_test(sample, alpha, threshold).reject;
        break;
      case TestKind::Smart:
        reject = smart_test(scenario.kind, sample, alpha, threshold).reject;
        break;
    }
    rejected[r] = reject ? 1 : 0;
  });
  return static_cast<double>(std::count(rejected.begin(), rejected.end(), 1)) / static_cast<double>(reps);
}

SizeScan scan_sizes(const DependenceScenario& scenario, std::size_t size, std::span<const int> subsample_sizes,
                    const GammaConfig& gamma, std::span<const double> thresholds, double alpha, std::size_t reps,
                    std::uint64_t seed) {
  if (subsample_sizes.empty()) throw std::invalid_argument("size scan needs at least one subsample size");
  if (thresholds.size() != subsample_sizes.size()) {
    throw std::invalid_argument("size scan needs one threshold per subsample size");
  }
  for (const int s : subsample_sizes) {
    if (s < 2 || static_cast<std::size_t>(s) > size) throw std::invalid_argument("scanned sizes must lie in [2, N]");
  }
  if (reps == 0) throw std::invalid_argument("power estimation needs reps >= 1");
  const std::size_t count = subsample_sizes.size();
  std::vector<char> rejected(count * reps, 0);
  parallel_for(reps, [&](unsigned, std::size_t r) {
    RandomStream stream = derive_stream(seed, r);
    const BivariateSample sample = scenario_sample(scenario, size, stream);
    if (gamma.method == GammaMethod::Limit) {
      const QuadrantCounts quadrants(sample);
      for (std::size_t k = 0; k < count; ++k) {
        rejected[k * reps + r] = indep_statistic(quadrants.limit_gamma(subsample_sizes[k])) > thresholds[k];
      }
    } else {
      for (std::size_t k = 0; k < count; ++k) {
        GammaConfig sized = gamma;
        sized.subsample_size = subsample_sizes[k];
        rejected[k * reps + r] = indep_test(sample, sized, derive_seed(seed, r), alpha, thresholds[k]).reject;
      }
    }
  });

  SizeScan scan;
  scan.sizes.assign(subsample_sizes.begin(), subsample_sizes.end());
  scan.power.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto begin = rejected.begin() + static_cast<std::ptrdiff_t>(k * reps);
    scan.power[k] = static_cast<double>(std::count(begin, begin + static_cast<std::ptrdiff_t>(reps), 1)) /
                    static_cast<double>(reps);
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < count; ++k) {
    if (scan.power[k] > scan.power[best] ||
        (scan.power[k] == scan.power[best] && scan.sizes[k] < scan.sizes[best])) {
      best = k;
    }
  }
  scan.best_size = scan.sizes[best];
  scan.best_power = scan.power[best];
  return scan;
}

PowerReport::PowerReport(std::vector<int> sizes, std::vector<DependenceScenario> scenarios,
                         std::vector<double> power, std::size_t reps)
    : sizes_(std::move(sizes)), scenarios_(std::move(scenarios)), power_(std::move(power)), reps_(reps) {
  if (sizes_.empty() || scenarios_.empty()) throw std::invalid_argument("power report needs sizes and scenarios");
  if (power_.size() != sizes_.size() * scenarios_.size()) {
    throw std::invalid_argument("power matrix must have one entry per (size, scenario)");
  }
  for (const double p : power_) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("power entries must lie in [0,1]");
  }
  if (reps_ == 0) throw std::invalid_argument("power report needs reps >= 1");
}

double PowerReport::power(std::size_t size_index, std::size_t scenario_index) const {
  return power_.at(size_index * scenarios_.size() + scenario_index);
}

double PowerReport::mc_stderr(std::size_t size_index, std::size_t scenario_index) const {
  const double p = power(size_index, scenario_index);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps_));
}

std::size_t PowerReport::best_size_index(std::size_t scenario_index) const {
  std::size_t best = 0;
  for (std::size_t s = 1; s < sizes_.size(); ++s) {
    const double p = power(s, scenario_index);
    const double b = power(best, scenario_index);
    if (p > b || (p == b && sizes_[s] < sizes_[best])) best = s;
  }
  return best;
}

PowerReport power_report(std::span<const DependenceScenario> scenarios, std::size_t size,
                         std::span<const int> subsample_sizes, const GammaConfig& gamma,
                         std::span<const double> thresholds, double alpha, std::size_t reps, std::uint64_t seed) {
  const std::size_t columns = scenarios.size();
  std::vector<double> power(subsample_sizes.size() * columns);
  for (std::size_t d = 0; d < columns; ++d) {
    const SizeScan scan =
        scan_sizes(scenarios[d], size, subsample_sizes, gamma, thresholds, alpha, reps, derive_seed(seed, d));
    for (std::size_t k = 0; k < subsample_sizes.size(); ++k) power[k * columns + d] = scan.power[k];
  }
  return PowerReport({subsample_sizes.begin(), subsample_sizes.end()}, {scenarios.begin(), scenarios.end()},
                     std::move(power), reps);
}

int minimax_regret_size(const PowerReport& report) {
  const auto& sizes = report.sizes();
  const std::size_t columns = report.scenarios().size();
  std::vector<double> column_max(columns);
  for (std::size_t d = 0; d < columns; ++d) column_max[d] = report.power(report.best_size_index(d), d);

  std::size_t chosen = 0;
  double chosen_regret = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    double worst = 0.0;
    for (std::size_t d = 0; d < columns; ++d) worst = std::max(worst, column_max[d] - report.power(s, d));
    if (worst < chosen_regret || (worst == chosen_regret && sizes[s] < sizes[chosen])) {
      chosen = s;
      chosen_regret = worst;
    }
  }
  return sizes[chosen];
}

std::vector<int> default_size_range(std::size_t size) {
  const int upper = static_cast<int>(std::min<std::size_t>(21, size));
  std::vector<int> sizes;
  for (int s = 2; s <= upper; ++s) sizes.push_back(s);
  return sizes;
}

}  // namespace copularank
