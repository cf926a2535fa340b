#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "copularank/estimator.hpp"
#include "copularank/indep.hpp"
#include "copularank/threshold_cache.hpp"

namespace copularank {

enum class TestKind { New, Deheuvels, Smart };

const char* to_string(TestKind kind);
TestKind parse_test_kind(const std::string& text);

struct TestSpec {
  TestKind kind = TestKind::New;
  GammaConfig gamma{};  // used by TestKind::New only
};

/// How null thresholds are simulated, and where they are cached.
struct ThresholdSettings {
  double alpha = 0.05;
  std::size_t reps = 3000;
  std::uint64_t seed = 0;
  ThresholdCache* cache = nullptr;  // optional
};

ThresholdKey new_test_key(std::size_t size, int subsample_size, const GammaConfig& gamma,
                          const ThresholdSettings& settings);

/// Rank-density test thresholds for each subsample size; sizes missing from
/// the cache are simulated together on shared null samples and stored.
std::vector<double> new_test_thresholds(std::size_t size, std::span<const int> subsample_sizes,
                                        const GammaConfig& gamma, const ThresholdSettings& settings);

/// Threshold `test` needs on scenarios of `kind` at sample size N. Pearson
/// forms of the smart test need none and get 1 - alpha.
double threshold_for(const TestSpec& test, DependenceKind kind, std::size_t size,
                     const ThresholdSettings& settings);

/// Fraction of `reps` scenario samples on which the test rejects. Replicate r
/// draws its sample from derive_stream(seed, r).
double estimate_power(const TestSpec& test, const DependenceScenario& scenario, std::size_t size,
                      std::size_t reps, double alpha, double threshold, std::uint64_t seed);

struct SizeScan {
  std::vector<int> sizes;
  std::vector<double> power;
  int best_size = 0;
  double best_power = 0.0;
};

/// Rank-density test power at each subsample size, on the same replicate
/// samples estimate_power would draw with this seed. Ties in the argmax go
/// to the smaller size.
SizeScan scan_sizes(const DependenceScenario& scenario, std::size_t size, std::span<const int> subsample_sizes,
                    const GammaConfig& gamma, std::span<const double> thresholds, double alpha, std::size_t reps,
                    std::uint64_t seed);

/// Rejection rates P(s, d) over subsample sizes s and scenarios d.
class PowerReport {
 public:
  PowerReport(std::vector<int> sizes, std::vector<DependenceScenario> scenarios, std::vector<double> power,
              std::size_t reps);

  const std::vector<int>& sizes() const noexcept { return sizes_; }
  const std::vector<DependenceScenario>& scenarios() const noexcept { return scenarios_; }
  std::size_t reps() const noexcept { return reps_; }

  double power(std::size_t size_index, std::size_t scenario_index) const;
  /// sqrt(P (1 - P) / reps)
  double mc_stderr(std::size_t size_index, std::size_t scenario_index) const;

  /// Size index with the largest power for a scenario (smallest size on ties).
  std::size_t best_size_index(std::size_t scenario_index) const;

 private:
  std::vector<int> sizes_;
  std::vector<DependenceScenario> scenarios_;
  std::vector<double> power_;  // row-major: sizes x scenarios
  std::size_t reps_;
};

/// Scenario d is scanned with seed derive_seed(seed, d).
PowerReport power_report(std::span<const DependenceScenario> scenarios, std::size_t size,
                         std::span<const int> subsample_sizes, const GammaConfig& gamma,
                         std::span<const double> thresholds, double alpha, std::size_t reps, std::uint64_t seed);

/// argmin_s max_d [max_s' P(s', d) - P(s, d)], smallest s on ties.
int minimax_regret_size(const PowerReport& report);

/// 2..min(21, N)
std::vector<int> default_size_range(std::size_t size);

}  // namespace copularank
