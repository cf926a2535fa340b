#include <cmath>
#include <filesystem>
#include <fstream>

#include "copularank/power.hpp"
#include "copularank/threshold_cache.hpp"
#include "doctest.h"

using namespace copularank;

namespace {

PowerReport report_of(std::vector<int> sizes, std::size_t columns, std::vector<double> power) {
  std::vector<DependenceScenario> scenarios(columns);
  for (std::size_t d = 0; d < columns; ++d) scenarios[d] = {DependenceKind::Linear, 0.1 * static_cast<double>(d)};
  return {std::move(sizes), std::move(scenarios), std::move(power), 1000};
}

std::filesystem::path scratch_file(const std::string& name) {
  const auto path = std::filesystem::temp_directory_path() / ("copularank_test_power_" + name);
  std::filesystem::remove(path);
  return path;
}

}  // namespace

TEST_CASE("minimax regret on the hand-computed example") {
  // rows = sizes, columns = scenarios; worst regrets 0.8, 0.4, 0.8
  const PowerReport report = report_of({3, 5, 7}, 2, {0.9, 0.1, 0.5, 0.5, 0.1, 0.9});
  CHECK(minimax_regret_size(report) == 5);
}

TEST_CASE("minimax regret with one scenario is the power-optimal size") {
  const PowerReport report = report_of({2, 3, 4, 5}, 1, {0.2, 0.6, 0.6, 0.4});
  CHECK(minimax_regret_size(report) == 3);
  CHECK(report.best_size_index(0) == 1);
}

TEST_CASE("minimax regret ignores column shifts and stays in range") {
  RandomStream stream(1, 0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t rows = 1 + stream.below(8), columns = 1 + stream.below(5);
    std::vector<int> sizes(rows);
    for (std::size_t s = 0; s < rows; ++s) sizes[s] = 2 + static_cast<int>(s);
    std::vector<double> power(rows * columns), shifted(rows * columns);
    std::vector<double> shift(columns);
    for (double& c : shift) c = static_cast<double>(stream.below(9)) / 32.0;
    for (std::size_t i = 0; i < power.size(); ++i) {
      power[i] = static_cast<double>(stream.below(17)) / 32.0;  // exact binary fractions
      shifted[i] = power[i] + shift[i % columns];
    }
    const int chosen = minimax_regret_size(report_of(sizes, columns, power));
    CHECK(chosen == minimax_regret_size(report_of(sizes, columns, shifted)));
    CHECK(chosen >= sizes.front());
    CHECK(chosen <= sizes.back());
  }
}

TEST_CASE("minimax regret ties go to the smaller size") {
  CHECK(minimax_regret_size(report_of({4, 9}, 2, {0.5, 0.5, 0.5, 0.5})) == 4);
  CHECK(minimax_regret_size(report_of({4, 9}, 2, {0.3, 0.5, 0.5, 0.3})) == 4);
}

TEST_CASE("power report checks and error bars") {
  const PowerReport report = report_of({2, 3}, 1, {0.5, 0.1});
  CHECK(report.mc_stderr(0, 0) == doctest::Approx(std::sqrt(0.25 / 1000)));
  CHECK(report.mc_stderr(1, 0) == doctest::Approx(std::sqrt(0.09 / 1000)));
  CHECK_THROWS_AS(report_of({2}, 1, {1.5}), std::invalid_argument);
  CHECK_THROWS_AS(report_of({2, 3}, 1, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(report_of({}, 1, {}), std::invalid_argument);
}

TEST_CASE("default size range") {
  CHECK(default_size_range(30) == std::vector<int>{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21});
  CHECK(default_size_range(300).back() == 21);
  CHECK(default_size_range(5) == std::vector<int>{2, 3, 4, 5});
}

TEST_CASE("test kind names") {
  for (const auto kind : {TestKind::New, TestKind::Deheuvels, TestKind::Smart})
    CHECK(parse_test_kind(to_string(kind)) == kind);
  CHECK_THROWS_AS(parse_test_kind("oracle"), std::invalid_argument);
}

TEST_CASE("power is deterministic and calibrated at zero amplitude") {
  const ThresholdSettings settings{0.05, 3000, 2, nullptr};
  const TestSpec spec{TestKind::New, {8, 0, GammaMethod::Limit}};
  const double threshold = threshold_for(spec, DependenceKind::Linear, 30, settings);
  const double a = estimate_power(spec, {DependenceKind::Quadratic, 0.0}, 30, 1000, 0.05, threshold, 3);
  const double b = estimate_power(spec, {DependenceKind::Quadratic, 0.0}, 30, 1000, 0.05, threshold, 3);
  CHECK(a == b);
  CHECK(std::abs(a - 0.05) <= 0.02);

  const TestSpec deheuvels{TestKind::Deheuvels, {}};
  const double dt = threshold_for(deheuvels, DependenceKind::Linear, 30, settings);
  CHECK(std::abs(estimate_power(deheuvels, {DependenceKind::Butterfly, 0.0}, 30, 1000, 0.05, dt, 4) - 0.05) <= 0.02);
}

TEST_CASE("smart Linear test reaches its design power") {
  // The amplitudes were chosen so that the Pearson test has power 0.5 and 0.9.
  const ThresholdSettings settings{0.05, 3000, 5, nullptr};
  const TestSpec smart{TestKind::Smart, {}};
  const double threshold = threshold_for(smart, DependenceKind::Linear, 30, settings);
  CHECK(threshold == doctest::Approx(0.95));
  const double half = estimate_power(smart, {DependenceKind::Linear, 0.38}, 30, 1000, 0.05, threshold, 6);
  const double most = estimate_power(smart, {DependenceKind::Linear, 0.67}, 30, 1000, 0.05, threshold, 7);
  MESSAGE("smart linear power " << half << ", " << most);
  CHECK(std::abs(half - 0.5) <= 0.05);
  CHECK(std::abs(most - 0.9) <= 0.05);
}

TEST_CASE("a size scan reproduces single-size power estimates") {
  const ThresholdSettings settings{0.05, 500, 8, nullptr};
  for (const auto method : {GammaMethod::Limit, GammaMethod::Subsample}) {
    const GammaConfig gamma{2, 3000, method};
    const std::vector<int> sizes = {3, 6};
    const auto thresholds = new_test_thresholds(30, sizes, gamma, settings);
    const DependenceScenario scenario{DependenceKind::Linear, 0.67};
    const SizeScan scan = scan_sizes(scenario, 30, sizes, gamma, thresholds, 0.05, 200, 9);
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      GammaConfig sized = gamma;
      sized.subsample_size = sizes[k];
      CHECK(scan.power[k] == estimate_power({TestKind::New, sized}, scenario, 30, 200, 0.05, thresholds[k], 9));
    }
    CHECK(scan.best_power == std::max(scan.power[0], scan.power[1]));

    const std::vector<int> single = {4};
    const std::vector<double> one = {thresholds[0]};
    const SizeScan degenerate = scan_sizes(scenario, 30, single, gamma, one, 0.05, 50, 9);
    CHECK(degenerate.power.size() == 1);
    CHECK(degenerate.best_size == 4);
  }
  const std::vector<int> bad = {31};
  const std::vector<double> th = {0.1};
  CHECK_THROWS_AS(scan_sizes({}, 30, bad, {}, th, 0.05, 10, 1), std::invalid_argument);
}

TEST_CASE("power report columns use derived seeds") {
  const ThresholdSettings settings{0.05, 300, 10, nullptr};
  const GammaConfig gamma{2, 0, GammaMethod::Limit};
  const std::vector<int> sizes = {2, 5, 8};
  const auto thresholds = new_test_thresholds(30, sizes, gamma, settings);
  const std::vector<DependenceScenario> scenarios = {{DependenceKind::Linear, 0.67}, {DependenceKind::Donut, 3.76}};
  const PowerReport report = power_report(scenarios, 30, sizes, gamma, thresholds, 0.05, 100, 11);
  for (std::size_t d = 0; d < scenarios.size(); ++d) {
    const SizeScan scan = scan_sizes(scenarios[d], 30, sizes, gamma, thresholds, 0.05, 100, derive_seed(11, d));
    for (std::size_t k = 0; k < sizes.size(); ++k) CHECK(report.power(k, d) == scan.power[k]);
  }
}

TEST_CASE("threshold cache round trip") {
  const auto path = scratch_file("cache.json");
  ThresholdCache cache = ThresholdCache::open(path);
  CHECK(cache.size() == 0);
  ThresholdSettings settings{0.05, 200, 12, &cache};
  const GammaConfig gamma{2, 0, GammaMethod::Limit};
  const std::vector<int> sizes = {3, 5};
  const auto first = new_test_thresholds(30, sizes, gamma, settings);
  CHECK(cache.size() == 2);
  const double dh = threshold_for({TestKind::Deheuvels, {}}, DependenceKind::Linear, 30, settings);
  const double ks = threshold_for({TestKind::Smart, {}}, DependenceKind::Donut, 30, settings);
  CHECK(cache.size() == 4);
  cache.save();

  ThresholdCache reopened = ThresholdCache::open(path);
  CHECK(reopened.entries() == cache.entries());
  CHECK(reopened.serialize() == cache.serialize());
  ThresholdSettings again{0.05, 200, 12, &reopened};
  CHECK(new_test_thresholds(30, sizes, gamma, again) == first);
  CHECK(threshold_for({TestKind::Deheuvels, {}}, DependenceKind::Linear, 30, again) == dh);
  CHECK(threshold_for({TestKind::Smart, {}}, DependenceKind::Donut, 30, again) == ks);
  CHECK(reopened.size() == 4);

  // A stored value is served without recomputation.
  reopened.store(new_test_key(30, 7, gamma, again), 123.0);
  const std::vector<int> seven = {7};
  CHECK(new_test_thresholds(30, seven, gamma, again).front() == 123.0);

  // Keys differ by estimator settings.
  const GammaConfig mc{2, 5000, GammaMethod::Subsample};
  CHECK_FALSE(new_test_key(30, 3, mc, again) == new_test_key(30, 3, gamma, again));
  CHECK(new_test_key(30, 3, mc, again).num_subsamples == 5000);

  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(ThresholdCache::open(path), std::runtime_error);
  std::filesystem::remove(path);
}
