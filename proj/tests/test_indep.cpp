#include <algorithm>
#include <cmath>

#include "copularank/copulas.hpp"
#include "copularank/indep.hpp"
#include "copularank/stats.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace copularank;

namespace {

constexpr DependenceKind kKinds[] = {DependenceKind::Linear, DependenceKind::Quadratic, DependenceKind::Donut,
                                     DependenceKind::Butterfly};

BivariateSample comonotone(std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = std::sin(0.9 * static_cast<double>(i)) + 0.002 * static_cast<double>(i);
  return {xs, xs};
}

// Random tie-free sample on the 1/N grid.
BivariateSample random_permutation_sample(std::size_t n, RandomStream& stream) {
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = ys[i] = static_cast<double>(i);
  std::shuffle(ys.begin(), ys.end(), stream);
  return {xs, ys};
}

}  // namespace

TEST_CASE("scenario names") {
  for (const auto kind : kKinds) CHECK(parse_dependence_kind(to_string(kind)) == kind);
  CHECK_THROWS_AS(parse_dependence_kind("spiral"), std::invalid_argument);
}

TEST_CASE("scenarios at zero amplitude are independent") {
  for (const auto kind : kKinds) {
    RandomStream stream(1, static_cast<std::uint64_t>(kind));
    const std::size_t n = 20000;
    const BivariateSample s = scenario_sample({kind, 0.0}, n, stream);
    CHECK(std::abs(pearson_correlation(s.xs(), s.ys())) < 3 / std::sqrt(double(n)));
    std::vector<double> ax(n), ay(n);
    for (std::size_t i = 0; i < n; ++i) {
      ax[i] = s.xs()[i] * s.xs()[i];
      ay[i] = s.ys()[i] * s.ys()[i];
    }
    CHECK(std::abs(pearson_correlation(ax, ay)) < 3 / std::sqrt(double(n)));
  }
}

TEST_CASE("scenario moments") {
  RandomStream stream(2, 0);
  const BivariateSample linear = scenario_sample({DependenceKind::Linear, 0.38}, 100000, stream);
  CHECK(std::abs(pearson_correlation(linear.xs(), linear.ys()) - 0.38 / std::sqrt(1 + 0.38 * 0.38)) < 0.01);

  const BivariateSample donut = scenario_sample({DependenceKind::Donut, 2.9}, 10000, stream);
  CHECK(std::abs(pearson_correlation(donut.xs(), donut.ys())) < 0.03);
  double radius = 0.0;
  for (std::size_t i = 0; i < donut.size(); ++i) radius += donut.xs()[i] * donut.xs()[i] + donut.ys()[i] * donut.ys()[i];
  CHECK(std::abs(radius / donut.size() - (2.9 * 2.9 + 2)) < 0.15);

  const std::size_t n = 2000;
  const BivariateSample ring = scenario_sample({DependenceKind::Donut, 0.0}, n, stream);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += ring.xs()[i] * ring.xs()[i] + ring.ys()[i] * ring.ys()[i];
  CHECK(std::abs(mean / n - 2.0) < 3 * std::sqrt(4.0 / n));

  // Butterfly: y | x has standard deviation 1 + a|x|, no correlation.
  const BivariateSample fly = scenario_sample({DependenceKind::Butterfly, 1.0}, 100000, stream);
  CHECK(std::abs(pearson_correlation(fly.xs(), fly.ys())) < 0.015);
}

TEST_CASE("Deheuvels closed form against midpoint integration") {
  // Ranks (1,1), (2,2), (3,3). Sizes with N+1 dividing 400 put every jump of
  // C_N on a cell edge of the mesh.
  const BivariateSample three({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  CHECK(std::abs(deheuvels_statistic(three) - oracle::cramer_von_mises_riemann(three, 400)) < 1e-4);

  RandomStream stream(3, 0);
  for (const std::size_t n : {3u, 4u, 7u, 9u, 15u, 19u}) {
    for (int t = 0; t < 3; ++t) {
      const BivariateSample s = t == 0 ? random_permutation_sample(n, stream) : oracle::random_sample(n, stream);
      CHECK(std::abs(deheuvels_statistic(s) - oracle::cramer_von_mises_riemann(s, 400)) < 1e-4);
    }
  }
}

TEST_CASE("Deheuvels statistic basics") {
  // Kernel rows sum to zero, so a two-point sample has a closed value:
  // D(1,1) = D(2,2) = 1/12, D(1,2) = -1/12 at N = 2.
  CHECK(deheuvels_statistic(BivariateSample({1.0, 2.0}, {1.0, 2.0})) == doctest::Approx(4.0 / 144 / 2));
  CHECK(deheuvels_statistic(BivariateSample({1.0, 2.0}, {2.0, 1.0})) == doctest::Approx(4.0 / 144 / 2));
  RandomStream stream(4, 0);
  for (int t = 0; t < 200; ++t) CHECK(deheuvels_statistic(oracle::random_sample(2 + stream.below(50), stream)) >= 0.0);
  CHECK_THROWS(deheuvels_statistic(BivariateSample({1, 1, 2}, {1, 2, 3})));

  const std::size_t n = 100;
  const double threshold = deheuvels_threshold(n, 0.05, 1000, 5);
  double mean = 0.0;
  for (int r = 0; r < 200; ++r) {
    RandomStream s = derive_stream(6, r);
    mean += deheuvels_statistic(independence_sample(n, s)) / 200;
  }
  CHECK(mean < threshold);
}

TEST_CASE("rank-density null thresholds") {
  const GammaConfig config{8, 5000, GammaMethod::Subsample};
  const double strict = indep_threshold(30, config, 0.01, 600, 7);
  const double loose = indep_threshold(30, config, 0.10, 600, 7);
  CHECK(strict >= loose);
  CHECK(loose > 0.0);

  const std::vector<int> sizes = {4, 8};
  const auto both = indep_thresholds(30, sizes, config, 0.05, 300, 8);
  CHECK(both[1] == indep_threshold(30, config, 0.05, 300, 8));
}

TEST_CASE("rank-density test rejects a comonotone sample") {
  const GammaConfig config{8, 5000, GammaMethod::Subsample};
  const double threshold = indep_threshold(30, config, 0.05, 1000, 9);
  const TestOutcome outcome = indep_test(comonotone(30), config, 1, 0.05, threshold);
  CHECK(outcome.reject);
  CHECK(outcome.statistic == doctest::Approx(std::log(8.0)).epsilon(1e-12));
  CHECK(outcome.statistic > 3 * threshold);

  const TestOutcome again = indep_test(comonotone(30), config, 1, 0.05, threshold);
  CHECK(again.statistic == outcome.statistic);
}

TEST_CASE("rank-density test decision ignores increasing margin transforms") {
  RandomStream stream(10, 0);
  const BivariateSample s = scenario_sample({DependenceKind::Quadratic, 0.5}, 30, stream);
  std::vector<double> xs(s.xs().begin(), s.xs().end()), ys(s.ys().begin(), s.ys().end());
  for (double& x : xs) x = std::exp(x);
  for (double& y : ys) y = 2 * y * y * y + y;
  for (const auto method : {GammaMethod::Subsample, GammaMethod::Limit}) {
    const GammaConfig config{6, 5000, method};
    CHECK(indep_test(s, config, 3, 0.05, 0.1).statistic ==
          indep_test(BivariateSample(xs, ys), config, 3, 0.05, 0.1).statistic);
  }
}

TEST_CASE("rank-density test calibration, N=30, n=8") {
  // Threshold on 3000 null samples, then 3000 fresh null samples: 0.05 +- 0.013
  for (const auto method : {GammaMethod::Subsample, GammaMethod::Limit}) {
    const GammaConfig config{8, 2000, method};
    const double threshold = indep_threshold(30, config, 0.05, 3000, 11);
    int rejections = 0;
    for (int r = 0; r < 3000; ++r) {
      RandomStream s = derive_stream(12, r);
      rejections += indep_test(independence_sample(30, s), config, derive_seed(12, r), 0.05, threshold).reject;
    }
    const double rate = rejections / 3000.0;
    MESSAGE(std::string(to_string(method)) << " null rejection rate " << rate);
    CHECK(std::abs(rate - 0.05) <= 0.013);
  }
}

TEST_CASE("Deheuvels calibration at N=30") {
  const double threshold = deheuvels_threshold(30, 0.05, 3000, 13);
  int rejections = 0;
  for (int r = 0; r < 3000; ++r) {
    RandomStream s = derive_stream(14, r);
    rejections += deheuvels_test(scenario_sample({DependenceKind::Linear, 0.0}, 30, s), 0.05, threshold).reject;
  }
  CHECK(std::abs(rejections / 3000.0 - 0.05) <= 0.013);
}

TEST_CASE("smart tests hold their level") {
  const double ks = donut_ks_threshold(30, 0.05, 3000, 15);
  CHECK(ks > 0.0);
  for (const auto kind : kKinds) {
    int rejections = 0;
    for (int r = 0; r < 1000; ++r) {
      RandomStream s = derive_stream(16 + static_cast<std::uint64_t>(kind), r);
      const TestOutcome o = smart_test(kind, scenario_sample({kind, 0.0}, 30, s), 0.05, ks);
      CHECK(o.reject == (o.statistic > o.threshold));
      rejections += o.reject;
    }
    MESSAGE(std::string(to_string(kind)) << " smart null rate " << rejections / 1000.0);
    CHECK(std::abs(rejections / 1000.0 - 0.05) <= 0.02);
  }
}

TEST_CASE("Pearson test and KS helpers") {
  // r = 0.5 at N = 30: t = 0.5 sqrt(28 / 0.75), two-sided p from t_28.
  std::vector<double> xs = {1, 2, 3, 4, 5}, ys = {2, 4, 6, 8, 10};
  CHECK(pearson_correlation(xs, ys) == doctest::Approx(1.0));
  ys = {5, 4, 3, 2, 1};
  CHECK(pearson_correlation(xs, ys) == doctest::Approx(-1.0));
  xs = {1, 2, 3, 4};
  ys = {1, 3, 2, 4};
  const PearsonTest p = pearson_test(xs, ys);
  CHECK(p.r == doctest::Approx(0.8));
  CHECK(p.t == doctest::Approx(0.8 * std::sqrt(2 / 0.36)));
  // t_2 has the closed-form CDF 1/2 + t / (2 sqrt(2 + t^2))
  CHECK(p.p_value == doctest::Approx(1 - p.t / std::sqrt(2 + p.t * p.t)).epsilon(1e-10));

  // A single value at the median of Exp(1): KS distance 1/2.
  CHECK(ks_exponential_statistic({std::log(2.0)}, 1.0) == doctest::Approx(0.5));
  CHECK(ks_exponential_statistic({0.1, 0.2}, 1.0) == doctest::Approx(1 - (1 - std::exp(-0.2))));
}

TEST_CASE("upper quantile order statistic") {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = 100 - i;  // 1..100 reversed
  CHECK(upper_quantile(v, 0.05) == 95);
  CHECK(upper_quantile(v, 0.01) == 99);
  CHECK(upper_quantile(v, 0.5) == 50);
  CHECK(upper_quantile({3.0}, 0.05) == 3.0);
  CHECK(decide(2.0, 1.0, 0.05).reject);
  CHECK_FALSE(decide(1.0, 1.0, 0.05).reject);
}
