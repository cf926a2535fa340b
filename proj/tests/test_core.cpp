#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "copularank/errors.hpp"
#include "copularank/estimator.hpp"
#include "copularank/parallel.hpp"
#include "copularank/random.hpp"
#include "copularank/sample.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace copularank;

TEST_CASE("compute_ranks on a small sample") {
  const JointRanks ranks = compute_ranks(BivariateSample({10, 20, 30}, {3, 1, 2}));
  CHECK(ranks.r == std::vector<int>{1, 2, 3});
  CHECK(ranks.s == std::vector<int>{3, 1, 2});
}

TEST_CASE("sample validation") {
  CHECK_THROWS_AS(BivariateSample({5}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(BivariateSample({1, 2}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(BivariateSample({1, NAN}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(BivariateSample({1, INFINITY}, {1, 2}), std::invalid_argument);
}

TEST_CASE("ties are reported") {
  CHECK_THROWS_AS(compute_ranks(BivariateSample({1, 1, 2}, {1, 2, 3})), TiesDetected);
  CHECK_THROWS_AS(compute_ranks(BivariateSample({1, 2, 3}, {4, 5, 4})), TiesDetected);
  CHECK(has_ties(BivariateSample({1, 1, 2}, {1, 2, 3})));
  CHECK_FALSE(has_ties(BivariateSample({1, 2, 3}, {1, 2, 3})));
  // "count of values <= x" convention for tied groups
  CHECK(coordinate_ranks(std::vector<double>{2.0, 1.0, 2.0}) == std::vector<int>{3, 1, 3});
}

TEST_CASE("ranks are permutations and invariant under increasing transforms") {
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    RandomStream stream(7, trial);
    const std::size_t n = 2 + stream.below(60);
    const BivariateSample sample = oracle::random_sample(n, stream);
    const JointRanks ranks = compute_ranks(sample);
    std::vector<int> sorted = ranks.r;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expected(n);
    std::iota(expected.begin(), expected.end(), 1);
    CHECK(sorted == expected);

    std::vector<double> xs(sample.xs().begin(), sample.xs().end());
    for (double& x : xs) x = std::exp(3.0 * x) + 5.0;
    const JointRanks transformed = compute_ranks(BivariateSample(xs, {sample.ys().begin(), sample.ys().end()}));
    CHECK(transformed.r == ranks.r);
    CHECK(transformed.s == ranks.s);
  }
}

TEST_CASE("ranks of a subset are the re-ranked full ranks") {
  RandomStream stream(11, 0);
  const BivariateSample sample = oracle::random_sample(40, stream);
  const JointRanks full = compute_ranks(sample);
  const std::vector<std::size_t> idx = {3, 17, 5, 39, 22, 8};
  const JointRanks sub = compute_ranks(sample.subset(idx));
  for (std::size_t a = 0; a < idx.size(); ++a) {
    int r = 0, s = 0;
    for (std::size_t b = 0; b < idx.size(); ++b) {
      r += full.r[idx[b]] <= full.r[idx[a]];
      s += full.s[idx[b]] <= full.s[idx[a]];
    }
    CHECK(sub.r[a] == r);
    CHECK(sub.s[a] == s);
  }
}

TEST_CASE("Philox4x32-10 known answers") {
  // Reference vectors distributed with Random123.
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("derive_stream is pure and separates streams") {
  RandomStream a = derive_stream(42, 0), b = derive_stream(42, 0), c = derive_stream(42, 1);
  bool differs = false;
  for (int i = 0; i < 64; ++i) {
    const auto x = a(), y = b(), z = c();
    CHECK(x == y);
    differs |= x != z;
  }
  CHECK(differs);
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
  CHECK(derive_seed(42, 7) != derive_seed(42, 8));
  CHECK(derive_seed(42, 7) != derive_seed(43, 7));
}

TEST_CASE("uniform draws stay inside the open unit interval and look uniform") {
  RandomStream stream(3, 0);
  double sum = 0.0;
  std::array<int, 10> bins{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double u = stream.uniform01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    ++bins[static_cast<int>(u * 10)];
  }
  CHECK(sum / draws == doctest::Approx(0.5).epsilon(0.01));
  for (const int b : bins) CHECK(std::abs(b - draws / 10) < 5 * std::sqrt(draws * 0.09));

  std::array<int, 3> counts{};
  for (int i = 0; i < 30000; ++i) ++counts[stream.below(3)];
  for (const int c : counts) CHECK(std::abs(c / 30000.0 - 1.0 / 3.0) < 0.01);
}

TEST_CASE("downstream results do not depend on the thread count") {
  RandomStream stream(5, 0);
  const BivariateSample sample = oracle::random_sample(30, stream);
  const SubsampleScheme scheme{6, 70000, 42};
  set_thread_limit(1);
  const GammaEstimate one = estimate_gamma(sample, scheme);
  set_thread_limit(8);
  const GammaEstimate eight = estimate_gamma(sample, scheme);
  set_thread_limit(0);
  CHECK(std::equal(one.density.masses().begin(), one.density.masses().end(), eight.density.masses().begin()));
}

TEST_CASE("parallel_for propagates exceptions") {
  set_thread_limit(4);
  CHECK_THROWS_AS(parallel_for(100,
                               [](unsigned, std::size_t i) {
                                 if (i == 37) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  set_thread_limit(0);
}
