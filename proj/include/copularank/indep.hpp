#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "copularank/estimator.hpp"
#include "copularank/random.hpp"
#include "copularank/sample.hpp"
#include "copularank/stats.hpp"

namespace copularank {

enum class DependenceKind { Linear, Quadratic, Donut, Butterfly };

/// One of the four benchmark dependence forms with amplitude a >= 0:
///   Linear     y = a x + e
///   Quadratic  y = a x^2 + e
///   Donut      (x, y) = a (cos 2 pi u, sin 2 pi u) + (e1, e2)
///   Butterfly  y = (1 + a |x|) e
/// x, e, e1, e2 standard normal, u uniform on [0,1]. a = 0 is independence.
struct DependenceScenario {
  DependenceKind kind = DependenceKind::Linear;
  double amplitude = 0.0;
};

const char* to_string(DependenceKind kind);
DependenceKind parse_dependence_kind(const std::string& text);
std::string describe(const DependenceScenario& scenario);

BivariateSample scenario_sample(const DependenceScenario& scenario, std::size_t size, RandomStream& stream);

/// Null rejection threshold of the rank-density test: the (1 - alpha)
/// quantile of indep_statistic over `reps` independent-uniform samples of
/// size N. Replicate r draws from derive_stream(seed, r).
double indep_threshold(std::size_t size, const GammaConfig& config, double alpha, std::size_t reps,
                       std::uint64_t seed);

/// One threshold per subsample size, all computed on the same null samples.
std::vector<double> indep_thresholds(std::size_t size, std::span<const int> subsample_sizes,
                                     const GammaConfig& config, double alpha, std::size_t reps,
                                     std::uint64_t seed);

/// Kullback divergence of the rank density from uniform, compared with `threshold`.
TestOutcome indep_test(const BivariateSample& sample, const GammaConfig& config, std::uint64_t seed,
                       double alpha, double threshold);

/// Cramer-von Mises statistic of the empirical copula process,
///   N * int int (C_N(u,v) - C_N(u,1) C_N(1,v))^2 du dv,
/// with C_N built from u_i = r_i/(N+1), v_i = s_i/(N+1). Centring by the
/// product of the empirical margins removes the O(1/N) offset of C_N from uv.
/// Evaluated as N^-1 sum_ik D(r_i,r_k) D(s_i,s_k) with
///   D(a,b) = (2N+1)/(6N) + a(a-1)/(2N(N+1)) + b(b-1)/(2N(N+1)) - max(a,b)/(N+1).
/// Throws TiesDetected.
double deheuvels_statistic(const BivariateSample& sample);

double deheuvels_threshold(std::size_t size, double alpha, std::size_t reps, std::uint64_t seed);

TestOutcome deheuvels_test(const BivariateSample& sample, double alpha, double threshold);

/// KS distance of x^2 + y^2 from the exponential law with mean 2 (its exact
/// law under independence with standard normal coordinates).
double donut_ks_statistic(const BivariateSample& sample);

/// Null threshold of donut_ks_statistic at sample size N, by simulation.
double donut_ks_threshold(std::size_t size, double alpha, std::size_t reps, std::uint64_t seed);

/// Scenario-aware test: two-sided Pearson t-tests of (x, y), (x^2, y) and
/// (|x|, |y|) for Linear, Quadratic and Butterfly; for Donut the KS test of
/// x^2 + y^2, which needs `ks_threshold`. For the Pearson forms the outcome's
/// statistic is the p-value's complement, 1 - p, against threshold 1 - alpha.
TestOutcome smart_test(DependenceKind kind, const BivariateSample& sample, double alpha, double ks_threshold = 0.0);

}  // namespace copularank
