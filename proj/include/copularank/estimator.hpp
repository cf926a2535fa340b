#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "copularank/density.hpp"
#include "copularank/random.hpp"
#include "copularank/sample.hpp"

namespace copularank {

/// n observations per subsample, m subsamples, and the master seed.
struct SubsampleScheme {
  int size = 2;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;

  /// max(10^5, 200 n^2).
  static std::uint64_t default_count(int n);
};

/// How the subsampled rank density is obtained.
///   Subsample: m random subsamples (the Monte Carlo estimator).
///   Limit: the m -> infinity value, i.e. the exact average over all C(N, n)
///          subsets, computed in closed form from quadrant counts.
enum class GammaMethod { Subsample, Limit };

struct GammaEstimate {
  DiscreteCopulaDensity density;
  std::uint64_t discarded = 0;  // subsamples dropped for ties
  std::uint64_t retained = 0;   // m' (0 for the limit method)
  double rank_points = 0.0;     // rank points backing the grid: m'*n, or N for the limit method
};

/// n distinct indices in [0, N), uniform over the C(N, n) subsets (Floyd's
/// algorithm; the returned order carries no meaning).
std::vector<std::size_t> draw_subsample_indices(std::size_t population, std::size_t size,
                                                RandomStream& stream);

/// Subsampled rank density. Subsamples with a tie in either coordinate are
/// discarded and the grid is normalised by the retained ones.
/// Work is split into fixed blocks of subsamples, block b drawing from
/// derive_stream(seed, b), so the result does not depend on the thread count.
/// Throws AllSubsamplesTied if nothing is retained.
GammaEstimate estimate_gamma(const BivariateSample& sample, const SubsampleScheme& scheme);

/// Full-sample rank measure: mass 1/N at each (R_i, S_i). Throws TiesDetected.
DiscreteCopulaDensity estimate_beta(const BivariateSample& sample);

/// Brute-force average of the subsample rank histogram over every tie-free
/// subset of size n. Guarded at C(N, n) <= 10^6.
DiscreteCopulaDensity enumerate_exact_gamma(const BivariateSample& sample, int n);

/// Per-observation quadrant counts of a tie-free sample. For observation i,
/// the other N-1 points split into: below in both coordinates, below in x
/// only, below in y only, above in both. Computing these once lets the
/// closed-form limit density be evaluated for several subsample sizes.
class QuadrantCounts {
 public:
  /// Throws TiesDetected.
  explicit QuadrantCounts(const BivariateSample& sample);

  std::size_t size() const noexcept { return below_both_.size(); }

  /// Limit (m -> infinity) subsampled density for subsample size n, 2 <= n <= N.
  /// The number of subsets placing observation i at within-subset ranks (p, q) is
  ///   sum_k C(A,k) C(B,p-1-k) C(C,q-1-k) C(D,n-p-q+1+k)
  /// with (A, B, C, D) the quadrant counts of i.
  DiscreteCopulaDensity limit_gamma(int n) const;

 private:
  std::vector<std::uint32_t> below_both_;
  std::vector<std::uint32_t> below_x_only_;
  std::vector<std::uint32_t> below_y_only_;
  std::vector<std::uint32_t> above_both_;
};

/// Convenience wrapper around QuadrantCounts. Throws TiesDetected.
DiscreteCopulaDensity limit_gamma(const BivariateSample& sample, int n);

/// Estimator settings shared by the test procedures.
struct GammaConfig {
  int subsample_size = 2;
  std::uint64_t num_subsamples = 0;  // 0 selects SubsampleScheme::default_count
  GammaMethod method = GammaMethod::Subsample;

  std::uint64_t effective_count() const;
};

GammaEstimate gamma_density(const BivariateSample& sample, const GammaConfig& config, std::uint64_t seed);

const char* to_string(GammaMethod method);
GammaMethod parse_gamma_method(const std::string& text);

}  // namespace copularank
