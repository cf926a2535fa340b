#include "copularank/estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "copularank/errors.hpp"
#include "copularank/parallel.hpp"

namespace copularank {
namespace {

constexpr std::uint64_t kBlockSubsamples = 8192;

void check_sizes(std::size_t population, std::size_t size) {
  if (size < 2 || size > population) {
    throw std::invalid_argument("subsample size must satisfy 2 <= n <= N (n=" + std::to_string(size) +
                                ", N=" + std::to_string(population) + ")");
  }
}

// 0-based "count of strictly smaller values": tied observations share a group id.
std::vector<std::uint32_t> group_ids(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::uint32_t> ids(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) ids[order[k]] = static_cast<std::uint32_t>(i);
    i = j;
  }
  return ids;
}

// Floyd's algorithm: exactly `size` draws, uniform over subsets.
class SubsetDrawer {
 public:
  explicit SubsetDrawer(std::size_t population) : stamp_(population, 0) {}

  void draw(std::size_t size, RandomStream& stream, std::vector<std::size_t>& out) {
    out.clear();
    if (++generation_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      generation_ = 1;
    }
    const std::size_t population = stamp_.size();
    for (std::size_t j = population - size; j < population; ++j) {
      std::size_t t = static_cast<std::size_t>(stream.below(j + 1));
      if (stamp_[t] == generation_) t = j;
      stamp_[t] = generation_;
      out.push_back(t);
    }
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 0;
};

// Same draws as SubsetDrawer, as a bitmask over a population of at most 64.
inline std::uint64_t draw_mask(std::size_t population, std::size_t size, RandomStream& stream) {
  std::uint64_t mask = 0;
  for (std::size_t j = population - size; j < population; ++j) {
    std::uint64_t t = stream.below(j + 1);
    if (mask & (std::uint64_t{1} << t)) t = j;
    mask |= std::uint64_t{1} << t;
  }
  return mask;
}

struct RankLayout {
  std::vector<std::uint32_t> gx;
  std::vector<std::uint32_t> gy;
  bool tie_free = true;
  std::vector<std::uint32_t> y_by_x;  // y group of the observation at x position, tie-free only
};

RankLayout make_layout(const BivariateSample& sample) {
  RankLayout layout;
  layout.gx = group_ids(sample.xs());
  layout.gy = group_ids(sample.ys());
  layout.tie_free = !has_ties(sample);
  if (layout.tie_free) {
    layout.y_by_x.resize(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) layout.y_by_x[layout.gx[i]] = layout.gy[i];
  }
  return layout;
}

// Ranks the chosen observations within the subset and adds one count per
// observation. Returns false (and counts nothing) when the subset has a tie.
class SubsetRanker {
 public:
  SubsetRanker(const RankLayout& layout, int n)
      : layout_(layout), n_(n), pairs_(n), ys_(n) {}

  bool accumulate(std::span<const std::size_t> chosen, std::span<std::uint64_t> counts) {
    for (int k = 0; k < n_; ++k) {
      pairs_[k] = {layout_.gx[chosen[k]], layout_.gy[chosen[k]]};
      ys_[k] = pairs_[k].second;
    }
    std::sort(pairs_.begin(), pairs_.end());
    std::sort(ys_.begin(), ys_.end());
    for (int k = 1; k < n_; ++k) {
      if (pairs_[k].first == pairs_[k - 1].first || ys_[k] == ys_[k - 1]) return false;
    }
    for (int k = 0; k < n_; ++k) {
      const auto q = std::lower_bound(ys_.begin(), ys_.end(), pairs_[k].second) - ys_.begin();
      ++counts[static_cast<std::size_t>(k) * n_ + q];
    }
    return true;
  }

 private:
  const RankLayout& layout_;
  int n_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
  std::vector<std::uint32_t> ys_;
};

struct BlockTally {
  std::vector<std::uint64_t> counts;
  std::uint64_t discarded = 0;
};

void run_block(const RankLayout& layout, int n, std::uint64_t seed, std::uint64_t block,
               std::uint64_t subsamples, BlockTally& tally) {
  RandomStream stream = derive_stream(seed, block);
  const std::size_t population = layout.gx.size();
  const auto size = static_cast<std::size_t>(n);

  if (layout.tie_free && population <= 64) {
    const auto& y_by_x = layout.y_by_x;
    auto* counts = tally.counts.data();
    for (std::uint64_t s = 0; s < subsamples; ++s) {
      const std::uint64_t mask = draw_mask(population, size, stream);
      std::uint64_t ymask = 0;
      for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
        ymask |= std::uint64_t{1} << y_by_x[std::countr_zero(bits)];
      }
      std::size_t row = 0;
      for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
        const std::uint32_t y = y_by_x[std::countr_zero(bits)];
        const auto q = std::popcount(ymask & ((std::uint64_t{1} << y) - 1));
        ++counts[row + q];
        row += size;
      }
    }
    return;
  }

  SubsetDrawer drawer(population);
  SubsetRanker ranker(layout, n);
  std::vector<std::size_t> chosen;
  chosen.reserve(size);
  for (std::uint64_t s = 0; s < subsamples; ++s) {
    drawer.draw(size, stream, chosen);
    if (!ranker.accumulate(chosen, tally.counts)) ++tally.discarded;
  }
}

DiscreteCopulaDensity density_from_counts(int n, std::span<const std::uint64_t> counts,
                                          std::uint64_t retained) {
  const double denominator = static_cast<double>(retained) * n;
  std::vector<double> mass(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) mass[i] = static_cast<double>(counts[i]) / denominator;
  return DiscreteCopulaDensity(n, std::move(mass));
}

double binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
  return result;
}

}  // namespace

std::uint64_t SubsampleScheme::default_count(int n) {
  const auto n2 = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  return std::max<std::uint64_t>(100000, 200 * n2);
}

std::vector<std::size_t> draw_subsample_indices(std::size_t population, std::size_t size,
                                                RandomStream& stream) {
  check_sizes(population, size);
  SubsetDrawer drawer(population);
  std::vector<std::size_t> out;
  out.reserve(size);
  drawer.draw(size, stream, out);
  return out;
}

GammaEstimate estimate_gamma(const BivariateSample& sample, const SubsampleScheme& scheme) {
  check_sizes(sample.size(), static_cast<std::size_t>(std::max(scheme.size, 0)));
  if (scheme.count < 1) throw std::invalid_argument("number of subsamples must be >= 1");
  const int n = scheme.size;
  const RankLayout layout = make_layout(sample);

  const std::uint64_t blocks = (scheme.count + kBlockSubsamples - 1) / kBlockSubsamples;
  const unsigned workers = worker_count(blocks);
  std::vector<BlockTally> tallies(workers);
  for (auto& t : tallies) t.counts.assign(static_cast<std::size_t>(n) * n, 0);

  parallel_for(blocks, [&](unsigned worker, std::size_t block) {
    const std::uint64_t begin = block * kBlockSubsamples;
    const std::uint64_t todo = std::min(kBlockSubsamples, scheme.count - begin);
    run_block(layout, n, scheme.seed, block, todo, tallies[worker]);
  });

  // Integer tallies: the reduction is exact in any order.
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) * n, 0);
  std::uint64_t discarded = 0;
  for (const auto& t : tallies) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += t.counts[i];
    discarded += t.discarded;
  }
  const std::uint64_t retained = scheme.count - discarded;
  if (retained == 0) {
    throw AllSubsamplesTied("all " + std::to_string(scheme.count) + " subsamples of size " + std::to_string(n) +
                            " contained ties");
  }
  return {density_from_counts(n, counts, retained), discarded, retained,
          static_cast<double>(retained) * static_cast<double>(n)};
}

DiscreteCopulaDensity estimate_beta(const BivariateSample& sample) {
  const JointRanks ranks = compute_ranks(sample);
  const auto size = static_cast<int>(sample.size());
  std::vector<double> mass(static_cast<std::size_t>(size) * size, 0.0);
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    mass[static_cast<std::size_t>(ranks.r[i] - 1) * size + (ranks.s[i] - 1)] = 1.0 / size;
  }
  return DiscreteCopulaDensity(size, std::move(mass));
}

DiscreteCopulaDensity enumerate_exact_gamma(const BivariateSample& sample, int n) {
  const std::size_t population = sample.size();
  check_sizes(population, static_cast<std::size_t>(std::max(n, 0)));
  const double subsets = binomial(population, static_cast<std::uint64_t>(n));
  if (subsets > 1e6) {
    throw CombinatorialExplosion("C(" + std::to_string(population) + "," + std::to_string(n) +
                                 ") exceeds the enumeration guard of 10^6");
  }
  const RankLayout layout = make_layout(sample);
  SubsetRanker ranker(layout, n);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) * n, 0);
  std::uint64_t retained = 0;

  // Lexicographic walk over all index combinations.
  std::vector<std::size_t> chosen(n);
  std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  for (;;) {
    if (ranker.accumulate(chosen, counts)) ++retained;
    int k = n - 1;
    while (k >= 0 && chosen[k] == population - n + k) --k;
    if (k < 0) break;
    ++chosen[k];
    for (int j = k + 1; j < n; ++j) chosen[j] = chosen[j - 1] + 1;
  }
  if (retained == 0) throw AllSubsamplesTied("every subset of size " + std::to_string(n) + " contains a tie");
  return density_from_counts(n, counts, retained);
}

QuadrantCounts::QuadrantCounts(const BivariateSample& sample) {
  const JointRanks ranks = compute_ranks(sample);
  const std::size_t size = sample.size();
  below_both_.resize(size);
  below_x_only_.resize(size);
  below_y_only_.resize(size);
  above_both_.resize(size);

  // Sweep in x order, counting earlier points with smaller y in a Fenwick tree.
  std::vector<std::size_t> by_x(size);
  for (std::size_t i = 0; i < size; ++i) by_x[ranks.r[i] - 1] = i;
  std::vector<std::uint32_t> fenwick(size + 1, 0);
  for (std::size_t pos = 0; pos < size; ++pos) {
    const std::size_t i = by_x[pos];
    const auto ry = static_cast<std::size_t>(ranks.s[i]);  // 1-based
    std::uint32_t below = 0;
    for (std::size_t j = ry - 1; j > 0; j -= j & (~j + 1)) below += fenwick[j];
    for (std::size_t j = ry; j <= size; j += j & (~j + 1)) ++fenwick[j];

    const auto rx0 = static_cast<std::uint32_t>(pos);
    const auto ry0 = static_cast<std::uint32_t>(ry - 1);
    below_both_[i] = below;
    below_x_only_[i] = rx0 - below;
    below_y_only_[i] = ry0 - below;
    above_both_[i] = static_cast<std::uint32_t>(size - 1) - rx0 - ry0 + below;
  }
}

DiscreteCopulaDensity QuadrantCounts::limit_gamma(int n) const {
  const std::size_t population = size();
  check_sizes(population, static_cast<std::size_t>(std::max(n, 0)));
  const auto others = static_cast<double>(population - 1);
  const auto un = static_cast<std::size_t>(n);

  // C(X, k) / (N-1)^k for k < n; the four exponents always add up to n-1.
  std::vector<double> step(un, 0.0);
  for (std::size_t k = 1; k < un; ++k) step[k] = 1.0 / (static_cast<double>(k) * others);
  auto fill = [&](std::uint32_t x, std::vector<double>& table) {
    table[0] = 1.0;
    for (std::size_t k = 1; k < un; ++k) {
      table[k] = k > x ? 0.0 : table[k - 1] * (static_cast<double>(x) - static_cast<double>(k) + 1.0) * step[k];
    }
  };

  // Loop over (k_a, k_b) rows and run k_c contiguously; td is stored reversed
  // so that C(D, n-1-k_a-k_b-k_c) is read forward.
  std::vector<double> ta(un), tb(un), tc(un), td(un), td_reversed(un);
  std::vector<double> acc(un * un, 0.0);
  for (std::size_t i = 0; i < population; ++i) {
    const std::size_t a = below_both_[i], b = below_x_only_[i], c = below_y_only_[i], d = above_both_[i];
    fill(static_cast<std::uint32_t>(a), ta);
    fill(static_cast<std::uint32_t>(b), tb);
    fill(static_cast<std::uint32_t>(c), tc);
    fill(static_cast<std::uint32_t>(d), td);
    std::reverse_copy(td.begin(), td.end(), td_reversed.begin());
    const double* tcp = tc.data();
    for (std::size_t ka = 0; ka <= std::min(a, un - 1); ++ka) {
      for (std::size_t kb = 0; kb <= std::min(b, un - 1 - ka); ++kb) {
        const double weight = ta[ka] * tb[kb];
        const std::size_t rest = un - 1 - ka - kb;  // k_c + k_d
        const std::size_t kc_lo = rest > d ? rest - d : 0;
        const std::size_t kc_hi = std::min(rest, c);
        if (kc_lo > kc_hi) continue;
        double* row = acc.data() + (ka + kb) * un + ka;
        const double* tdp = td_reversed.data() + ka + kb;
        for (std::size_t kc = kc_lo; kc <= kc_hi; ++kc) row[kc] += weight * tcp[kc] * tdp[kc];
      }
    }
  }

  std::vector<double> norm(un);
  fill(static_cast<std::uint32_t>(population - 1), norm);
  const double total = static_cast<double>(population) * norm[un - 1];
  for (double& v : acc) v /= total;
  return DiscreteCopulaDensity(n, std::move(acc));
}

DiscreteCopulaDensity limit_gamma(const BivariateSample& sample, int n) {
  return QuadrantCounts(sample).limit_gamma(n);
}

std::uint64_t GammaConfig::effective_count() const {
  return num_subsamples == 0 ? SubsampleScheme::default_count(subsample_size) : num_subsamples;
}

GammaEstimate gamma_density(const BivariateSample& sample, const GammaConfig& config, std::uint64_t seed) {
  if (config.method == GammaMethod::Limit) {
    return {limit_gamma(sample, config.subsample_size), 0, 0, static_cast<double>(sample.size())};
  }
  return estimate_gamma(sample, SubsampleScheme{config.subsample_size, config.effective_count(), seed});
}

const char* to_string(GammaMethod method) {
  return method == GammaMethod::Limit ? "limit" : "subsample";
}

GammaMethod parse_gamma_method(const std::string& text) {
  if (text == "subsample") return GammaMethod::Subsample;
  if (text == "limit") return GammaMethod::Limit;
  throw std::invalid_argument("unknown estimator '" + text + "' (expected subsample or limit)");
}

}  // namespace copularank
