#include "copularank/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "copularank/errors.hpp"

namespace copularank {
namespace {

struct RankedCoordinate {
  std::vector<int> ranks;
  bool tied = false;
};

RankedCoordinate rank_coordinate(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::pair<double, std::size_t>> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = {values[i], i};
  std::sort(order.begin(), order.end());
  RankedCoordinate out;
  out.ranks.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && order[j].first == order[i].first) ++j;
    if (j - i > 1) out.tied = true;
    for (std::size_t k = i; k < j; ++k) out.ranks[order[k].second] = static_cast<int>(j);
    i = j;
  }
  return out;
}

}  // namespace

BivariateSample::BivariateSample(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size()) {
    throw std::invalid_argument("sample coordinates differ in length: " + std::to_string(xs_.size()) +
                                " vs " + std::to_string(ys_.size()));
  }
  if (xs_.size() < 2) throw std::invalid_argument("sample needs at least 2 observations");
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i])) {
      throw std::invalid_argument("non-finite value in observation " + std::to_string(i));
    }
  }
}

BivariateSample BivariateSample::subset(std::span<const std::size_t> indices) const {
  std::vector<double> xs, ys;
  xs.reserve(indices.size());
  ys.reserve(indices.size());
  for (const std::size_t i : indices) {
    xs.push_back(xs_.at(i));
    ys.push_back(ys_.at(i));
  }
  return BivariateSample(std::move(xs), std::move(ys));
}

std::vector<int> coordinate_ranks(std::span<const double> values) { return rank_coordinate(values).ranks; }

bool has_ties(const BivariateSample& sample) {
  return rank_coordinate(sample.xs()).tied || rank_coordinate(sample.ys()).tied;
}

JointRanks compute_ranks(const BivariateSample& sample) {
  RankedCoordinate x = rank_coordinate(sample.xs());
  if (x.tied) throw TiesDetected("tied values in the first coordinate");
  RankedCoordinate y = rank_coordinate(sample.ys());
  if (y.tied) throw TiesDetected("tied values in the second coordinate");
  return {std::move(x.ranks), std::move(y.ranks)};
}

}  // namespace copularank
