#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace copularank {

/// N paired finite observations (x_i, y_i), N >= 2.
class BivariateSample {
 public:
  BivariateSample(std::vector<double> xs, std::vector<double> ys);

  std::size_t size() const noexcept { return xs_.size(); }
  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> ys() const noexcept { return ys_; }

  /// The observations at `indices`, in that order.
  BivariateSample subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Joint ranks in 1..k: r_i = #{j : x_j <= x_i}, s_i likewise for y.
struct JointRanks {
  std::vector<int> r;
  std::vector<int> s;

  std::size_t size() const noexcept { return r.size(); }
};

/// Throws TiesDetected if either coordinate holds two equal values.
JointRanks compute_ranks(const BivariateSample& sample);

bool has_ties(const BivariateSample& sample);

/// Ranks of one coordinate with the "count of values <= x_i" convention.
/// Tied values share the largest rank of their group.
std::vector<int> coordinate_ranks(std::span<const double> values);

}  // namespace copularank
