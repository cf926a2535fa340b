#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>

namespace copularank {

/// Identifies one simulated null threshold. `test` is "new", "deheuvels" or
/// "smart-donut"; estimator fields only matter for "new".
struct ThresholdKey {
  std::string test;
  std::size_t sample_size = 0;
  int subsample_size = 0;
  double alpha = 0.05;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  std::uint64_t num_subsamples = 0;

  auto tie() const {
    return std::tie(test, sample_size, subsample_size, alpha, reps, seed, estimator, num_subsamples);
  }
  bool operator<(const ThresholdKey& other) const { return tie() < other.tie(); }
  bool operator==(const ThresholdKey& other) const { return tie() == other.tie(); }
};

/// Persistent table of simulated thresholds, stored as an indented JSON
/// document with entries in key order.
class ThresholdCache {
 public:
  ThresholdCache() = default;

  /// Loads `path` if it exists; a missing file gives an empty cache bound to
  /// that path. A malformed file throws std::runtime_error.
  static ThresholdCache open(const std::filesystem::path& path);

  std::optional<double> lookup(const ThresholdKey& key) const;
  void store(const ThresholdKey& key, double threshold);
  std::size_t size() const noexcept { return entries_.size(); }

  /// Writes back to the bound path (no-op for an unbound cache).
  void save() const;
  std::string serialize() const;

  const std::map<ThresholdKey, double>& entries() const noexcept { return entries_; }

 private:
  std::optional<std::filesystem::path> path_;
  std::map<ThresholdKey, double> entries_;
};

}  // namespace copularank
