#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace copularank {

/// Philox4x32-10 block function (Salmon et al., SC'11). Pure: the output
/// depends only on the counter and the key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream. A stream is identified by (seed, stream_index);
/// the k-th 64-bit output is a pure function of (seed, stream_index, k), so
/// replicate r of any Monte Carlo loop can be regenerated on any thread.
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random> distributions.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_index) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform01() noexcept;

  /// Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) noexcept;

  double standard_normal();

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline RandomStream derive_stream(std::uint64_t seed, std::uint64_t stream_index) noexcept {
  return RandomStream(seed, stream_index);
}

/// Child seed for a nested Monte Carlo loop. Uses a counter block that
/// ordinary stream consumption never reaches.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace copularank
