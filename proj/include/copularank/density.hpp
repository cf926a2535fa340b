#pragma once

#include <span>
#include <vector>

namespace copularank {

/// Nonnegative mass on the n x n grid of rank atoms (p/n, q/n), p, q in 1..n.
/// Total mass is 1 within 1e-9. Immutable after construction.
class DiscreteCopulaDensity {
 public:
  /// `mass` is row-major: entry (p-1)*n + (q-1) holds the atom (p/n, q/n).
  DiscreteCopulaDensity(int n, std::vector<double> mass);

  static DiscreteCopulaDensity uniform(int n);

  int n() const noexcept { return n_; }

  /// Mass of atom (p/n, q/n); p, q are ranks in 1..n.
  double mass(int p, int q) const { return mass_[index(p, q)]; }

  std::span<const double> masses() const noexcept { return mass_; }

  double row_sum(int p) const;
  double column_sum(int q) const;
  double total() const;

 private:
  std::size_t index(int p, int q) const;

  int n_;
  std::vector<double> mass_;
};

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

}  // namespace copularank
