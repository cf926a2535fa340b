#include "copularank/density.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace copularank {

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (const double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

DiscreteCopulaDensity::DiscreteCopulaDensity(int n, std::vector<double> mass)
    : n_(n), mass_(std::move(mass)) {
  if (n < 2) throw std::invalid_argument("density grid size must be >= 2, got " + std::to_string(n));
  if (mass_.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("density needs n*n = " + std::to_string(n * n) + " cells, got " +
                                std::to_string(mass_.size()));
  }
  for (const double m : mass_) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("density mass must be finite and >= 0");
  }
  const double sum = compensated_sum(mass_);
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("density total mass must be 1, got " + std::to_string(sum));
  }
}

DiscreteCopulaDensity DiscreteCopulaDensity::uniform(int n) {
  if (n < 2) throw std::invalid_argument("density grid size must be >= 2");
  const auto cells = static_cast<std::size_t>(n) * n;
  return DiscreteCopulaDensity(n, std::vector<double>(cells, 1.0 / static_cast<double>(cells)));
}

std::size_t DiscreteCopulaDensity::index(int p, int q) const {
  if (p < 1 || p > n_ || q < 1 || q > n_) {
    throw std::out_of_range("grid rank (" + std::to_string(p) + "," + std::to_string(q) + ") outside 1.." +
                            std::to_string(n_));
  }
  return static_cast<std::size_t>(p - 1) * n_ + (q - 1);
}

double DiscreteCopulaDensity::row_sum(int p) const {
  return compensated_sum(std::span<const double>(mass_).subspan(index(p, 1), n_));
}

double DiscreteCopulaDensity::column_sum(int q) const {
  std::vector<double> column(n_);
  for (int p = 1; p <= n_; ++p) column[p - 1] = mass(p, q);
  return compensated_sum(column);
}

double DiscreteCopulaDensity::total() const { return compensated_sum(mass_); }

}  // namespace copularank
