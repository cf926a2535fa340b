#include "copularank/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "copularank/errors.hpp"

namespace copularank {

double kullback(const DiscreteCopulaDensity& p, const DiscreteCopulaDensity& q) {
  if (p.n() != q.n()) {
    throw GridMismatch("grid sizes differ: " + std::to_string(p.n()) + " vs " + std::to_string(q.n()));
  }
  const auto pm = p.masses();
  const auto qm = q.masses();
  std::vector<double> terms;
  terms.reserve(pm.size());
  for (std::size_t i = 0; i < pm.size(); ++i) {
    if (pm[i] == 0.0) continue;
    if (qm[i] == 0.0) throw DivergenceUndefined("reference density has a zero cell where the sample has mass");
    terms.push_back(pm[i] * std::log(pm[i] / qm[i]));
  }
  // Rounding can leave a tiny negative total when p == q up to the last bit.
  return std::max(0.0, compensated_sum(terms));
}

double indep_statistic(const DiscreteCopulaDensity& gamma) {
  const double cells = static_cast<double>(gamma.n()) * gamma.n();
  std::vector<double> terms;
  terms.reserve(gamma.masses().size());
  for (const double m : gamma.masses()) {
    if (m > 0.0) terms.push_back(m * std::log(cells * m));
  }
  return std::max(0.0, compensated_sum(terms));
}

DiscreteCopulaDensity smooth(const DiscreteCopulaDensity& q, double pseudo_count_weight) {
  if (!(pseudo_count_weight > 0.0) || !std::isfinite(pseudo_count_weight)) {
    throw std::invalid_argument("smoothing weight must be a positive finite number");
  }
  const double cells = static_cast<double>(q.n()) * q.n();
  const double floor = pseudo_count_weight / cells;
  std::vector<double> mass(q.masses().begin(), q.masses().end());
  for (double& m : mass) m = (m + floor) / (1.0 + pseudo_count_weight);
  return DiscreteCopulaDensity(q.n(), std::move(mass));
}

double default_smoothing_weight(int n, double rank_points) {
  if (!(rank_points > 0.0)) throw std::invalid_argument("smoothing needs a positive number of rank points");
  return static_cast<double>(n) * n / rank_points;
}

}  // namespace copularank
