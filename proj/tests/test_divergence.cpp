#include <algorithm>
#include <cmath>
#include <numeric>

#include "copularank/divergence.hpp"
#include "copularank/errors.hpp"
#include "copularank/random.hpp"
#include "doctest.h"

using namespace copularank;

namespace {

DiscreteCopulaDensity grid(int n, std::vector<double> mass) { return {n, std::move(mass)}; }

DiscreteCopulaDensity random_density(int n, RandomStream& stream, bool with_zeros) {
  std::vector<double> mass(static_cast<std::size_t>(n * n));
  for (double& m : mass) m = (with_zeros && stream.uniform01() < 0.2) ? 0.0 : stream.uniform01();
  mass[0] += 0.1;
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  for (double& m : mass) m /= total;
  return {n, mass};
}

// Relabels the grid: cell (p, q) moves to (perm[p], perm[q]).
DiscreteCopulaDensity relabel(const DiscreteCopulaDensity& d, const std::vector<int>& perm) {
  const int n = d.n();
  std::vector<double> mass(static_cast<std::size_t>(n * n));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) mass[perm[p] * n + perm[q]] = d.mass(p + 1, q + 1);
  return {n, mass};
}

}  // namespace

TEST_CASE("density construction checks") {
  CHECK_THROWS_AS(grid(1, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(grid(2, {0.5, 0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(grid(2, {0.5, 0.6, -0.1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(grid(2, {0.5, 0.5, 0.5, 0.0}), std::invalid_argument);
  const DiscreteCopulaDensity u = DiscreteCopulaDensity::uniform(4);
  CHECK(u.mass(3, 2) == 1.0 / 16);
  CHECK(u.total() == doctest::Approx(1.0));
}

TEST_CASE("kullback of the diagonal against uniform is log 2") {
  const auto p = grid(2, {0.5, 0, 0, 0.5});
  CHECK(kullback(p, DiscreteCopulaDensity::uniform(2)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(indep_statistic(p) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(kullback(p, p) == 0.0);
  // comonotone grid of size n: log n
  for (const int n : {3, 5, 8}) {
    std::vector<double> mass(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) mass[i * n + i] = 1.0 / n;
    CHECK(indep_statistic(grid(n, mass)) == doctest::Approx(std::log(n)).epsilon(1e-13));
  }
}

TEST_CASE("kullback errors") {
  CHECK_THROWS_AS(kullback(DiscreteCopulaDensity::uniform(2), DiscreteCopulaDensity::uniform(3)), GridMismatch);
  CHECK_THROWS_AS(kullback(DiscreteCopulaDensity::uniform(2), grid(2, {0.5, 0, 0, 0.5})), DivergenceUndefined);
  // zero on both sides is fine
  CHECK(kullback(grid(2, {0.5, 0, 0, 0.5}), grid(2, {0.25, 0, 0, 0.75})) ==
        doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
}

TEST_CASE("smoothing") {
  const auto s = smooth(grid(2, {1, 0, 0, 0}), 1.0);
  CHECK(s.mass(1, 1) == doctest::Approx(5.0 / 8));
  CHECK(s.mass(1, 2) == doctest::Approx(1.0 / 8));
  CHECK(s.mass(2, 1) == doctest::Approx(1.0 / 8));
  CHECK(s.mass(2, 2) == doctest::Approx(1.0 / 8));
  const auto u = smooth(DiscreteCopulaDensity::uniform(3), 0.37);
  for (const double m : u.masses()) CHECK(m == doctest::Approx(1.0 / 9).epsilon(1e-15));
  CHECK_THROWS_AS(smooth(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(smooth(s, -1.0), std::invalid_argument);
  CHECK(default_smoothing_weight(5, 2500.0) == doctest::Approx(0.01));

  RandomStream stream(1, 0);
  for (int t = 0; t < 50; ++t) {
    const auto d = random_density(2 + static_cast<int>(stream.below(10)), stream, true);
    const double eps = 1e-3 + stream.uniform01();
    const auto sm = smooth(d, eps);
    CHECK(sm.total() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < d.masses().size(); ++i) {
      CHECK(sm.masses()[i] >= eps / (d.n() * d.n() * (1 + eps)) * (1 - 1e-12));
      for (std::size_t j = 0; j < d.masses().size(); ++j) {
        if (d.masses()[i] < d.masses()[j]) CHECK(sm.masses()[i] < sm.masses()[j]);
      }
    }
  }
}

TEST_CASE("Gibbs inequality on random densities") {
  RandomStream stream(2, 0);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(stream.below(12));
    const auto p = random_density(n, stream, true);
    const auto q = random_density(n, stream, false);
    CHECK(kullback(p, q) > 0.0);
    CHECK(kullback(q, q) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(indep_statistic(p) >= 0.0);
  }
  CHECK(indep_statistic(DiscreteCopulaDensity::uniform(7)) == doctest::Approx(0.0));
}

TEST_CASE("indep_statistic is invariant under grid relabelling") {
  RandomStream stream(3, 0);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(stream.below(10));
    const auto p = random_density(n, stream, true);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), stream);
    CHECK(indep_statistic(relabel(p, perm)) == doctest::Approx(indep_statistic(p)).epsilon(1e-12));
  }
}
