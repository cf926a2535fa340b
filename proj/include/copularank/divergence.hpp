#pragma once

#include "copularank/density.hpp"

namespace copularank {

/// Kullback divergence sum p log(p/q) (natural log, 0 log 0 = 0).
/// Throws GridMismatch if the grids differ and DivergenceUndefined if q has a
/// zero cell where p is positive.
double kullback(const DiscreteCopulaDensity& p, const DiscreteCopulaDensity& q);

/// kullback(gamma, uniform) = sum gamma_pq log(n^2 gamma_pq).
double indep_statistic(const DiscreteCopulaDensity& gamma);

/// Mixes in weight epsilon of the uniform grid:
/// mass'(p,q) = (mass(p,q) + epsilon/n^2) / (1 + epsilon). Requires epsilon > 0.
DiscreteCopulaDensity smooth(const DiscreteCopulaDensity& q, double pseudo_count_weight);

/// One pseudo-observation per cell: n^2 / rank_points.
double default_smoothing_weight(int n, double rank_points);

}  // namespace copularank
