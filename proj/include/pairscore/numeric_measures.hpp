#pragma once

#include <optional>
#include <span>
#include <vector>

namespace pairscore {

/// Product-moment correlation; missing when fewer than 3 observations or a
/// variance is zero. Inputs must be complete (no missing values).
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

enum class RankMethod { spearman, kendall };

/// Spearman = Pearson of mid-ranks; Kendall = tau-b (tie corrected).
std::optional<double> rank_correlation(std::span<const double> x, std::span<const double> y,
                                       RankMethod method);

/// Distance correlation: square root of the normalized V-statistic ratio,
/// double-centered O(n^2) formulation. Missing below 3 observations or when
/// either distance variance vanishes.
std::optional<double> distance_correlation(std::span<const double> x, std::span<const double> y);

/// Grid-search parameters for the maximal-information statistics: grid sizes
/// are bounded by r*s <= max(n^alpha, 4) and the x-axis search runs on at
/// most c * (max columns) superclumps.
struct MicParams {
    double alpha = 0.6;
    double c = 15.0;
};

struct MicResult {
    std::optional<double> mic; // max of the characteristic matrix
    std::optional<double> tic; // mean of the characteristic matrix entries
};

/// MIC/TIC via equipartition of one axis and dynamic-programming optimization
/// of the other, both orientations. Missing when n < 8 or an axis is constant.
MicResult mic_scores(std::span<const double> x, std::span<const double> y, MicParams params = {});

/// Mid-ranks with average ranks for ties (1-based).
std::vector<double> mid_ranks(std::span<const double> x);

} // namespace pairscore
