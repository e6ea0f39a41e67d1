#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pairscore/dataset.hpp"

namespace pairscore {

/// Cross-tabulation over the observed level grid (empty levels dropped),
/// with margins, chi-squared, and the concordance/discordance pair counts
/// used by the ordinal measures. ties_x / ties_y count pairs tied on exactly
/// one of the two variables.
struct ContingencyTable {
    std::size_t n_rows_obs = 0, n_cols_obs = 0;
    std::vector<double> counts; // row-major, n_rows_obs x n_cols_obs
    std::vector<double> row_margins, col_margins;
    double n = 0.0;
    double chi2 = 0.0;
    double concordant = 0.0, discordant = 0.0;
    double ties_x = 0.0, ties_y = 0.0;

    double at(std::size_t i, std::size_t j) const { return counts[i * n_cols_obs + j]; }
};

/// Build the table from two complete factor columns of equal length.
ContingencyTable contingency(const Column& a, const Column& b);

enum class ConcordanceMethod { tauA, tauB, tauC, gkGamma };

std::optional<double> concordance_measure(const ContingencyTable& t, ConcordanceMethod method);

/// Kendall's coefficient of concordance of the two rank vectors (mid-ranked
/// level indices), rescaled linearly from [0,1] to the registered [-1,1].
std::optional<double> kendall_w(const Column& a, const Column& b);

/// Mean of the two directional Goodman-Kruskal tau values.
std::optional<double> gk_tau(const ContingencyTable& t);

/// Mean of the two directional Theil uncertainty coefficients (natural log).
std::optional<double> uncertainty_coef(const ContingencyTable& t);

/// Pearson's contingency coefficient rescaled by its attainable maximum
/// sqrt((m-1)/m), m = min(rows, cols).
std::optional<double> contingency_coef(const ContingencyTable& t);

/// Two-step polychoric correlation: normal-quantile thresholds from the
/// margins, then the latent correlation maximizing the multinomial
/// log-likelihood of bivariate-normal rectangle probabilities.
std::optional<double> polychoric(const Column& a, const Column& b);

/// Two-step polyserial correlation between an ordered factor and a numeric
/// variable (standardized), same bracketing optimizer as polychoric.
std::optional<double> polyserial(const Column& ordinal, const Column& numeric);

/// Canonical correlation by pair type: |pearson| for nn, square root of the
/// one-way between-group variance fraction for fn, first correspondence
/// correlation of the standardized contingency matrix for ff.
std::optional<double> canonical_correlation(const Column& a, const Column& b);

/// Alternating conditional expectations: transform both variables (category
/// means for factors, local-linear running smoother for numerics) to maximize
/// the correlation between transforms; reports that correlation in [0,1].
std::optional<double> ace_correlation(const Column& a, const Column& b);

/// Normalized mutual information I/sqrt(HxHy) maximized over equal-frequency
/// discretizations (2..ceil(n^0.6) bins) of each numeric side.
std::optional<double> max_nmi(const Column& a, const Column& b);

/// Shared helper: equal-frequency bin assignment with tied values kept
/// together; bin ids are dense from 0.
std::vector<int> equal_frequency_bins(std::span<const double> v, int bins);

} // namespace pairscore
