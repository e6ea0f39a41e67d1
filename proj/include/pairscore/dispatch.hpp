#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pairscore/dataset.hpp"
#include "pairscore/numeric_measures.hpp"
#include "pairscore/pairwise.hpp"

namespace pairscore {

/// Options forwarded to the underlying calculators.
struct MeasureOptions {
    std::string cor_method = "pearson";             // pearson | spearman | kendall
    std::vector<std::string> mine_methods = {"MIC"}; // MIC and/or TIC
    MicParams mic;
};

/// One measure over all eligible pairs of the dataset, group "all".
/// Eligibility follows the registry flags; ordinal measures require ordered
/// factors. Multi-valued measures (mine, scagnostics) emit one row per score.
PairwiseTable apply_measure(const Dataset& d, const std::string& measure,
                            const MeasureOptions& options = {});

/// Row-wise union of apply_measure over several measures.
PairwiseTable pairwise_multi(const Dataset& d, const std::vector<std::string>& measures,
                             const MeasureOptions& options = {});

/// Grouped scores: one row per (pair, level of `by`), computed on the level's
/// subset, plus group "all" rows unless ungrouped is false. Degenerate
/// subsets yield missing values, never dropped rows.
PairwiseTable pairwise_by(const Dataset& d, const std::string& by, const std::string& measure,
                          bool ungrouped = true, const MeasureOptions& options = {});

/// Type-based dispatch: which measure scores each pair type. oo applies when
/// both factors are ordered.
struct ScoreControl {
    std::string nn = "pearson";
    std::string fn = "cancor";
    std::string ff = "cancor";
    std::string oo = "polychor";
};

PairwiseTable pairwise_scores(const Dataset& d, const ScoreControl& control = {},
                              const std::optional<std::string>& by = std::nullopt,
                              bool ungrouped = true, const MeasureOptions& options = {});

/// Resolve a measure identifier: registry names plus the pair_cor aliases
/// ("pearson", "spearman", "kendall"). Throws UnknownMeasure.
const MethodInfo& resolve_measure(const std::string& id, MeasureOptions& options);

} // namespace pairscore
