#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pairscore/pairwise.hpp"

namespace pairscore {

enum class SummaryMode { max_abs, max_diff };

SummaryMode summary_mode_from_order_name(const std::string& name); // "seriate_max_abs" / "seriate_max_diff"

/// Per-pair summary: max |value| or max - min over non-missing rows;
/// all-missing pairs summarize to 0.
std::map<std::pair<std::string, std::string>, double> pair_summary(const PairwiseTable& t,
                                                                   SummaryMode mode);

/// Binary merge tree over variables; leaves are 0..n_leaves-1, internal nodes
/// follow. Average-linkage heights are non-decreasing along root paths.
struct Dendrogram {
    struct Node {
        int left = -1, right = -1; // -1 marks a leaf
        double height = 0.0;
    };
    std::vector<Node> nodes;
    int root = -1;
    std::size_t n_leaves = 0;
};

/// Average-linkage agglomerative clustering of a symmetric dissimilarity
/// matrix (row-major k x k), deterministic tie-breaks.
Dendrogram average_linkage(const std::vector<double>& dist, std::size_t k);

/// All leaf orders reachable by flipping internal nodes (2^(k-1) of them).
std::vector<std::vector<std::size_t>> dendrogram_orders(const Dendrogram& d);

/// Lazy path length: sum over consecutive leaves of (k - i) * d(o_i, o_{i+1}),
/// weighting early steps most.
double lazy_path_length(const std::vector<std::size_t>& order, const std::vector<double>& dist,
                        std::size_t k);

/// Variable order for the matrix display: average-linkage tree on
/// 1 - summary/max(summary), leaf order minimizing lazy path length (exact
/// over all flips for k <= 12, greedy subtree orientation above), ties by
/// variable name.
std::vector<std::string> seriate_variables(const PairwiseTable& t, SummaryMode mode);

/// Pair order for the linear display: descending summary, ties by (x, y).
std::vector<std::pair<std::string, std::string>> order_pairs_linear(const PairwiseTable& t,
                                                                    SummaryMode mode);

} // namespace pairscore
