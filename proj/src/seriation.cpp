#include "pairscore/seriation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pairscore/errors.hpp"

namespace pairscore {

SummaryMode summary_mode_from_order_name(const std::string& name) {
    if (name == "seriate_max_abs") return SummaryMode::max_abs;
    if (name == "seriate_max_diff") return SummaryMode::max_diff;
    fail("FormatError", "unknown order '" + name + "' (expected seriate_max_abs or seriate_max_diff)");
}

std::map<std::pair<std::string, std::string>, double> pair_summary(const PairwiseTable& t,
                                                                   SummaryMode mode) {
    struct Acc {
        double max_abs = 0.0, lo = 0.0, hi = 0.0;
        bool any = false;
    };
    std::map<std::pair<std::string, std::string>, Acc> acc;
    for (const auto& r : t.rows()) {
        auto& a = acc[{r.x, r.y}];
        if (!r.value) continue;
        const double v = *r.value;
        if (!a.any) {
            a.lo = a.hi = v;
            a.any = true;
        } else {
            a.lo = std::min(a.lo, v);
            a.hi = std::max(a.hi, v);
        }
        a.max_abs = std::max(a.max_abs, std::abs(v));
    }
    std::map<std::pair<std::string, std::string>, double> out;
    for (const auto& [key, a] : acc) {
        if (!a.any) out[key] = 0.0;
        else out[key] = mode == SummaryMode::max_abs ? a.max_abs : a.hi - a.lo;
    }
    return out;
}

Dendrogram average_linkage(const std::vector<double>& dist, std::size_t k) {
    Dendrogram d;
    d.n_leaves = k;
    d.nodes.resize(k);
    if (k == 0) return d;
    if (k == 1) {
        d.root = 0;
        return d;
    }

    struct Cluster {
        int node;
        std::vector<std::size_t> members;
        bool alive = true;
    };
    std::vector<Cluster> clusters;
    clusters.reserve(2 * k);
    for (std::size_t i = 0; i < k; ++i) clusters.push_back({static_cast<int>(i), {i}, true});

    auto cluster_dist = [&](const Cluster& a, const Cluster& b) {
        double s = 0.0;
        for (std::size_t i : a.members)
            for (std::size_t j : b.members) s += dist[i * k + j];
        return s / (static_cast<double>(a.members.size()) * static_cast<double>(b.members.size()));
    };

    std::size_t alive = k;
    while (alive > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            if (!clusters[i].alive) continue;
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                if (!clusters[j].alive) continue;
                const double dd = cluster_dist(clusters[i], clusters[j]);
                if (dd < best) {
                    best = dd;
                    bi = i;
                    bj = j;
                }
            }
        }
        Dendrogram::Node node;
        node.left = clusters[bi].node;
        node.right = clusters[bj].node;
        node.height = best;
        d.nodes.push_back(node);

        Cluster merged;
        merged.node = static_cast<int>(d.nodes.size()) - 1;
        merged.members = clusters[bi].members;
        merged.members.insert(merged.members.end(), clusters[bj].members.begin(),
                              clusters[bj].members.end());
        clusters[bi].alive = false;
        clusters[bj].alive = false;
        clusters.push_back(std::move(merged));
        --alive;
    }
    d.root = static_cast<int>(d.nodes.size()) - 1;
    return d;
}

namespace {

void collect_order(const Dendrogram& d, int node, unsigned long long mask, int& internal_index,
                   std::vector<std::size_t>& out) {
    const auto& nd = d.nodes[node];
    if (nd.left < 0) {
        out.push_back(static_cast<std::size_t>(node));
        return;
    }
    const bool flip = (mask >> internal_index) & 1ULL;
    ++internal_index;
    const int first = flip ? nd.right : nd.left;
    const int second = flip ? nd.left : nd.right;
    collect_order(d, first, mask, internal_index, out);
    collect_order(d, second, mask, internal_index, out);
}

} // namespace

std::vector<std::vector<std::size_t>> dendrogram_orders(const Dendrogram& d) {
    std::vector<std::vector<std::size_t>> orders;
    if (d.root < 0) return orders;
    const std::size_t internal = d.nodes.size() - d.n_leaves;
    const unsigned long long count = 1ULL << internal;
    orders.reserve(count);
    for (unsigned long long mask = 0; mask < count; ++mask) {
        std::vector<std::size_t> order;
        order.reserve(d.n_leaves);
        int idx = 0;
        collect_order(d, d.root, mask, idx, order);
        orders.push_back(std::move(order));
    }
    return orders;
}

double lazy_path_length(const std::vector<std::size_t>& order, const std::vector<double>& dist,
                        std::size_t k) {
    double lpl = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
        lpl += static_cast<double>(k - 1 - i) * dist[order[i] * k + order[i + 1]];
    return lpl;
}

namespace {

// greedy subtree orientation for large trees: at each merge try the four
// orientations of the two child sequences, scored by the lazy path length of
// the concatenation taken as a standalone order
std::vector<std::size_t> greedy_order(const Dendrogram& d, int node, const std::vector<double>& dist,
                                      std::size_t k) {
    const auto& nd = d.nodes[node];
    if (nd.left < 0) return {static_cast<std::size_t>(node)};
    auto left = greedy_order(d, nd.left, dist, k);
    auto right = greedy_order(d, nd.right, dist, k);

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_seq;
    for (int fl = 0; fl < 2; ++fl) {
        for (int fr = 0; fr < 2; ++fr) {
            std::vector<std::size_t> l = left, r = right;
            if (fl) std::reverse(l.begin(), l.end());
            if (fr) std::reverse(r.begin(), r.end());
            std::vector<std::size_t> seq = l;
            seq.insert(seq.end(), r.begin(), r.end());
            const double score = lazy_path_length(seq, dist, k);
            if (score < best) {
                best = score;
                best_seq = std::move(seq);
            }
        }
    }
    return best_seq;
}

} // namespace

std::vector<std::string> seriate_variables(const PairwiseTable& t, SummaryMode mode) {
    const auto vars = t.variables();
    const std::size_t k = vars.size();
    if (k <= 1) return vars;

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < k; ++i) index[vars[i]] = i;

    const auto summaries = pair_summary(t, mode);
    double max_summary = 0.0;
    for (const auto& [key, v] : summaries) max_summary = std::max(max_summary, v);

    std::vector<double> dist(k * k, 1.0);
    for (std::size_t i = 0; i < k; ++i) dist[i * k + i] = 0.0;
    if (max_summary > 0.0) {
        for (const auto& [key, v] : summaries) {
            const std::size_t i = index[key.first], j = index[key.second];
            dist[i * k + j] = dist[j * k + i] = 1.0 - v / max_summary;
        }
    }

    const Dendrogram d = average_linkage(dist, k);

    std::vector<std::size_t> chosen;
    if (k <= 12) {
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::string> best_names;
        for (auto& order : dendrogram_orders(d)) {
            const double lpl = lazy_path_length(order, dist, k);
            std::vector<std::string> names(order.size());
            for (std::size_t i = 0; i < order.size(); ++i) names[i] = vars[order[i]];
            if (lpl < best - 1e-12 || (std::abs(lpl - best) <= 1e-12 && names < best_names)) {
                best = lpl;
                best_names = std::move(names);
                chosen = std::move(order);
            }
        }
    } else {
        chosen = greedy_order(d, d.root, dist, k);
    }

    std::vector<std::string> out(chosen.size());
    for (std::size_t i = 0; i < chosen.size(); ++i) out[i] = vars[chosen[i]];
    return out;
}

std::vector<std::pair<std::string, std::string>> order_pairs_linear(const PairwiseTable& t,
                                                                    SummaryMode mode) {
    const auto summaries = pair_summary(t, mode);
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(summaries.size());
    for (const auto& [key, v] : summaries) {
        (void)v;
        pairs.push_back(key);
    }
    std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
        const double sa = summaries.at(a), sb = summaries.at(b);
        if (sa != sb) return sa > sb;
        return a < b;
    });
    return pairs;
}

} // namespace pairscore
