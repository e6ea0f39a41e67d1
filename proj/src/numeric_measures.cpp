#include "pairscore/numeric_measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "pairscore/errors.hpp"

namespace pairscore {

namespace {

void require_same_length(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail("LengthMismatch", "vectors differ in length");
}

double clamp_corr(double r) { return std::clamp(r, -1.0, 1.0); }

bool is_constant(std::span<const double> v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] != v[0]) return false;
    return true;
}

} // namespace

std::vector<double> mid_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y);
    const std::size_t n = x.size();
    if (n < 3) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return clamp_corr(sxy / std::sqrt(sxx * syy));
}

namespace {

std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 3) return std::nullopt;
    double concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0.0 && dy == 0.0) continue;
            if (dx == 0.0) ties_x += 1;
            else if (dy == 0.0) ties_y += 1;
            else if ((dx > 0) == (dy > 0)) concordant += 1;
            else discordant += 1;
        }
    }
    const double den_x = concordant + discordant + ties_x;
    const double den_y = concordant + discordant + ties_y;
    if (den_x <= 0.0 || den_y <= 0.0) return std::nullopt;
    return clamp_corr((concordant - discordant) / std::sqrt(den_x * den_y));
}

} // namespace

std::optional<double> rank_correlation(std::span<const double> x, std::span<const double> y,
                                       RankMethod method) {
    require_same_length(x, y);
    if (method == RankMethod::kendall) return kendall_tau_b(x, y);
    const auto rx = mid_ranks(x);
    const auto ry = mid_ranks(y);
    return pearson(rx, ry);
}

std::optional<double> distance_correlation(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y);
    const std::size_t n = x.size();
    if (n < 3) return std::nullopt;

    auto centered = [n](std::span<const double> v) {
        std::vector<double> d(n * n);
        std::vector<double> row_mean(n, 0.0);
        double grand = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double a = std::abs(v[i] - v[j]);
                d[i * n + j] = a;
                row_mean[i] += a;
            }
            grand += row_mean[i];
            row_mean[i] /= static_cast<double>(n);
        }
        grand /= static_cast<double>(n) * static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i * n + j] += grand - row_mean[i] - row_mean[j];
        return d;
    };

    const auto A = centered(x);
    const auto B = centered(y);
    double vxy = 0.0, vxx = 0.0, vyy = 0.0;
    for (std::size_t k = 0; k < n * n; ++k) {
        vxy += A[k] * B[k];
        vxx += A[k] * A[k];
        vyy += B[k] * B[k];
    }
    if (vxx <= 0.0 || vyy <= 0.0) return std::nullopt;
    const double r2 = vxy / std::sqrt(vxx * vyy);
    return std::sqrt(std::clamp(r2, 0.0, 1.0));
}

// --- maximal information coefficient -----------------------------------------
//
// Equipartition one axis, optimize the other by dynamic programming over
// clumps, both orientations; the characteristic-matrix cell (a, b) keeps the
// larger orientation's normalized mutual information.

namespace {

// Greedy equipartition of sorted values into at most `bins` blocks of roughly
// equal size; tied values stay in one block. Returns block id per position.
std::vector<int> equipartition_sorted(const std::vector<double>& sorted_vals, int bins) {
    const std::size_t n = sorted_vals.size();
    std::vector<int> assign(n, 0);
    if (bins < 1) bins = 1;
    double desired = static_cast<double>(n) / bins;
    int block = 0;
    std::size_t in_block = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted_vals[j + 1] == sorted_vals[i]) ++j;
        const std::size_t run = j - i + 1;
        if (in_block > 0 && block + 1 < bins &&
            std::abs(static_cast<double>(in_block + run) - desired) >=
                std::abs(static_cast<double>(in_block) - desired)) {
            ++block;
            in_block = 0;
            desired = static_cast<double>(n - i) / (bins - block);
        }
        for (std::size_t k = i; k <= j; ++k) assign[k] = block;
        in_block += run;
        i = j + 1;
    }
    return assign;
}

// Best mutual information over partitions of the primary axis into at most
// l bins (l = 2..max_cols), for a fixed secondary-axis assignment `rows`.
// `ps` must be sorted ascending; `rows[i]` is the row of point i in that order.
std::vector<double> optimize_axis(const std::vector<double>& ps, const std::vector<int>& rows,
                                  int n_rows, int max_cols, double clump_factor) {
    const std::size_t n = ps.size();

    // clump boundaries (exclusive end indices); equal primary values are
    // atomic, consecutive atoms fuse when all points share one row
    std::vector<std::size_t> ends;
    {
        std::vector<long> atom_label;
        std::vector<std::size_t> atom_end;
        long mixed = -1;
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && ps[j + 1] == ps[i]) ++j;
            bool uniform = true;
            for (std::size_t k = i; k <= j && uniform; ++k) uniform = rows[k] == rows[i];
            atom_label.push_back(uniform ? static_cast<long>(rows[i]) : mixed--);
            atom_end.push_back(j + 1);
            i = j + 1;
        }
        for (std::size_t a = 0; a < atom_end.size(); ++a) {
            const bool fuse_with_next =
                a + 1 < atom_end.size() && atom_label[a] >= 0 && atom_label[a + 1] == atom_label[a];
            if (!fuse_with_next) ends.push_back(atom_end[a]);
        }
    }

    // cap the search width with superclumps
    const int khat = std::max(2, static_cast<int>(clump_factor * max_cols));
    if (ends.size() > static_cast<std::size_t>(khat)) {
        std::vector<std::size_t> grouped;
        double desired = static_cast<double>(n) / khat;
        std::size_t in_group = 0;
        int g = 0;
        for (std::size_t c = 0; c < ends.size(); ++c) {
            const std::size_t cstart = c ? ends[c - 1] : 0;
            const std::size_t csize = ends[c] - cstart;
            if (in_group > 0 && g + 1 < khat &&
                std::abs(static_cast<double>(in_group + csize) - desired) >=
                    std::abs(static_cast<double>(in_group) - desired)) {
                grouped.push_back(cstart);
                ++g;
                in_group = 0;
                desired = static_cast<double>(n - cstart) / (khat - g);
            }
            in_group += csize;
        }
        grouped.push_back(n);
        ends = std::move(grouped);
    }

    const std::size_t k = ends.size();
    std::vector<double> best(static_cast<std::size_t>(std::max(0, max_cols - 1)), 0.0);
    if (k < 2) return best; // a single clump carries no information

    // cumulative row histograms at clump boundaries
    std::vector<double> cum((k + 1) * n_rows, 0.0);
    {
        std::size_t pt = 0;
        for (std::size_t t = 1; t <= k; ++t) {
            for (int r = 0; r < n_rows; ++r) cum[t * n_rows + r] = cum[(t - 1) * n_rows + r];
            for (; pt < ends[t - 1]; ++pt) cum[t * n_rows + rows[pt]] += 1.0;
        }
    }
    auto np = [&](std::size_t t) { return t == 0 ? 0.0 : static_cast<double>(ends[t - 1]); };

    // H(rows | span (s, t]) for all 0 <= s < t <= k
    std::vector<double> hq((k + 1) * (k + 1), 0.0);
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t t = s + 1; t <= k; ++t) {
            const double total = np(t) - np(s);
            double h = 0.0;
            for (int r = 0; r < n_rows; ++r) {
                const double c = cum[t * n_rows + r] - cum[s * n_rows + r];
                if (c > 0.0) h -= (c / total) * std::log(c / total);
            }
            hq[s * (k + 1) + t] = h;
        }
    }
    const double hq_total = hq[k]; // hq[0][k]

    // F(t, l) = max over l-bin partitions of the first t clumps of
    // -sum_b p_b H(rows|b), probabilities relative to the first np(t) points
    std::vector<double> prev(k + 1, 0.0), cur(k + 1, 0.0);
    for (std::size_t t = 1; t <= k; ++t) prev[t] = -hq[t]; // l = 1
    const int l_max = std::min<std::size_t>(max_cols, k);
    for (int l = 2; l <= l_max; ++l) {
        for (std::size_t t = static_cast<std::size_t>(l); t <= k; ++t) {
            double bestv = -HUGE_VAL;
            for (std::size_t s = static_cast<std::size_t>(l - 1); s < t; ++s) {
                const double v = (np(s) / np(t)) * prev[s] -
                                 ((np(t) - np(s)) / np(t)) * hq[s * (k + 1) + t];
                if (v > bestv) bestv = v;
            }
            cur[t] = bestv;
        }
        const double mi = hq_total + cur[k];
        // grids with at most l columns: running maximum over exact sizes
        best[l - 2] = std::max(mi, (l > 2) ? best[l - 3] : 0.0);
        std::swap(prev, cur);
    }
    for (int l = l_max + 1; l <= max_cols; ++l) best[l - 2] = best[l_max - 2];
    return best;
}

} // namespace

MicResult mic_scores(std::span<const double> x, std::span<const double> y, MicParams params) {
    require_same_length(x, y);
    const std::size_t n = x.size();
    if (n < 8) return {std::nullopt, std::nullopt};
    if (is_constant(x) || is_constant(y)) return {std::nullopt, std::nullopt};

    const double bound = std::max(std::pow(static_cast<double>(n), params.alpha), 4.0);
    const int max_q = static_cast<int>(std::floor(bound / 2.0));
    std::map<std::pair<int, int>, double> cells;

    auto run_orientation = [&](std::span<const double> primary, std::span<const double> secondary) {
        std::vector<std::size_t> by_secondary(n), by_primary(n);
        std::iota(by_secondary.begin(), by_secondary.end(), 0);
        std::iota(by_primary.begin(), by_primary.end(), 0);
        std::sort(by_secondary.begin(), by_secondary.end(), [&](std::size_t a, std::size_t b) {
            if (secondary[a] != secondary[b]) return secondary[a] < secondary[b];
            if (primary[a] != primary[b]) return primary[a] < primary[b];
            return a < b;
        });
        std::sort(by_primary.begin(), by_primary.end(), [&](std::size_t a, std::size_t b) {
            if (primary[a] != primary[b]) return primary[a] < primary[b];
            if (secondary[a] != secondary[b]) return secondary[a] < secondary[b];
            return a < b;
        });
        std::vector<double> sec_sorted(n);
        for (std::size_t i = 0; i < n; ++i) sec_sorted[i] = secondary[by_secondary[i]];

        std::vector<double> ps(n);
        for (std::size_t i = 0; i < n; ++i) ps[i] = primary[by_primary[i]];

        for (int q = 2; q <= max_q; ++q) {
            const int max_cols = static_cast<int>(std::floor(bound / q));
            if (max_cols < 2) break;
            const auto blocks = equipartition_sorted(sec_sorted, q);
            std::vector<int> row_of(n);
            for (std::size_t i = 0; i < n; ++i) row_of[by_secondary[i]] = blocks[i];
            std::vector<int> rs(n);
            for (std::size_t i = 0; i < n; ++i) rs[i] = row_of[by_primary[i]];

            const auto best = optimize_axis(ps, rs, q, max_cols, params.c);
            for (int l = 2; l <= max_cols; ++l) {
                const double denom = std::log(static_cast<double>(std::min(l, q)));
                const double val = std::clamp(best[l - 2] / denom, 0.0, 1.0);
                const auto key = std::make_pair(std::min(l, q), std::max(l, q));
                auto [it, inserted] = cells.emplace(key, val);
                if (!inserted && val > it->second) it->second = val;
            }
        }
    };
    run_orientation(x, y);
    run_orientation(y, x);

    if (cells.empty()) return {std::nullopt, std::nullopt};
    double mx = 0.0, sum = 0.0;
    for (const auto& [key, v] : cells) {
        (void)key;
        mx = std::max(mx, v);
        sum += v;
    }
    return {mx, sum / static_cast<double>(cells.size())};
}

} // namespace pairscore
