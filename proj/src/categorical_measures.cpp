#include "pairscore/categorical_measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pairscore/errors.hpp"
#include "pairscore/normal.hpp"
#include "pairscore/numeric_measures.hpp"

namespace pairscore {

namespace {

// observed level codes in level order with a dense re-index
std::vector<int> dense_codes(const Column& c, std::size_t& n_levels) {
    int max_code = -1;
    for (int v : c.codes) max_code = std::max(max_code, v);
    std::vector<int> remap(static_cast<std::size_t>(max_code + 1), -1);
    for (int v : c.codes)
        if (v >= 0) remap[v] = 0;
    int next = 0;
    for (auto& r : remap)
        if (r == 0) r = next++;
    n_levels = static_cast<std::size_t>(next);
    std::vector<int> out(c.codes.size());
    for (std::size_t i = 0; i < c.codes.size(); ++i) out[i] = remap[c.codes[i]];
    return out;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

ContingencyTable contingency(const Column& a, const Column& b) {
    if (a.size() != b.size()) fail("LengthMismatch", "columns differ in length");
    if (a.size() == 0) fail("EmptyInput", "no complete observations");
    if (!a.is_factor() || !b.is_factor())
        fail("LengthMismatch", "contingency tables need two factor columns");

    ContingencyTable t;
    std::size_t r, c;
    const auto ca = dense_codes(a, r);
    const auto cb = dense_codes(b, c);
    t.n_rows_obs = r;
    t.n_cols_obs = c;
    t.counts.assign(r * c, 0.0);
    for (std::size_t i = 0; i < ca.size(); ++i) t.counts[ca[i] * c + cb[i]] += 1.0;

    t.row_margins.assign(r, 0.0);
    t.col_margins.assign(c, 0.0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            t.row_margins[i] += t.at(i, j);
            t.col_margins[j] += t.at(i, j);
        }
    t.n = static_cast<double>(ca.size());

    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const double expected = t.row_margins[i] * t.col_margins[j] / t.n;
            if (expected > 0.0) {
                const double d = t.at(i, j) - expected;
                t.chi2 += d * d / expected;
            }
        }

    // concordance counts by level-order enumeration over cells
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const double nij = t.at(i, j);
            if (nij == 0.0) continue;
            for (std::size_t k = i; k < r; ++k) {
                for (std::size_t l = 0; l < c; ++l) {
                    if (k == i && l <= j) continue;
                    const double nkl = t.at(k, l);
                    if (nkl == 0.0) continue;
                    if (k == i) t.ties_x += nij * nkl;       // same row, different column
                    else if (l == j) t.ties_y += nij * nkl;  // same column, different row
                    else if (l > j) t.concordant += nij * nkl;
                    else t.discordant += nij * nkl;
                }
            }
        }
    }
    return t;
}

std::optional<double> concordance_measure(const ContingencyTable& t, ConcordanceMethod method) {
    const double C = t.concordant, D = t.discordant;
    switch (method) {
        case ConcordanceMethod::tauA: {
            const double pairs = t.n * (t.n - 1.0) / 2.0;
            if (pairs <= 0.0) return std::nullopt;
            return std::clamp((C - D) / pairs, -1.0, 1.0);
        }
        case ConcordanceMethod::tauB: {
            const double dx = C + D + t.ties_x;
            const double dy = C + D + t.ties_y;
            if (dx <= 0.0 || dy <= 0.0) return std::nullopt;
            return std::clamp((C - D) / std::sqrt(dx * dy), -1.0, 1.0);
        }
        case ConcordanceMethod::tauC: {
            const double m = static_cast<double>(std::min(t.n_rows_obs, t.n_cols_obs));
            if (m < 2.0 || t.n <= 0.0) return std::nullopt;
            return std::clamp((C - D) * 2.0 * m / (t.n * t.n * (m - 1.0)), -1.0, 1.0);
        }
        case ConcordanceMethod::gkGamma: {
            if (C + D <= 0.0) return std::nullopt;
            return std::clamp((C - D) / (C + D), -1.0, 1.0);
        }
    }
    return std::nullopt;
}

std::optional<double> kendall_w(const Column& a, const Column& b) {
    if (a.size() != b.size()) fail("LengthMismatch", "columns differ in length");
    const std::size_t n = a.size();
    if (n == 0) fail("EmptyInput", "no complete observations");
    if (n < 2) return std::nullopt;

    auto rank_of = [](const Column& c) {
        std::vector<double> v(c.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            v[i] = c.is_factor() ? static_cast<double>(c.codes[i]) : c.numeric[i];
        return mid_ranks(v);
    };
    const auto r1 = rank_of(a);
    const auto r2 = rank_of(b);

    auto tie_term = [](const std::vector<double>& r) {
        std::vector<double> s(r);
        std::sort(s.begin(), s.end());
        double t = 0.0;
        std::size_t i = 0;
        while (i < s.size()) {
            std::size_t j = i;
            while (j + 1 < s.size() && s[j + 1] == s[i]) ++j;
            const double g = static_cast<double>(j - i + 1);
            t += g * g * g - g;
            i = j + 1;
        }
        return t;
    };
    auto variance = [](const std::vector<double>& r) {
        double m = std::accumulate(r.begin(), r.end(), 0.0) / r.size();
        double v = 0.0;
        for (double x : r) v += (x - m) * (x - m);
        return v;
    };
    if (variance(r1) <= 0.0 || variance(r2) <= 0.0) return std::nullopt;

    const double m = 2.0;
    const double dn = static_cast<double>(n);
    double sum_sq = 0.0, mean_r = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_r += r1[i] + r2[i];
    mean_r /= dn;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = r1[i] + r2[i] - mean_r;
        sum_sq += d * d;
    }
    const double denom = m * m * (dn * dn * dn - dn) - m * (tie_term(r1) + tie_term(r2));
    if (denom <= 0.0) return std::nullopt;
    const double w = 12.0 * sum_sq / denom;
    return std::clamp(2.0 * w - 1.0, -1.0, 1.0);
}

std::optional<double> gk_tau(const ContingencyTable& t) {
    // proportional reduction in prediction error, each direction
    auto directional = [&](bool rows_predict_cols) -> std::optional<double> {
        const std::size_t r = t.n_rows_obs, c = t.n_cols_obs;
        const auto& pred_margin = rows_predict_cols ? t.row_margins : t.col_margins;
        const auto& resp_margin = rows_predict_cols ? t.col_margins : t.row_margins;
        double e_uncond = 1.0;
        for (double m : resp_margin) e_uncond -= (m / t.n) * (m / t.n);
        if (e_uncond <= 0.0) return std::nullopt;
        double within = 0.0;
        const std::size_t np = rows_predict_cols ? r : c;
        const std::size_t nr = rows_predict_cols ? c : r;
        for (std::size_t p = 0; p < np; ++p) {
            if (pred_margin[p] <= 0.0) continue;
            for (std::size_t q = 0; q < nr; ++q) {
                const double nij = rows_predict_cols ? t.at(p, q) : t.at(q, p);
                within += nij * nij / (t.n * pred_margin[p]);
            }
        }
        const double e_cond = 1.0 - within;
        return (e_uncond - e_cond) / e_uncond;
    };
    const auto d1 = directional(true);
    const auto d2 = directional(false);
    if (!d1 || !d2) return std::nullopt;
    return clamp01((*d1 + *d2) / 2.0);
}

namespace {

double entropy_counts(const std::vector<double>& counts, double n) {
    double h = 0.0;
    for (double c : counts)
        if (c > 0.0) h -= (c / n) * std::log(c / n);
    return h;
}

} // namespace

std::optional<double> uncertainty_coef(const ContingencyTable& t) {
    const double hx = entropy_counts(t.row_margins, t.n);
    const double hy = entropy_counts(t.col_margins, t.n);
    if (hx <= 0.0 || hy <= 0.0) return std::nullopt;
    double hxy = 0.0;
    for (double c : t.counts)
        if (c > 0.0) hxy -= (c / t.n) * std::log(c / t.n);
    const double mi = std::max(0.0, hx + hy - hxy);
    return clamp01((mi / hx + mi / hy) / 2.0);
}

std::optional<double> contingency_coef(const ContingencyTable& t) {
    const double m = static_cast<double>(std::min(t.n_rows_obs, t.n_cols_obs));
    if (m < 2.0) return std::nullopt;
    const double c = std::sqrt(t.chi2 / (t.chi2 + t.n));
    const double c_max = std::sqrt((m - 1.0) / m);
    return clamp01(c / c_max);
}

// --- latent-normal correlations ----------------------------------------------

namespace {

// thresholds at the normal quantiles of cumulative margin proportions
std::vector<double> margin_thresholds(const std::vector<double>& margins, double n) {
    std::vector<double> tau;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < margins.size(); ++i) {
        cum += margins[i];
        tau.push_back(norm_quantile(cum / n));
    }
    return tau;
}

// P(X <= tau_x[i-1..i], Y <= tau_y[j-1..j]) rectangle probability with the
// open boundaries at +-infinity
double rectangle_prob(const std::vector<double>& tx, const std::vector<double>& ty, std::size_t i,
                      std::size_t j, double rho) {
    auto cum = [&](long a, long b) -> double {
        // a indexes x thresholds (-1 => -inf, tx.size() => +inf); same for b
        if (a < 0 || b < 0) return 0.0;
        const bool x_inf = a >= static_cast<long>(tx.size());
        const bool y_inf = b >= static_cast<long>(ty.size());
        if (x_inf && y_inf) return 1.0;
        if (x_inf) return norm_cdf(ty[b]);
        if (y_inf) return norm_cdf(tx[a]);
        return bivariate_norm_cdf(tx[a], ty[b], rho);
    };
    const long a = static_cast<long>(i), b = static_cast<long>(j);
    return cum(a, b) - cum(a - 1, b) - cum(a, b - 1) + cum(a - 1, b - 1);
}

} // namespace

std::optional<double> polychoric(const Column& a, const Column& b) {
    if (a.size() != b.size()) fail("LengthMismatch", "columns differ in length");
    if (a.size() == 0) return std::nullopt;
    const ContingencyTable t = contingency(a, b);
    const std::size_t r = t.n_rows_obs, c = t.n_cols_obs;
    if (r < 2 || c < 2) return std::nullopt;

    const auto tx = margin_thresholds(t.row_margins, t.n);
    const auto ty = margin_thresholds(t.col_margins, t.n);

    auto neg_loglik = [&](double rho) {
        double ll = 0.0;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                const double nij = t.at(i, j);
                if (nij <= 0.0) continue;
                const double p = std::max(rectangle_prob(tx, ty, i, j, rho), 1e-300);
                ll += nij * std::log(p);
            }
        return -ll;
    };
    const double rho = brent_minimize(neg_loglik, -0.999, 0.999, 1e-9);
    return std::clamp(rho, -1.0, 1.0);
}

std::optional<double> polyserial(const Column& ordinal, const Column& numeric) {
    if (ordinal.size() != numeric.size()) fail("LengthMismatch", "columns differ in length");
    if (!ordinal.is_factor() && numeric.is_factor()) return polyserial(numeric, ordinal);
    if (!ordinal.is_factor() || numeric.is_factor())
        fail("LengthMismatch", "polyserial needs one ordinal and one numeric column");
    const std::size_t n = ordinal.size();
    if (n < 3) return std::nullopt;

    std::size_t k_levels;
    const auto codes = dense_codes(ordinal, k_levels);
    if (k_levels < 2) return std::nullopt;

    std::vector<double> margins(k_levels, 0.0);
    for (int cd : codes) margins[cd] += 1.0;
    const auto tau = margin_thresholds(margins, static_cast<double>(n));

    double mean = 0.0;
    for (double v : numeric.numeric) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : numeric.numeric) ss += (v - mean) * (v - mean);
    if (ss <= 0.0) return std::nullopt;
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (numeric.numeric[i] - mean) / sd;

    auto neg_loglik = [&](double rho) {
        const double s = std::sqrt(1.0 - rho * rho);
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const int k = codes[i];
            const double hi = (k == static_cast<int>(k_levels) - 1)
                                  ? 1.0
                                  : norm_cdf((tau[k] - rho * z[i]) / s);
            const double lo = (k == 0) ? 0.0 : norm_cdf((tau[k - 1] - rho * z[i]) / s);
            ll += std::log(std::max(hi - lo, 1e-300));
        }
        return -ll;
    };
    const double rho = brent_minimize(neg_loglik, -0.999, 0.999, 1e-9);
    return std::clamp(rho, -1.0, 1.0);
}

// --- canonical correlation ----------------------------------------------------

namespace {

// largest eigenvalue of a small symmetric PSD matrix by cyclic Jacobi
double largest_eigenvalue_sym(std::vector<double> m, std::size_t d) {
    if (d == 0) return 0.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) off += m[p * d + q] * m[p * d + q];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = m[p * d + q];
                if (std::abs(apq) < 1e-18) continue;
                const double app = m[p * d + p], aqq = m[q * d + q];
                const double theta = 0.5 * (aqq - app) / apq;
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cth = 1.0 / std::sqrt(t * t + 1.0);
                const double sth = t * cth;
                for (std::size_t k = 0; k < d; ++k) {
                    const double mkp = m[k * d + p], mkq = m[k * d + q];
                    m[k * d + p] = cth * mkp - sth * mkq;
                    m[k * d + q] = sth * mkp + cth * mkq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double mpk = m[p * d + k], mqk = m[q * d + k];
                    m[p * d + k] = cth * mpk - sth * mqk;
                    m[q * d + k] = sth * mpk + cth * mqk;
                }
            }
        }
    }
    double best = 0.0;
    for (std::size_t i = 0; i < d; ++i) best = std::max(best, m[i * d + i]);
    return best;
}

std::optional<double> cancor_fn(const Column& factor, const Column& numeric) {
    std::size_t k_levels;
    const auto codes = dense_codes(factor, k_levels);
    if (k_levels < 2) return std::nullopt;
    const std::size_t n = codes.size();
    if (n < 2) return std::nullopt;

    double grand = 0.0;
    for (double v : numeric.numeric) grand += v;
    grand /= static_cast<double>(n);
    std::vector<double> sum(k_levels, 0.0), cnt(k_levels, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        sum[codes[i]] += numeric.numeric[i];
        cnt[codes[i]] += 1.0;
    }
    double sst = 0.0;
    for (double v : numeric.numeric) sst += (v - grand) * (v - grand);
    if (sst <= 0.0) return std::nullopt;
    double ssb = 0.0;
    for (std::size_t g = 0; g < k_levels; ++g) {
        const double mean_g = sum[g] / cnt[g];
        ssb += cnt[g] * (mean_g - grand) * (mean_g - grand);
    }
    return std::sqrt(clamp01(ssb / sst));
}

std::optional<double> cancor_ff(const Column& a, const Column& b) {
    const ContingencyTable t = contingency(a, b);
    const std::size_t r = t.n_rows_obs, c = t.n_cols_obs;
    if (r < 2 || c < 2) return std::nullopt;

    // standardized residual matrix Z = (P - r c^T) / sqrt(r_i c_j)
    std::vector<double> z(r * c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const double p = t.at(i, j) / t.n;
            const double ri = t.row_margins[i] / t.n;
            const double cj = t.col_margins[j] / t.n;
            z[i * c + j] = (p - ri * cj) / std::sqrt(ri * cj);
        }
    // first singular value via the smaller Gram matrix
    const bool rows_smaller = r <= c;
    const std::size_t d = rows_smaller ? r : c;
    std::vector<double> gram(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            if (rows_smaller)
                for (std::size_t k = 0; k < c; ++k) s += z[i * c + k] * z[j * c + k];
            else
                for (std::size_t k = 0; k < r; ++k) s += z[k * c + i] * z[k * c + j];
            gram[i * d + j] = s;
        }
    return std::sqrt(clamp01(largest_eigenvalue_sym(std::move(gram), d)));
}

} // namespace

std::optional<double> canonical_correlation(const Column& a, const Column& b) {
    if (a.size() != b.size()) fail("LengthMismatch", "columns differ in length");
    if (a.size() == 0) return std::nullopt;
    const PairType pt = pair_type_of(a, b);
    if (pt == PairType::nn) {
        const auto r = pearson(a.numeric, b.numeric);
        if (!r) return std::nullopt;
        return std::abs(*r);
    }
    if (pt == PairType::fn) {
        const Column& f = a.is_factor() ? a : b;
        const Column& x = a.is_factor() ? b : a;
        return cancor_fn(f, x);
    }
    return cancor_ff(a, b);
}

// --- alternating conditional expectations --------------------------------------

namespace {

struct AceSide {
    bool factor = false;
    std::vector<int> codes;      // dense, factor only
    std::size_t n_levels = 0;    // factor only
    std::vector<std::size_t> order; // sorted by value, numeric only
    std::vector<double> values;  // numeric only
};

// Conditional-expectation estimate for a numeric predictor: least-squares
// projection onto a continuous piecewise-linear spline basis of x with
// interior knots at quantile positions roughly ceil(0.3 n) observations
// apart. A projection (unlike a running smoother) keeps the alternating
// fixed point at the first canonical correlation between the two transform
// spaces, so the score can never undercut the linear/indicator pair that
// defines the canonical correlation.
std::vector<double> smooth_numeric(const AceSide& s, const std::vector<double>& target) {
    const std::size_t n = target.size();
    const std::size_t w = static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(n)));
    const std::size_t segments = std::max<std::size_t>(2, (n + w - 1) / w);

    std::vector<double> knots;
    for (std::size_t seg = 1; seg < segments; ++seg) {
        const double k = s.values[s.order[seg * n / segments]];
        if ((knots.empty() || k > knots.back()) && k > s.values[s.order.front()]) knots.push_back(k);
    }

    // basis columns: 1, x, (x - k)+ per knot
    const std::size_t p = 2 + knots.size();
    std::vector<std::vector<double>> basis(p, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        basis[0][i] = 1.0;
        basis[1][i] = s.values[i];
        for (std::size_t k = 0; k < knots.size(); ++k)
            basis[2 + k][i] = std::max(0.0, s.values[i] - knots[k]);
    }

    // modified Gram-Schmidt; dependent columns drop out
    std::vector<double> fitted(n, 0.0);
    for (std::size_t c = 0; c < p; ++c) {
        auto& q = basis[c];
        for (std::size_t prev = 0; prev < c; ++prev) {
            const auto& qp = basis[prev];
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += qp[i] * q[i];
            for (std::size_t i = 0; i < n; ++i) q[i] -= dot * qp[i];
        }
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm2 += q[i] * q[i];
        if (norm2 < 1e-12) {
            std::fill(q.begin(), q.end(), 0.0);
            continue;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < n; ++i) q[i] *= inv;
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += q[i] * target[i];
        for (std::size_t i = 0; i < n; ++i) fitted[i] += proj * q[i];
    }
    return fitted;
}

std::vector<double> conditional_expectation(const AceSide& s, const std::vector<double>& target) {
    if (!s.factor) return smooth_numeric(s, target);
    std::vector<double> sum(s.n_levels, 0.0), cnt(s.n_levels, 0.0);
    for (std::size_t i = 0; i < target.size(); ++i) {
        sum[s.codes[i]] += target[i];
        cnt[s.codes[i]] += 1.0;
    }
    std::vector<double> out(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) out[i] = sum[s.codes[i]] / cnt[s.codes[i]];
    return out;
}

bool standardize(std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    if (ss <= 0.0) return false;
    const double sd = std::sqrt(ss / n);
    for (double& x : v) x = (x - mean) / sd;
    return true;
}

std::optional<AceSide> make_side(const Column& c) {
    AceSide s;
    s.factor = c.is_factor();
    if (s.factor) {
        s.codes = dense_codes(c, s.n_levels);
        if (s.n_levels < 2) return std::nullopt;
    } else {
        s.values = c.numeric;
        if (std::adjacent_find(s.values.begin(), s.values.end(), std::not_equal_to<>()) ==
            s.values.end())
            return std::nullopt; // constant numeric input
        s.order.resize(c.numeric.size());
        std::iota(s.order.begin(), s.order.end(), 0);
        std::stable_sort(s.order.begin(), s.order.end(),
                         [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
    }
    return s;
}

} // namespace

std::optional<double> ace_correlation(const Column& a, const Column& b) {
    if (a.size() != b.size()) fail("LengthMismatch", "columns differ in length");
    const std::size_t n = a.size();
    if (n == 0) return std::nullopt;
    const bool any_numeric = !a.is_factor() || !b.is_factor();
    if (any_numeric && n < 10) return std::nullopt;
    if (!any_numeric && n < 2) return std::nullopt;

    const auto sx = make_side(a);
    const auto sy = make_side(b);
    if (!sx || !sy) return std::nullopt;

    // start from the standardized raw response
    std::vector<double> theta(n);
    if (sy->factor)
        for (std::size_t i = 0; i < n; ++i) theta[i] = static_cast<double>(sy->codes[i]);
    else
        theta = sy->values;
    if (!standardize(theta)) return std::nullopt;

    double rho2_prev = -1.0;
    double rho = 0.0;
    std::vector<double> phi;
    for (int iter = 0; iter < 25; ++iter) {
        phi = conditional_expectation(*sx, theta);
        auto theta_next = conditional_expectation(*sy, phi);
        // collapsed transforms on non-degenerate inputs mean no recoverable
        // association, not a missing score
        if (!standardize(theta_next)) return 0.0;
        theta = std::move(theta_next);
        const auto r = pearson(theta, phi);
        if (!r) return 0.0;
        rho = *r;
        const double rho2 = rho * rho;
        if (std::abs(rho2 - rho2_prev) < 1e-6) break;
        rho2_prev = rho2;
    }
    return clamp01(rho);
}

// --- normalized mutual information ---------------------------------------------

std::vector<int> equal_frequency_bins(std::span<const double> v, int bins) {
    const std::size_t n = v.size();
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    // quantile breakpoints (type-7 interpolation), deduplicated
    std::vector<double> breaks;
    for (int k = 1; k < bins; ++k) {
        const double h = (static_cast<double>(n) - 1.0) * static_cast<double>(k) / bins;
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const double frac = h - static_cast<double>(lo);
        const double q = sorted[lo] + frac * (sorted[std::min(lo + 1, n - 1)] - sorted[lo]);
        if (breaks.empty() || q > breaks.back()) breaks.push_back(q);
    }
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = std::lower_bound(breaks.begin(), breaks.end(), v[i]);
        out[i] = static_cast<int>(it - breaks.begin());
    }
    return out;
}

namespace {

double nmi_of_assignments(const std::vector<int>& xa, int xk, const std::vector<int>& ya, int yk) {
    const double n = static_cast<double>(xa.size());
    std::vector<double> joint(static_cast<std::size_t>(xk) * yk, 0.0);
    std::vector<double> mx(xk, 0.0), my(yk, 0.0);
    for (std::size_t i = 0; i < xa.size(); ++i) {
        joint[xa[i] * yk + ya[i]] += 1.0;
        mx[xa[i]] += 1.0;
        my[ya[i]] += 1.0;
    }
    const double hx = entropy_counts(mx, n);
    const double hy = entropy_counts(my, n);
    if (hx <= 0.0 || hy <= 0.0) return -1.0; // undefined
    double hxy = 0.0;
    for (double c : joint)
        if (c > 0.0) hxy -= (c / n) * std::log(c / n);
    const double mi = std::max(0.0, hx + hy - hxy);
    return mi / std::sqrt(hx * hy);
}

} // namespace

std::optional<double> max_nmi(const Column& a, const Column& b) {
    if (a.size() != b.size()) fail("LengthMismatch", "columns differ in length");
    const std::size_t n = a.size();
    if (n < 8) return std::nullopt;
    const int cap = static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 0.6)));

    auto candidates = [&](const Column& c) {
        std::vector<std::pair<std::vector<int>, int>> out;
        if (c.is_factor()) {
            std::size_t k;
            auto codes = dense_codes(c, k);
            out.emplace_back(std::move(codes), static_cast<int>(k));
        } else {
            for (int b2 = 2; b2 <= std::max(2, cap); ++b2) {
                auto bins = equal_frequency_bins(c.numeric, b2);
                const int k = 1 + *std::max_element(bins.begin(), bins.end());
                out.emplace_back(std::move(bins), k);
            }
        }
        return out;
    };
    const auto ca = candidates(a);
    const auto cb = candidates(b);

    double best = -1.0;
    for (const auto& [xa, xk] : ca)
        for (const auto& [ya, yk] : cb)
            best = std::max(best, nmi_of_assignments(xa, xk, ya, yk));
    if (best < 0.0) return std::nullopt;
    return clamp01(best);
}

} // namespace pairscore
