#include "pairscore/pairwise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "pairscore/errors.hpp"

namespace pairscore {

bool operator==(const PairwiseRow& a, const PairwiseRow& b) {
    return a.x == b.x && a.y == b.y && a.score == b.score && a.group == b.group &&
           a.value == b.value && a.pair_type == b.pair_type;
}

namespace {

// group comparator with the reserved label "all" sorting last
bool group_less(const std::string& a, const std::string& b) {
    const bool aa = a == "all", ba = b == "all";
    if (aa != ba) return ba; // named < "all"
    return a < b;
}

} // namespace

bool row_key_less(const PairwiseRow& a, const PairwiseRow& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    if (a.score != b.score) return a.score < b.score;
    return group_less(a.group, b.group);
}

std::vector<std::string> PairwiseTable::variables() const {
    std::set<std::string> s;
    for (const auto& r : rows_) {
        s.insert(r.x);
        s.insert(r.y);
    }
    return {s.begin(), s.end()};
}

std::vector<std::string> PairwiseTable::scores() const {
    std::set<std::string> s;
    for (const auto& r : rows_) s.insert(r.score);
    return {s.begin(), s.end()};
}

std::vector<std::string> PairwiseTable::named_groups() const {
    std::set<std::string> s;
    for (const auto& r : rows_)
        if (r.group != "all") s.insert(r.group);
    return {s.begin(), s.end()};
}

PairwiseTable new_pairwise(std::vector<PairwiseRow> rows) {
    for (auto& r : rows) {
        if (r.x.empty() || r.y.empty()) fail("SelfPair", "variable names must be nonempty");
        if (r.x == r.y) fail("SelfPair", "self pair '" + r.x + "'");
        if (r.x > r.y) std::swap(r.x, r.y);
        if (r.value) {
            if (!std::isfinite(*r.value))
                fail("RangeViolation", "non-finite value for (" + r.x + ", " + r.y + ")");
            if (auto range = score_range(r.score)) {
                const double slack = 1e-12;
                if (*r.value < range->first - slack || *r.value > range->second + slack)
                    fail("RangeViolation", "score '" + r.score + "' value " + std::to_string(*r.value) +
                                               " outside [" + std::to_string(range->first) + ", " +
                                               std::to_string(range->second) + "]");
            }
        }
    }
    std::stable_sort(rows.begin(), rows.end(), row_key_less);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& p = rows[i - 1];
        const auto& r = rows[i];
        if (p.x == r.x && p.y == r.y && p.score == r.score && p.group == r.group)
            fail("DuplicateKey", "(" + r.x + ", " + r.y + ", " + r.score + ", " + r.group + ")");
    }
    return PairwiseTable(std::move(rows));
}

LabeledMatrix LabeledMatrix::zeros(std::vector<std::string> labels) {
    LabeledMatrix m;
    m.labels = std::move(labels);
    m.cells.assign(m.labels.size() * m.labels.size(), std::nullopt);
    return m;
}

PairwiseTable from_matrix(const LabeledMatrix& m, const std::string& score, PairType pair_type) {
    const std::size_t p = m.size();
    {
        std::set<std::string> uniq(m.labels.begin(), m.labels.end());
        if (uniq.size() != p) fail("DuplicateLabels", "matrix labels are not unique");
    }
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            const auto& a = m.at(i, j);
            const auto& b = m.at(j, i);
            if (a.has_value() != b.has_value())
                fail("AsymmetricInput", "cell (" + m.labels[i] + ", " + m.labels[j] + ") present on one side only");
            if (a && b && std::abs(*a - *b) > 1e-12)
                fail("AsymmetricInput", "cells (" + m.labels[i] + ", " + m.labels[j] + ") differ by more than 1e-12");
        }
    }
    std::vector<PairwiseRow> rows;
    rows.reserve(p * (p - 1) / 2);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            PairwiseRow r;
            r.x = m.labels[i];
            r.y = m.labels[j];
            r.score = score;
            r.group = "all";
            r.value = m.at(i, j);
            r.pair_type = pair_type;
            rows.push_back(std::move(r));
        }
    }
    return new_pairwise(std::move(rows));
}

LabeledMatrix to_matrix(const PairwiseTable& t) {
    auto vars = t.variables();
    LabeledMatrix m = LabeledMatrix::zeros(vars);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        index[vars[i]] = i;
        m.at(i, i) = 1.0;
    }
    // rows are canonically sorted, so the first row seen per pair wins,
    // even when its value is missing
    std::set<std::pair<std::size_t, std::size_t>> filled;
    for (const auto& r : t.rows()) {
        const std::size_t i = index[r.x], j = index[r.y];
        if (filled.insert({i, j}).second) {
            m.at(i, j) = r.value;
            m.at(j, i) = r.value;
        }
    }
    return m;
}

namespace {

struct PairStats {
    double max_abs = 0.0;
    double max = 0.0, min = 0.0;
    bool any = false;
};

} // namespace

PairwiseTable filter_pairs(const PairwiseTable& t, const FilterSpec& spec) {
    if (spec.min_max_abs && !std::isfinite(*spec.min_max_abs))
        fail("RangeViolation", "min_max_abs must be finite");
    if (spec.min_range && !std::isfinite(*spec.min_range))
        fail("RangeViolation", "min_range must be finite");
    if (spec.with_variable) {
        auto vars = t.variables();
        if (!std::binary_search(vars.begin(), vars.end(), *spec.with_variable))
            fail("UnknownVariable", "variable '" + *spec.with_variable + "' not present in table");
    }

    std::map<std::pair<std::string, std::string>, PairStats> stats;
    for (const auto& r : t.rows()) {
        auto& s = stats[{r.x, r.y}];
        if (r.value) {
            const double v = *r.value;
            if (!s.any) {
                s.max = s.min = v;
                s.any = true;
            } else {
                s.max = std::max(s.max, v);
                s.min = std::min(s.min, v);
            }
            s.max_abs = std::max(s.max_abs, std::abs(v));
        }
    }

    const bool numeric_criteria = spec.min_max_abs.has_value() || spec.min_range.has_value();
    std::vector<PairwiseRow> kept;
    for (const auto& r : t.rows()) {
        const auto& s = stats[{r.x, r.y}];
        bool keep = true;
        if (numeric_criteria) {
            keep = false;
            if (s.any) {
                if (spec.min_max_abs && s.max_abs >= *spec.min_max_abs) keep = true;
                if (spec.min_range && (s.max - s.min) >= *spec.min_range) keep = true;
            }
        }
        if (keep && spec.with_variable)
            keep = r.x == *spec.with_variable || r.y == *spec.with_variable;
        if (keep) kept.push_back(r);
    }
    return new_pairwise(std::move(kept));
}

WideTable pivot_wide(const PairwiseTable& t) {
    WideTable wide;
    wide.score_names = t.scores();
    std::map<std::string, std::size_t> score_col;
    for (std::size_t i = 0; i < wide.score_names.size(); ++i) score_col[wide.score_names[i]] = i;

    // rows arrive in canonical order; keys keep first-encounter order, which
    // matches the canonical (x, y, group) order up to the score component
    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> key_row;
    std::vector<std::tuple<std::string, std::string, std::string>> key_order;
    for (const auto& r : t.rows()) {
        auto key = std::make_tuple(r.x, r.y, r.group);
        if (!key_row.count(key)) {
            key_row[key] = key_order.size();
            key_order.push_back(key);
        }
    }
    std::sort(key_order.begin(), key_order.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
        return group_less(std::get<2>(a), std::get<2>(b));
    });
    for (std::size_t i = 0; i < key_order.size(); ++i) key_row[key_order[i]] = i;

    wide.rows.resize(key_order.size());
    for (std::size_t i = 0; i < key_order.size(); ++i) {
        wide.rows[i].x = std::get<0>(key_order[i]);
        wide.rows[i].y = std::get<1>(key_order[i]);
        wide.rows[i].group = std::get<2>(key_order[i]);
        wide.rows[i].values.assign(wide.score_names.size(), std::nullopt);
    }
    for (const auto& r : t.rows()) {
        auto key = std::make_tuple(r.x, r.y, r.group);
        wide.rows[key_row[key]].values[score_col[r.score]] = r.value;
    }
    return wide;
}

// --- CSV --------------------------------------------------------------------

namespace {

std::string format_value(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 15);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

} // namespace

void write_score_csv(const PairwiseTable& t, std::ostream& out) {
    out << "x,y,score,group,value,pair_type\n";
    for (const auto& r : t.rows()) {
        out << csv_escape(r.x) << ',' << csv_escape(r.y) << ',' << csv_escape(r.score) << ','
            << csv_escape(r.group) << ',';
        if (r.value) out << format_value(*r.value);
        out << ',' << to_string(r.pair_type) << '\n';
    }
}

void write_score_csv_file(const PairwiseTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoError", "cannot open '" + path + "' for writing");
    write_score_csv(t, out);
    if (!out) fail("IoError", "write to '" + path + "' failed");
}

PairwiseTable read_score_csv(std::istream& in) {
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    std::vector<std::string> lines;
    {
        std::string cur;
        bool quoted = false;
        for (char ch : text) {
            if (ch == '"') quoted = !quoted;
            if (ch == '\n' && !quoted) {
                lines.push_back(std::move(cur));
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        if (!cur.empty()) lines.push_back(std::move(cur));
    }
    if (lines.empty()) fail("FormatError", "empty score CSV");
    {
        auto header = split_csv_line(lines[0]);
        const std::vector<std::string> want = {"x", "y", "score", "group", "value", "pair_type"};
        if (std::vector<std::string>(header.begin(), header.end()) != want)
            fail("FormatError", "score CSV header must be exactly 'x,y,score,group,value,pair_type'");
    }
    std::vector<PairwiseRow> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty() || lines[li] == "\r") continue;
        auto f = split_csv_line(lines[li]);
        if (f.size() != 6)
            fail("FormatError", "score CSV row " + std::to_string(li) + ": expected 6 fields");
        PairwiseRow r;
        r.x = f[0];
        r.y = f[1];
        r.score = f[2];
        r.group = f[3];
        if (!f[4].empty()) {
            double v;
            const char* first = f[4].data();
            const char* last = first + f[4].size();
            auto [p, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || p != last)
                fail("FormatError", "score CSV row " + std::to_string(li) + ": bad value '" + f[4] + "'");
            r.value = v;
        }
        auto pt = pair_type_from_string(f[5]);
        if (!pt) fail("FormatError", "score CSV row " + std::to_string(li) + ": bad pair_type '" + f[5] + "'");
        r.pair_type = *pt;
        rows.push_back(std::move(r));
    }
    return new_pairwise(std::move(rows));
}

PairwiseTable read_score_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open score CSV '" + path + "'");
    return read_score_csv(in);
}

// --- method registry ---------------------------------------------------------

const std::vector<MethodInfo>& method_registry() {
    static const std::vector<MethodInfo> registry = {
        //   name          nn     ff     fn     from                                          lo    hi   ordinal
        {"cor",          true,  false, false, "product-moment / rank correlation",            -1.0, 1.0, false},
        {"dcor",         true,  false, false, "distance correlation (Szekely-Rizzo-Bakirov)", 0.0,  1.0, false},
        {"mine",         true,  false, false, "maximal information criteria (MINE family)",   0.0,  1.0, false},
        {"ace",          true,  true,  true,  "alternating conditional expectations",         0.0,  1.0, false},
        {"cancor",       true,  true,  true,  "canonical correlation",                        0.0,  1.0, false},
        {"nmi",          true,  true,  true,  "normalized mutual information, max over bins", 0.0,  1.0, false},
        {"polychor",     false, true,  false, "latent bivariate-normal correlation (Olsson)", -1.0, 1.0, true},
        {"polyserial",   false, false, true,  "latent normal correlation, ordinal-numeric",   -1.0, 1.0, true},
        {"tauA",         false, true,  false, "Kendall concordance, untied denominator",      -1.0, 1.0, true},
        {"tauB",         false, true,  false, "Kendall concordance, tie-corrected",           -1.0, 1.0, true},
        {"tauC",         false, true,  false, "Stuart-Kendall concordance for r x c tables",  -1.0, 1.0, true},
        {"tauW",         false, true,  false, "Kendall coefficient of concordance, rescaled", -1.0, 1.0, true},
        {"gkGamma",      false, true,  false, "Goodman-Kruskal gamma",                        -1.0, 1.0, true},
        {"gkTau",        false, true,  false, "Goodman-Kruskal tau, symmetrized",             0.0,  1.0, true},
        {"uncertainty",  false, true,  false, "Theil uncertainty coefficient, symmetrized",   0.0,  1.0, false},
        {"chi",          false, true,  false, "Pearson contingency coefficient, rescaled",    0.0,  1.0, false},
        {"scagnostics",  true,  false, false, "graph-theoretic scatterplot diagnostics",      0.0,  1.0, false},
    };
    return registry;
}

const MethodInfo* find_method(const std::string& name) {
    for (const auto& m : method_registry())
        if (m.name == name) return &m;
    return nullptr;
}

std::optional<std::pair<double, double>> score_range(const std::string& score_name) {
    static const std::map<std::string, std::pair<double, double>> derived = {
        {"pearson", {-1.0, 1.0}},  {"spearman", {-1.0, 1.0}}, {"kendall", {-1.0, 1.0}},
        {"MIC", {0.0, 1.0}},       {"TIC", {0.0, 1.0}},
        {"outlying", {0.0, 1.0}},  {"skewed", {0.0, 1.0}},    {"clumpy", {0.0, 1.0}},
        {"sparse", {0.0, 1.0}},    {"striated", {0.0, 1.0}},  {"convex", {0.0, 1.0}},
        {"skinny", {0.0, 1.0}},    {"stringy", {0.0, 1.0}},   {"monotonic", {0.0, 1.0}},
    };
    if (auto it = derived.find(score_name); it != derived.end()) return it->second;
    if (const MethodInfo* m = find_method(score_name)) return std::make_pair(m->range_lo, m->range_hi);
    return std::nullopt;
}

} // namespace pairscore
