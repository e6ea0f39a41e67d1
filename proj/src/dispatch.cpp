#include "pairscore/dispatch.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "pairscore/categorical_measures.hpp"
#include "pairscore/errors.hpp"
#include "pairscore/scagnostics.hpp"

namespace pairscore {

const MethodInfo& resolve_measure(const std::string& id, MeasureOptions& options) {
    if (id == "pearson" || id == "spearman" || id == "kendall") {
        options.cor_method = id;
        return *find_method("cor");
    }
    if (const MethodInfo* m = find_method(id)) return *m;
    fail("UnknownMeasure", "no measure named '" + id + "'");
}

namespace {

int thread_count() {
    const char* env = std::getenv("PAIRSCORE_THREADS");
    if (!env) return 1;
    const int v = std::atoi(env);
    return std::max(1, v);
}

template <typename F>
void parallel_for(std::size_t n, F&& f) {
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n ? n : 1);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

bool ordered_ok(const MethodInfo& m, const Column& a, const Column& b) {
    if (!m.ordinal) return true;
    if (a.is_factor() && a.kind != ColumnKind::ordered) return false;
    if (b.is_factor() && b.kind != ColumnKind::ordered) return false;
    return true;
}

bool measure_supports(const MethodInfo& m, PairType pt) {
    switch (pt) {
        case PairType::nn: return m.nn;
        case PairType::ff: return m.ff;
        case PairType::fn: return m.fn;
    }
    return false;
}

// Scores for one complete pair under one measure; returns (score name, value)
// in emission order. Degenerate inputs yield missing values.
std::vector<std::pair<std::string, std::optional<double>>> evaluate(
    const Column& ca, const Column& cb, const MethodInfo& m, const MeasureOptions& opt) {
    using Out = std::vector<std::pair<std::string, std::optional<double>>>;
    const std::size_t n = ca.size();

    if (m.name == "cor") {
        std::optional<double> v;
        if (opt.cor_method == "pearson") v = pearson(ca.numeric, cb.numeric);
        else if (opt.cor_method == "spearman") v = rank_correlation(ca.numeric, cb.numeric, RankMethod::spearman);
        else if (opt.cor_method == "kendall") v = rank_correlation(ca.numeric, cb.numeric, RankMethod::kendall);
        else fail("UnknownMeasure", "cor method '" + opt.cor_method + "'");
        return Out{{opt.cor_method, v}};
    }
    if (m.name == "dcor") return Out{{"dcor", distance_correlation(ca.numeric, cb.numeric)}};
    if (m.name == "mine") {
        MicResult r;
        if (n >= 8) r = mic_scores(ca.numeric, cb.numeric, opt.mic);
        Out out;
        for (const auto& method : opt.mine_methods) {
            if (method == "MIC") out.push_back({"MIC", r.mic});
            else if (method == "TIC") out.push_back({"TIC", r.tic});
            else fail("UnknownMeasure", "mine method '" + method + "'");
        }
        return out;
    }
    if (m.name == "scagnostics") {
        ScagnosticScores s;
        if (n >= 3) s = scagnostics_scores(ca.numeric, cb.numeric);
        Out out;
        for (const auto& name : scagnostic_names()) out.push_back({name, s.by_name(name)});
        return out;
    }
    if (m.name == "ace") return Out{{"ace", n ? ace_correlation(ca, cb) : std::nullopt}};
    if (m.name == "cancor")
        return Out{{"cancor", n ? canonical_correlation(ca, cb) : std::nullopt}};
    if (m.name == "nmi") return Out{{"nmi", n ? max_nmi(ca, cb) : std::nullopt}};
    if (m.name == "polychor") return Out{{"polychor", n ? polychoric(ca, cb) : std::nullopt}};
    if (m.name == "polyserial") {
        const Column& f = ca.is_factor() ? ca : cb;
        const Column& x = ca.is_factor() ? cb : ca;
        return Out{{"polyserial", n ? polyserial(f, x) : std::nullopt}};
    }

    // contingency-table measures
    if (n == 0) return Out{{m.name, std::nullopt}};
    if (m.name == "tauW") return Out{{"tauW", kendall_w(ca, cb)}};
    const ContingencyTable t = contingency(ca, cb);
    if (m.name == "tauA") return Out{{"tauA", concordance_measure(t, ConcordanceMethod::tauA)}};
    if (m.name == "tauB") return Out{{"tauB", concordance_measure(t, ConcordanceMethod::tauB)}};
    if (m.name == "tauC") return Out{{"tauC", concordance_measure(t, ConcordanceMethod::tauC)}};
    if (m.name == "gkGamma")
        return Out{{"gkGamma", concordance_measure(t, ConcordanceMethod::gkGamma)}};
    if (m.name == "gkTau") return Out{{"gkTau", gk_tau(t)}};
    if (m.name == "uncertainty") return Out{{"uncertainty", uncertainty_coef(t)}};
    if (m.name == "chi") return Out{{"chi", contingency_coef(t)}};
    fail("UnknownMeasure", "no evaluator for '" + m.name + "'");
}

std::vector<PairwiseRow> score_pair(const Column& a, const Column& b, const MethodInfo& m,
                                    const MeasureOptions& opt, const std::string& group) {
    const PairType pt = pair_type_of(a, b);
    auto [ca, cb] = complete_pairs(a, b);
    const bool honour_ordinal = ordered_ok(m, a, b);

    std::vector<PairwiseRow> rows;
    for (auto& [score, value] : evaluate(ca, cb, m, opt)) {
        PairwiseRow r;
        r.x = a.name;
        r.y = b.name;
        if (r.x > r.y) std::swap(r.x, r.y);
        r.score = score;
        r.group = group;
        r.value = honour_ordinal ? value : std::nullopt;
        r.pair_type = pt;
        rows.push_back(std::move(r));
    }
    return rows;
}

struct GroupSlice {
    std::string label;
    Dataset data;
};

// level subsets of `by` plus optionally the whole dataset as "all"
std::vector<GroupSlice> group_slices(const Dataset& d, const std::string& by, bool ungrouped) {
    const Column* g = d.find(by);
    if (!g) fail("UnknownVariable", "grouping column '" + by + "' not found");
    if (!g->is_factor()) fail("NotAFactor", "grouping column '" + by + "' must be a factor");
    if (std::any_of(g->levels.begin(), g->levels.end(),
                    [](const std::string& l) { return l == "all"; }))
        fail("RangeViolation", "grouping level 'all' collides with the reserved group label");

    std::vector<GroupSlice> slices;
    for (std::size_t lv = 0; lv < g->levels.size(); ++lv) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < g->size(); ++i)
            if (!g->is_missing(i) && g->codes[i] == static_cast<int>(lv)) rows.push_back(i);
        slices.push_back({g->levels[lv], d.subset(rows)});
    }
    if (ungrouped) {
        std::vector<std::size_t> all_rows(d.n_rows);
        for (std::size_t i = 0; i < d.n_rows; ++i) all_rows[i] = i;
        slices.push_back({"all", d.subset(all_rows)});
    }
    return slices;
}

struct PairTask {
    std::size_t xi, yi;       // column indices in the slice datasets
    std::size_t slice;        // index into slices
    const MethodInfo* method;
    const MeasureOptions* options;
};

PairwiseTable run_tasks(const std::vector<GroupSlice>& slices, const std::vector<PairTask>& tasks) {
    std::vector<std::vector<PairwiseRow>> results(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t i) {
        const PairTask& task = tasks[i];
        const Dataset& data = slices[task.slice].data;
        results[i] = score_pair(data.columns[task.xi], data.columns[task.yi], *task.method,
                                *task.options, slices[task.slice].label);
    });
    std::vector<PairwiseRow> rows;
    for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    return new_pairwise(std::move(rows));
}

} // namespace

PairwiseTable apply_measure(const Dataset& d, const std::string& measure,
                            const MeasureOptions& options) {
    MeasureOptions opt = options;
    const MethodInfo& m = resolve_measure(measure, opt);

    std::vector<GroupSlice> slices;
    {
        std::vector<std::size_t> all_rows(d.n_rows);
        for (std::size_t i = 0; i < d.n_rows; ++i) all_rows[i] = i;
        slices.push_back({"all", d.subset(all_rows)});
    }
    std::vector<PairTask> tasks;
    for (std::size_t i = 0; i < d.columns.size(); ++i) {
        for (std::size_t j = i + 1; j < d.columns.size(); ++j) {
            const Column& a = d.columns[i];
            const Column& b = d.columns[j];
            if (!measure_supports(m, pair_type_of(a, b))) continue;
            if (!ordered_ok(m, a, b)) continue;
            tasks.push_back({i, j, 0, &m, &opt});
        }
    }
    return run_tasks(slices, tasks);
}

PairwiseTable pairwise_multi(const Dataset& d, const std::vector<std::string>& measures,
                             const MeasureOptions& options) {
    if (measures.empty()) fail("UnknownMeasure", "no measures given");
    std::vector<PairwiseRow> rows;
    for (const auto& id : measures) {
        const PairwiseTable t = apply_measure(d, id, options);
        rows.insert(rows.end(), t.rows().begin(), t.rows().end());
    }
    return new_pairwise(std::move(rows));
}

PairwiseTable pairwise_by(const Dataset& d, const std::string& by, const std::string& measure,
                          bool ungrouped, const MeasureOptions& options) {
    MeasureOptions opt = options;
    const MethodInfo& m = resolve_measure(measure, opt);

    const auto slices = group_slices(d, by, ungrouped);
    std::vector<PairTask> tasks;
    for (std::size_t i = 0; i < d.columns.size(); ++i) {
        for (std::size_t j = i + 1; j < d.columns.size(); ++j) {
            const Column& a = d.columns[i];
            const Column& b = d.columns[j];
            if (a.name == by || b.name == by) continue;
            if (!measure_supports(m, pair_type_of(a, b))) continue;
            if (!ordered_ok(m, a, b)) continue;
            for (std::size_t s = 0; s < slices.size(); ++s) tasks.push_back({i, j, s, &m, &opt});
        }
    }
    return run_tasks(slices, tasks);
}

PairwiseTable pairwise_scores(const Dataset& d, const ScoreControl& control,
                              const std::optional<std::string>& by, bool ungrouped,
                              const MeasureOptions& options) {
    struct Slot {
        const MethodInfo* method = nullptr;
        MeasureOptions options;
    };
    auto make_slot = [&](const std::string& id, PairType pt, bool ordered_slot) {
        Slot slot;
        slot.options = options;
        slot.method = &resolve_measure(id, slot.options);
        if (!measure_supports(*slot.method, pt))
            fail("UnknownMeasure",
                 "measure '" + id + "' does not support " + to_string(pt) + " pairs");
        if (slot.method->ordinal && !ordered_slot)
            fail("UnknownMeasure", "measure '" + id + "' requires ordered factors");
        return slot;
    };
    const Slot slot_nn = make_slot(control.nn, PairType::nn, false);
    const Slot slot_fn = make_slot(control.fn, PairType::fn, false);
    const Slot slot_ff = make_slot(control.ff, PairType::ff, false);
    const Slot slot_oo = make_slot(control.oo, PairType::ff, true);

    std::vector<GroupSlice> slices;
    if (by) {
        slices = group_slices(d, *by, ungrouped);
    } else {
        std::vector<std::size_t> all_rows(d.n_rows);
        for (std::size_t i = 0; i < d.n_rows; ++i) all_rows[i] = i;
        slices.push_back({"all", d.subset(all_rows)});
    }

    std::vector<PairTask> tasks;
    for (std::size_t i = 0; i < d.columns.size(); ++i) {
        for (std::size_t j = i + 1; j < d.columns.size(); ++j) {
            const Column& a = d.columns[i];
            const Column& b = d.columns[j];
            if (by && (a.name == *by || b.name == *by)) continue;
            const PairType pt = pair_type_of(a, b);
            const Slot* slot = nullptr;
            if (pt == PairType::nn) slot = &slot_nn;
            else if (pt == PairType::fn) slot = &slot_fn;
            else {
                const bool both_ordered =
                    a.kind == ColumnKind::ordered && b.kind == ColumnKind::ordered;
                slot = both_ordered ? &slot_oo : &slot_ff;
            }
            for (std::size_t s = 0; s < slices.size(); ++s)
                tasks.push_back({i, j, s, slot->method, &slot->options});
        }
    }
    return run_tasks(slices, tasks);
}

} // namespace pairscore
