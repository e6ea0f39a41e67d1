#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <random>
#include <set>

#include "pairscore/categorical_measures.hpp"
#include "pairscore/dispatch.hpp"
#include "pairscore/errors.hpp"
#include "pairscore/seriation.hpp"

using namespace pairscore;

namespace {

std::string data_path(const std::string& name) {
    return std::string(PAIRSCORE_TEST_DATA_DIR) + "/" + name;
}

const Dataset& penguins() {
    static const Dataset d =
        load_csv(data_path("penguins.csv"), load_schema(data_path("penguins_schema.json")));
    return d;
}

const PairwiseRow* find_row(const PairwiseTable& t, const std::string& x, const std::string& y,
                            const std::string& score, const std::string& group) {
    for (const auto& r : t.rows())
        if (r.x == x && r.y == y && r.score == score && r.group == group) return &r;
    return nullptr;
}

} // namespace

TEST_CASE("pearson over penguins gives ten nn rows") {
    const auto t = apply_measure(penguins(), "pearson");
    CHECK(t.size() == 10);
    for (const auto& r : t.rows()) {
        CHECK(r.pair_type == PairType::nn);
        CHECK(r.group == "all");
        CHECK(r.score == "pearson");
    }
    const auto* row = find_row(t, "bill_dep", "bill_len", "pearson", "all");
    REQUIRE(row != nullptr);
    CHECK(*row->value == doctest::Approx(-0.235).epsilon(0.005));
}

TEST_CASE("mine with MIC and TIC emits twenty rows") {
    MeasureOptions opt;
    opt.mine_methods = {"MIC", "TIC"};
    const auto t = apply_measure(penguins(), "mine", opt);
    CHECK(t.size() == 20);
    std::set<std::string> scores;
    for (const auto& r : t.rows()) scores.insert(r.score);
    CHECK(scores == std::set<std::string>{"MIC", "TIC"});
}

TEST_CASE("polychor on penguins has no eligible pairs") {
    const auto t = apply_measure(penguins(), "polychor");
    CHECK(t.empty()); // factors but no ordered factors
}

TEST_CASE("unknown measures raise") {
    CHECK_THROWS_WITH_AS(apply_measure(penguins(), "nosuch"), doctest::Contains("UnknownMeasure"),
                         Error);
    CHECK_THROWS_WITH_AS(pairwise_multi(penguins(), {}), doctest::Contains("UnknownMeasure"), Error);
}

TEST_CASE("pairwise_multi unions measures") {
    SUBCASE("single measure equals apply_measure") {
        const auto a = pairwise_multi(penguins(), {"pearson"});
        const auto b = apply_measure(penguins(), "pearson");
        CHECK(a.rows() == b.rows());
    }
    SUBCASE("dcor covers nn pairs, nmi all pairs") {
        const auto t = pairwise_multi(penguins(), {"dcor", "nmi"});
        std::size_t dcor_rows = 0, nmi_rows = 0;
        for (const auto& r : t.rows()) {
            if (r.score == "dcor") {
                ++dcor_rows;
                CHECK(r.pair_type == PairType::nn);
            }
            if (r.score == "nmi") ++nmi_rows;
        }
        CHECK(dcor_rows == 10);
        CHECK(nmi_rows == 28); // 8 choose 2
        CHECK(t.size() == 38);
    }
}

TEST_CASE("pairwise_by pearson by species") {
    const auto t = pairwise_by(penguins(), "species", "pearson");
    CHECK(t.size() == 40);

    CHECK(*find_row(t, "bill_dep", "bill_len", "pearson", "Adelie")->value ==
          doctest::Approx(0.391).epsilon(0.005));
    CHECK(*find_row(t, "bill_dep", "bill_len", "pearson", "Chinstrap")->value ==
          doctest::Approx(0.654).epsilon(0.005));
    CHECK(*find_row(t, "bill_dep", "bill_len", "pearson", "Gentoo")->value ==
          doctest::Approx(0.643).epsilon(0.005));
    CHECK(*find_row(t, "bill_dep", "bill_len", "pearson", "all")->value ==
          doctest::Approx(-0.235).epsilon(0.005));

    SUBCASE("ungrouped=false drops the all rows") {
        const auto g = pairwise_by(penguins(), "species", "pearson", false);
        CHECK(g.size() == 30);
        for (const auto& r : g.rows()) CHECK(r.group != "all");
    }
    SUBCASE("the by column never appears among the scored variables") {
        for (const auto& r : t.rows()) {
            CHECK(r.x != "species");
            CHECK(r.y != "species");
        }
    }
    SUBCASE("grouping by a numeric column is an error") {
        CHECK_THROWS_WITH_AS(pairwise_by(penguins(), "bill_len", "pearson"),
                             doctest::Contains("NotAFactor"), Error);
    }
}

TEST_CASE("group-subset equivalence: grouped rows equal the measure on the subset") {
    const auto t = pairwise_by(penguins(), "species", "pearson");
    const Column* sp = penguins().find("species");
    for (const std::string level : {"Adelie", "Chinstrap", "Gentoo"}) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < penguins().n_rows; ++i)
            if (!sp->is_missing(i) && sp->levels[sp->codes[i]] == level) rows.push_back(i);
        const auto sub = penguins().subset(rows);
        const auto direct = apply_measure(sub, "pearson");
        for (const auto& r : direct.rows()) {
            const auto* grouped = find_row(t, r.x, r.y, r.score, level);
            REQUIRE(grouped != nullptr);
            CHECK(grouped->value.has_value() == r.value.has_value());
            if (r.value) CHECK(*grouped->value == *r.value); // exact
        }
    }
}

TEST_CASE("cancor by species: island is constant within Gentoo and Chinstrap") {
    const auto t = pairwise_by(penguins(), "species", "cancor");
    for (const auto& r : t.rows()) {
        if ((r.x == "island" || r.y == "island") && (r.group == "Gentoo" || r.group == "Chinstrap"))
            CHECK_FALSE(r.value.has_value());
    }
    const auto* adelie = find_row(t, "bill_len", "sex", "cancor", "Adelie");
    REQUIRE(adelie != nullptr);
    CHECK(*adelie->value == doctest::Approx(0.590).epsilon(0.04));
}

TEST_CASE("pairwise_scores dispatches by pair type") {
    const auto t = pairwise_scores(penguins());
    std::set<std::pair<std::string, std::string>> combos;
    for (const auto& r : t.rows()) combos.insert({r.score, to_string(r.pair_type)});
    CHECK(combos == std::set<std::pair<std::string, std::string>>{
                        {"cancor", "ff"}, {"cancor", "fn"}, {"pearson", "nn"}});
    CHECK(t.size() == 28);

    SUBCASE("grouped by species gives 84 rows") {
        const auto g = pairwise_scores(penguins(), ScoreControl{}, std::string("species"));
        CHECK(g.size() == 84);
    }
    SUBCASE("control with nn=spearman matches rank_correlation directly") {
        ScoreControl control;
        control.nn = "spearman";
        const auto g = pairwise_scores(penguins(), control);
        const auto direct = apply_measure(penguins(), "spearman");
        for (const auto& r : g.rows()) {
            if (r.pair_type != PairType::nn) continue;
            CHECK(r.score == "spearman");
            const auto* d = find_row(direct, r.x, r.y, "spearman", "all");
            REQUIRE(d != nullptr);
            CHECK(*r.value == *d->value);
        }
    }
    SUBCASE("invalid slot assignments are rejected") {
        ScoreControl control;
        control.nn = "chi"; // chi does not support nn
        CHECK_THROWS_WITH_AS(pairwise_scores(penguins(), control),
                             doctest::Contains("UnknownMeasure"), Error);
        ScoreControl control2;
        control2.ff = "tauB"; // ordinal measure in the unordered slot
        CHECK_THROWS_WITH_AS(pairwise_scores(penguins(), control2),
                             doctest::Contains("UnknownMeasure"), Error);
    }
}

TEST_CASE("ordered factors route to the oo slot") {
    Dataset d = parse_csv("g,h,x\nlo,no,1\nmid,no,2\nhi,yes,3\nlo,yes,4\nmid,no,5\nhi,yes,6\n",
                          Schema{{{"g", {ColumnKind::ordered, {"lo", "mid", "hi"}}},
                                  {"h", {ColumnKind::factor, {}}}}});
    const auto t = pairwise_scores(d);
    const auto* gh = find_row(t, "g", "h", "cancor", "all");
    CHECK(gh != nullptr); // mixed ordered/unordered ff stays on the ff slot

    Dataset d2 = parse_csv("g,k\nlo,a\nmid,b\nhi,c\nlo,a\nmid,b\nhi,c\n",
                           Schema{{{"g", {ColumnKind::ordered, {"lo", "mid", "hi"}}},
                                   {"k", {ColumnKind::ordered, {"a", "b", "c"}}}}});
    const auto t2 = pairwise_scores(d2);
    REQUIRE(t2.size() == 1);
    CHECK(t2.rows()[0].score == "polychor");
}

TEST_CASE("row-count law for grouped single-score measures") {
    const auto levels = 3; // species
    for (const std::string m : {"pearson", "cancor", "nmi"}) {
        const auto grouped = pairwise_by(penguins(), "species", m);
        const auto ungrouped_only = pairwise_by(penguins(), "species", m, false);
        const auto base = apply_measure(penguins(), m);
        // pairs among the 7 non-by columns
        std::size_t eligible = 0;
        for (const auto& r : base.rows())
            if (r.x != "species" && r.y != "species") ++eligible;
        CHECK(grouped.size() == eligible * (levels + 1));
        CHECK(ungrouped_only.size() == eligible * levels);
    }
}

TEST_CASE("levels with zero rows still contribute missing-value rows") {
    Dataset d = parse_csv("g,x,y\na,1,2\na,2,3\nb,3,4\nb,4,5\n",
                          Schema{{{"g", {ColumnKind::factor, {"a", "b", "ghost"}}}}});
    const auto t = pairwise_by(d, "g", "pearson");
    REQUIRE(t.size() == 4); // a, b, ghost, all
    const auto* ghost = find_row(t, "x", "y", "pearson", "ghost");
    REQUIRE(ghost != nullptr);
    CHECK_FALSE(ghost->value.has_value());
}

TEST_CASE("reserved group label cannot be a factor level") {
    Dataset d = parse_csv("g,x,y\nall,1,2\nother,3,4\n", Schema{{{"g", {ColumnKind::factor, {}}}}});
    CHECK_THROWS_AS(pairwise_by(d, "g", "pearson"), Error);
}

TEST_CASE("parallel evaluation is bit-identical to serial") {
    setenv("PAIRSCORE_THREADS", "4", 1);
    const auto par = pairwise_scores(penguins(), ScoreControl{}, std::string("species"));
    const auto par2 = pairwise_multi(penguins(), {"pearson", "nmi", "chi"});
    setenv("PAIRSCORE_THREADS", "1", 1);
    const auto ser = pairwise_scores(penguins(), ScoreControl{}, std::string("species"));
    const auto ser2 = pairwise_multi(penguins(), {"pearson", "nmi", "chi"});
    unsetenv("PAIRSCORE_THREADS");
    CHECK(par.rows() == ser.rows());
    CHECK(par2.rows() == ser2.rows());
}

TEST_CASE("three all-type measures cover all 78 pairs of a 13-variable dataset") {
    // four numerics and nine factors, mirroring a census-style mix
    std::mt19937 rng(99);
    std::normal_distribution<double> N(0.0, 1.0);
    const std::size_t n = 120;
    Dataset d;
    d.n_rows = n;
    for (int c = 0; c < 13; ++c) {
        Column col;
        col.name = "c" + std::to_string(c < 10 ? c : c + 10); // keep names sortable
        if (c < 4) {
            col.kind = ColumnKind::numeric;
            for (std::size_t i = 0; i < n; ++i) col.numeric.push_back(N(rng));
        } else {
            col.kind = ColumnKind::factor;
            const int k = 2 + c % 3;
            for (int l = 0; l < k; ++l) col.levels.push_back("l" + std::to_string(l));
            for (std::size_t i = 0; i < n; ++i) col.codes.push_back(static_cast<int>(rng() % k));
        }
        col.missing.assign(n, 0);
        d.columns.push_back(std::move(col));
    }
    const auto t = pairwise_multi(d, {"cancor", "ace", "nmi"});
    CHECK(t.size() == 78 * 3);
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& r : t.rows()) pairs.insert({r.x, r.y});
    CHECK(pairs.size() == 78);
}

TEST_CASE("max_diff seriation pulls the Simpson's-paradox variable forward") {
    const auto t = pairwise_by(penguins(), "species", "pearson");
    const auto order = seriate_variables(t, SummaryMode::max_diff);
    REQUIRE(order.size() == 5);
    // bill_dep flips sign between pooled and per-species correlations, so its
    // pairs carry the largest group differences
    CHECK((order[0] == "bill_dep" || order[1] == "bill_dep"));
}

TEST_CASE("scagnostics measure emits nine rows per numeric pair") {
    const auto t = apply_measure(penguins(), "scagnostics");
    CHECK(t.size() == 90); // 10 nn pairs x 9 scores
    std::set<std::string> scores;
    for (const auto& r : t.rows()) scores.insert(r.score);
    CHECK(scores.size() == 9);
}
