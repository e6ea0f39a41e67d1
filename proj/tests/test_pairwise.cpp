#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "pairscore/errors.hpp"
#include "pairscore/pairwise.hpp"

using namespace pairscore;

namespace {

PairwiseRow make_row(std::string x, std::string y, std::string score, std::string group,
                     std::optional<double> value, PairType pt = PairType::nn) {
    PairwiseRow r;
    r.x = std::move(x);
    r.y = std::move(y);
    r.score = std::move(score);
    r.group = std::move(group);
    r.value = value;
    r.pair_type = pt;
    return r;
}

PairwiseTable random_table(std::mt19937& rng, int n_vars = 5, int n_scores = 2, int n_groups = 2) {
    std::vector<PairwiseRow> rows;
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (int i = 0; i < n_vars; ++i) {
        for (int j = i + 1; j < n_vars; ++j) {
            for (int s = 0; s < n_scores; ++s) {
                for (int g = 0; g <= n_groups; ++g) {
                    if (rng() % 4 == 0) continue; // leave holes
                    const std::string group = g == n_groups ? "all" : "g" + std::to_string(g);
                    std::optional<double> v;
                    if (rng() % 5 != 0) v = val(rng);
                    rows.push_back(make_row("v" + std::to_string(i), "v" + std::to_string(j),
                                            "s" + std::to_string(s), group, v));
                }
            }
        }
    }
    return new_pairwise(std::move(rows));
}

} // namespace

TEST_CASE("variable pairs are swapped into alphabetical order") {
    const auto t =
        new_pairwise({make_row("bill_len", "bill_dep", "pearson", "all", -0.235, PairType::nn)});
    REQUIRE(t.size() == 1);
    CHECK(t.rows()[0].x == "bill_dep");
    CHECK(t.rows()[0].y == "bill_len");
    CHECK(t.rows()[0].value == -0.235);
}

TEST_CASE("empty input gives an empty valid table") {
    const auto t = new_pairwise({});
    CHECK(t.empty());
    CHECK(t.variables().empty());
}

TEST_CASE("duplicate keys are an error, not a silent drop") {
    CHECK_THROWS_WITH_AS(new_pairwise({make_row("a", "b", "pearson", "all", 0.1),
                                       make_row("b", "a", "pearson", "all", 0.2)}),
                         doctest::Contains("DuplicateKey"), Error);
}

TEST_CASE("self pairs and range violations are rejected") {
    CHECK_THROWS_WITH_AS(new_pairwise({make_row("a", "a", "pearson", "all", 0.1)}),
                         doctest::Contains("SelfPair"), Error);
    CHECK_THROWS_WITH_AS(new_pairwise({make_row("a", "b", "pearson", "all", 1.5)}),
                         doctest::Contains("RangeViolation"), Error);
    CHECK_THROWS_WITH_AS(new_pairwise({make_row("a", "b", "dcor", "all", -0.2)}),
                         doctest::Contains("RangeViolation"), Error);
    // unknown score names are accepted with no range check
    CHECK_NOTHROW(new_pairwise({make_row("a", "b", "somescore", "all", 42.0)}));
}

TEST_CASE("canonical sort puts group 'all' after named groups") {
    const auto t = new_pairwise({
        make_row("a", "b", "pearson", "all", 0.1),
        make_row("a", "b", "pearson", "Gentoo", 0.2),
        make_row("a", "b", "pearson", "Adelie", 0.3),
    });
    REQUIRE(t.size() == 3);
    CHECK(t.rows()[0].group == "Adelie");
    CHECK(t.rows()[1].group == "Gentoo");
    CHECK(t.rows()[2].group == "all");
}

TEST_CASE("canonicalization is idempotent (property)") {
    std::mt19937 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const auto t = random_table(rng);
        auto rows = t.rows();
        const auto t2 = new_pairwise(std::move(rows));
        CHECK(t2.rows() == t.rows());
    }
}

TEST_CASE("from_matrix produces p(p-1)/2 rows and validates input") {
    LabeledMatrix m = LabeledMatrix::zeros({"a", "b", "c", "d", "e"});
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (std::size_t i = 0; i < 5; ++i) {
        m.at(i, i) = 1.0;
        for (std::size_t j = i + 1; j < 5; ++j) {
            const double v = val(rng);
            m.at(i, j) = v;
            m.at(j, i) = v;
        }
    }
    const auto t = from_matrix(m, "pearson", PairType::nn);
    CHECK(t.size() == 10);
    for (const auto& r : t.rows()) CHECK(r.group == "all");

    SUBCASE("1x1 matrix gives an empty table") {
        LabeledMatrix one = LabeledMatrix::zeros({"x"});
        one.at(0, 0) = 1.0;
        CHECK(from_matrix(one, "pearson", PairType::nn).empty());
    }
    SUBCASE("asymmetry beyond 1e-12 is rejected") {
        m.at(0, 1) = *m.at(1, 0) + 1e-3;
        CHECK_THROWS_WITH_AS(from_matrix(m, "pearson", PairType::nn),
                             doctest::Contains("AsymmetricInput"), Error);
    }
    SUBCASE("duplicate labels are rejected") {
        LabeledMatrix dup = LabeledMatrix::zeros({"a", "a"});
        CHECK_THROWS_WITH_AS(from_matrix(dup, "pearson", PairType::nn),
                             doctest::Contains("DuplicateLabels"), Error);
    }
}

TEST_CASE("from_matrix then to_matrix restores the input exactly (100 seeds)") {
    for (unsigned seed = 0; seed < 100; ++seed) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> val(-1.0, 1.0);
        const std::size_t p = 2 + rng() % 6;
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < p; ++i) labels.push_back("v" + std::to_string(i));
        LabeledMatrix m = LabeledMatrix::zeros(labels);
        for (std::size_t i = 0; i < p; ++i) {
            m.at(i, i) = 1.0;
            for (std::size_t j = i + 1; j < p; ++j) {
                const double v = val(rng);
                m.at(i, j) = v;
                m.at(j, i) = v;
            }
        }
        const LabeledMatrix back = to_matrix(from_matrix(m, "pearson", PairType::nn));
        REQUIRE(back.labels == m.labels);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                if (i == j) CHECK(back.at(i, j) == 1.0);
                else CHECK(back.at(i, j) == m.at(i, j)); // exact
            }
    }
}

TEST_CASE("to_matrix uses the first entry in canonical order") {
    const auto t = new_pairwise({
        make_row("a", "b", "pearson", "all", 0.5),
        make_row("a", "b", "spearman", "all", 0.9),
    });
    const auto m = to_matrix(t);
    CHECK(*m.at(0, 1) == 0.5); // pearson sorts before spearman
    CHECK(m.at(0, 0) == 1.0);

    SUBCASE("named groups sort before 'all' and win the first-entry rule") {
        const auto g = to_matrix(new_pairwise({
            make_row("a", "b", "pearson", "all", -0.2),
            make_row("a", "b", "pearson", "Adelie", 0.4),
        }));
        CHECK(*g.at(0, 1) == 0.4);
    }
}

TEST_CASE("to_matrix universe is the mentioned variables only") {
    const auto t = new_pairwise({make_row("a", "b", "pearson", "all", 0.3)});
    const auto m = to_matrix(t);
    CHECK(m.labels == std::vector<std::string>{"a", "b"});
    CHECK(m.size() == 2);

    SUBCASE("absent pairs stay missing") {
        const auto t3 = new_pairwise({
            make_row("a", "b", "pearson", "all", 0.3),
            make_row("b", "c", "pearson", "all", 0.1),
        });
        const auto m3 = to_matrix(t3);
        CHECK(m3.size() == 3);
        CHECK_FALSE(m3.at(0, 2).has_value()); // (a, c) never scored
        CHECK(*m3.at(1, 2) == 0.1);
    }
    SUBCASE("empty table gives a 0x0 matrix") { CHECK(to_matrix(new_pairwise({})).size() == 0); }
}

TEST_CASE("filter_pairs thresholds") {
    const auto t = new_pairwise({
        make_row("a", "b", "s1", "all", 0.9),
        make_row("a", "b", "s2", "all", 0.1),
        make_row("a", "c", "s1", "all", 0.2),
        make_row("a", "c", "s2", "all", -0.05),
        make_row("b", "c", "s1", "all", std::nullopt),
        make_row("b", "c", "s2", "all", std::nullopt),
    });

    SUBCASE("zero threshold keeps every pair with any value") {
        FilterSpec spec;
        spec.min_max_abs = 0.0;
        const auto f = filter_pairs(t, spec);
        // the all-missing (b, c) pair is dropped under any numeric criterion
        CHECK(f.size() == 4);
    }
    SUBCASE("unreachable threshold empties the table") {
        FilterSpec spec;
        spec.min_max_abs = 1.5;
        CHECK(filter_pairs(t, spec).empty());
    }
    SUBCASE("max-abs keeps whole pairs") {
        FilterSpec spec;
        spec.min_max_abs = 0.5;
        const auto f = filter_pairs(t, spec);
        CHECK(f.size() == 2); // both (a, b) rows survive
        for (const auto& r : f.rows()) CHECK(r.y == "b");
    }
    SUBCASE("range criterion is a disjunction with max-abs") {
        FilterSpec spec;
        spec.min_max_abs = 0.5;
        spec.min_range = 0.2;
        const auto f = filter_pairs(t, spec);
        CHECK(f.size() == 4); // (a, c) qualifies by range 0.25
    }
    SUBCASE("with_variable restricts independently") {
        FilterSpec spec;
        spec.with_variable = "c";
        const auto f = filter_pairs(t, spec);
        CHECK(f.size() == 4);
        for (const auto& r : f.rows()) CHECK((r.x == "c" || r.y == "c"));
    }
    SUBCASE("unknown variable is an error") {
        FilterSpec spec;
        spec.with_variable = "zz";
        CHECK_THROWS_WITH_AS(filter_pairs(t, spec), doctest::Contains("UnknownVariable"), Error);
    }
}

TEST_CASE("filtering is monotone and returns a subset (property)") {
    std::mt19937 rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        const auto t = random_table(rng);
        FilterSpec lo, hi;
        lo.min_max_abs = 0.3;
        hi.min_max_abs = 0.6;
        const auto f_lo = filter_pairs(t, lo);
        const auto f_hi = filter_pairs(t, hi);
        CHECK(f_hi.size() <= f_lo.size());
        for (const auto& r : f_lo.rows())
            CHECK(std::count(t.rows().begin(), t.rows().end(), r) == 1);
        for (const auto& r : f_hi.rows())
            CHECK(std::count(f_lo.rows().begin(), f_lo.rows().end(), r) == 1);
    }
}

TEST_CASE("pivot_wide spreads scores into columns") {
    const auto t = new_pairwise({
        make_row("a", "b", "cancor", "all", 0.5),
        make_row("a", "b", "ace", "all", 0.6),
        make_row("a", "b", "nmi", "all", 0.3),
        make_row("a", "c", "cancor", "all", 0.2),
    });
    const auto w = pivot_wide(t);
    CHECK(w.score_names == std::vector<std::string>{"ace", "cancor", "nmi"});
    REQUIRE(w.rows.size() == 2);
    CHECK(w.rows[0].x == "a");
    CHECK(w.rows[0].y == "b");
    CHECK(*w.rows[0].values[0] == 0.6);
    CHECK(*w.rows[0].values[1] == 0.5);
    CHECK_FALSE(w.rows[1].values[0].has_value()); // (a, c) has no ace

    SUBCASE("single score keeps the row count") {
        const auto t1 = new_pairwise({make_row("a", "b", "s", "all", 0.5),
                                      make_row("a", "c", "s", "all", 0.1)});
        const auto w1 = pivot_wide(t1);
        CHECK(w1.score_names.size() == 1);
        CHECK(w1.rows.size() == t1.size());
    }
    SUBCASE("groups are part of the key") {
        const auto tg = new_pairwise({
            make_row("a", "b", "s", "g1", 0.1),
            make_row("a", "b", "s", "g2", 0.2),
            make_row("a", "b", "s", "all", 0.3),
        });
        const auto wg = pivot_wide(tg);
        REQUIRE(wg.rows.size() == 3); // one row per (pair, group)
        CHECK(wg.rows[0].group == "g1");
        CHECK(wg.rows[1].group == "g2");
        CHECK(wg.rows[2].group == "all");
        CHECK(*wg.rows[2].values[0] == 0.3);
    }
}

TEST_CASE("score CSV round trip is a fixpoint") {
    std::mt19937 rng(5);
    const auto t = random_table(rng, 4, 2, 2);

    std::ostringstream first;
    write_score_csv(t, first);
    std::istringstream in(first.str());
    const auto back = read_score_csv(in);

    REQUIRE(back.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(back.rows()[i].x == t.rows()[i].x);
        CHECK(back.rows()[i].y == t.rows()[i].y);
        CHECK(back.rows()[i].score == t.rows()[i].score);
        CHECK(back.rows()[i].group == t.rows()[i].group);
        CHECK(back.rows()[i].value.has_value() == t.rows()[i].value.has_value());
        if (back.rows()[i].value)
            CHECK(*back.rows()[i].value ==
                  doctest::Approx(*t.rows()[i].value).epsilon(1e-14));
    }
    std::ostringstream second;
    write_score_csv(back, second);
    CHECK(second.str() == first.str()); // byte-identical after one round trip
}

TEST_CASE("score CSV header and format validation") {
    {
        std::istringstream in("x,y,score,group,value\n");
        CHECK_THROWS_WITH_AS(read_score_csv(in), doctest::Contains("FormatError"), Error);
    }
    {
        std::istringstream in("x,y,score,group,value,pair_type\na,b,s,all,zz,nn\n");
        CHECK_THROWS_WITH_AS(read_score_csv(in), doctest::Contains("FormatError"), Error);
    }
    {
        std::istringstream in("x,y,score,group,value,pair_type\na,b,s,all,0.5,qq\n");
        CHECK_THROWS_WITH_AS(read_score_csv(in), doctest::Contains("FormatError"), Error);
    }
    { // missing value = empty field
        std::istringstream in("x,y,score,group,value,pair_type\na,b,s,all,,nn\n");
        const auto t = read_score_csv(in);
        REQUIRE(t.size() == 1);
        CHECK_FALSE(t.rows()[0].value.has_value());
    }
}

TEST_CASE("method registry holds the seventeen measures") {
    const auto& reg = method_registry();
    CHECK(reg.size() == 17);
    int ordinal = 0, all_types = 0;
    for (const auto& m : reg) {
        ordinal += m.ordinal;
        if (m.nn && m.ff && m.fn) ++all_types;
        CHECK(((m.range_lo == -1.0 && m.range_hi == 1.0) ||
               (m.range_lo == 0.0 && m.range_hi == 1.0)));
    }
    CHECK(ordinal == 8);
    CHECK(all_types == 3); // ace, cancor, nmi

    CHECK(score_range("pearson") == std::make_pair(-1.0, 1.0));
    CHECK(score_range("MIC") == std::make_pair(0.0, 1.0));
    CHECK(score_range("monotonic") == std::make_pair(0.0, 1.0));
    CHECK_FALSE(score_range("mystery").has_value());
}
