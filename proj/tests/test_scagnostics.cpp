#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pairscore/numeric_measures.hpp"
#include "pairscore/scagnostics.hpp"

using namespace pairscore;

namespace {

// exhaustive minimum spanning tree length by Prufer-sequence enumeration
double mst_oracle(const std::vector<CloudPoint>& pts) {
    const std::size_t n = pts.size();
    auto d = [&](std::size_t i, std::size_t j) {
        return std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
    };
    if (n == 2) return d(0, 1);
    // enumerate all n^(n-2) labelled trees
    std::vector<std::size_t> prufer(n - 2, 0);
    double best = HUGE_VAL;
    while (true) {
        // decode the Prufer sequence
        std::vector<int> degree(n, 1);
        for (std::size_t v : prufer) degree[v] += 1;
        double total = 0.0;
        std::vector<int> deg(degree);
        std::vector<bool> used(n, false);
        std::vector<std::size_t> seq(prufer);
        for (std::size_t v : seq) {
            std::size_t leaf = n;
            for (std::size_t u = 0; u < n; ++u)
                if (deg[u] == 1 && !used[u]) {
                    leaf = u;
                    break;
                }
            total += d(leaf, v);
            used[leaf] = true;
            deg[v] -= 1;
            deg[leaf] -= 1;
        }
        std::size_t u1 = n, u2 = n;
        for (std::size_t u = 0; u < n; ++u)
            if (!used[u] && deg[u] == 1) (u1 == n ? u1 : u2) = u;
        total += d(u1, u2);
        best = std::min(best, total);

        // next sequence
        std::size_t pos = 0;
        while (pos < prufer.size() && prufer[pos] == n - 1) prufer[pos++] = 0;
        if (pos == prufer.size()) break;
        prufer[pos] += 1;
    }
    return best;
}

std::vector<double> col(const std::vector<CloudPoint>& pts, bool x) {
    std::vector<double> v(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) v[i] = x ? pts[i].x : pts[i].y;
    return v;
}

} // namespace

TEST_CASE("bin_cloud identity below the binning threshold") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(100), y(100);
    for (int i = 0; i < 100; ++i) {
        x[i] = u(rng);
        y[i] = u(rng);
    }
    const auto cloud = bin_cloud(x, y);
    REQUIRE(cloud.has_value());
    CHECK(cloud->points.size() == 100);
    for (double w : cloud->weights) CHECK(w == 1.0);
    for (const auto& p : cloud->points) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= 1.0);
        CHECK(p.y >= 0.0);
        CHECK(p.y <= 1.0);
    }
}

TEST_CASE("bin_cloud hex binning conserves weight and caps the point count") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 10000;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = u(rng);
        y[i] = u(rng);
    }
    const auto cloud = bin_cloud(x, y);
    REQUIRE(cloud.has_value());
    CHECK(cloud->points.size() <= 1600);
    CHECK(std::accumulate(cloud->weights.begin(), cloud->weights.end(), 0.0) ==
          doctest::Approx(static_cast<double>(n)));
}

TEST_CASE("bin_cloud rejects degenerate input") {
    std::vector<double> x = {1, 2, 3, 4};
    std::vector<double> c = {7, 7, 7, 7};
    CHECK_FALSE(bin_cloud(x, c).has_value());
    CHECK_FALSE(bin_cloud(c, x).has_value());
    CHECK_FALSE(bin_cloud(std::vector<double>{1, 2}, std::vector<double>{1, 2}).has_value());
}

TEST_CASE("three points: MST takes the two shortest edges, hull has all three") {
    BinnedCloud cloud;
    cloud.points = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.8}};
    cloud.weights = {1, 1, 1};
    const auto g = build_graphs(cloud);
    REQUIRE(g.mst_edges.size() == 2);
    // edges sorted by length: (0,2) 0.8 then (0,1) 1.0; the 1.28-edge is excluded
    CHECK(g.mst_edges[0].length == doctest::Approx(0.8));
    CHECK(g.mst_edges[1].length == doctest::Approx(1.0));
    CHECK(g.hull.size() == 3);
}

TEST_CASE("square corners: MST length is three sides") {
    BinnedCloud cloud;
    cloud.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    cloud.weights = {1, 1, 1, 1};
    const auto g = build_graphs(cloud);
    double total = 0;
    for (const auto& e : g.mst_edges) total += e.length;
    CHECK(total == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(total == doctest::Approx(mst_oracle(cloud.points)).epsilon(1e-12));
}

TEST_CASE("MST length matches the exhaustive oracle for n <= 8") {
    std::mt19937 rng(33);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 3 + rng() % 6;
        BinnedCloud cloud;
        for (std::size_t i = 0; i < n; ++i) cloud.points.push_back({u(rng), u(rng)});
        cloud.weights.assign(n, 1.0);
        const auto g = build_graphs(cloud);
        double total = 0;
        for (const auto& e : g.mst_edges) total += e.length;
        CHECK(total == doctest::Approx(mst_oracle(cloud.points)).epsilon(1e-10));
    }
}

TEST_CASE("collinear points: flat hull, convex and skinny missing") {
    std::vector<double> x = {0, 1, 2, 3, 4, 5};
    std::vector<double> y = {0, 2, 4, 6, 8, 10};
    const auto s = scagnostics_scores(x, y);
    CHECK_FALSE(s.convex.has_value());
    CHECK_FALSE(s.skinny.has_value());
    CHECK(s.monotonic.has_value());
    CHECK(*s.monotonic == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("monotone scatter has monotonic one") {
    std::vector<double> x(60), y(60);
    for (int i = 0; i < 60; ++i) {
        x[i] = i;
        y[i] = std::sqrt(i + 1.0) + 0.01 * i;
    }
    const auto s = scagnostics_scores(x, y);
    REQUIRE(s.monotonic.has_value());
    CHECK(*s.monotonic == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("evenly spaced line: stringy is exactly one") {
    std::vector<double> x(20), y(20);
    for (int i = 0; i < 20; ++i) {
        x[i] = i;
        y[i] = 3.0 * i + 1.0;
    }
    const auto s = scagnostics_scores(x, y);
    REQUIRE(s.stringy.has_value());
    CHECK(*s.stringy == doctest::Approx(1.0));
    REQUIRE(s.outlying.has_value());
    CHECK(*s.outlying == doctest::Approx(0.0)); // equal edges, none beyond the fence
}

TEST_CASE("monotonic equals squared Spearman on unbinned inputs") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 10 + rng() % 100; // below the binning threshold
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = u(rng);
            y[i] = u(rng) + 0.5 * x[i];
        }
        const auto s = scagnostics_scores(x, y);
        const auto rho = rank_correlation(x, y, RankMethod::spearman);
        REQUIRE(s.monotonic.has_value());
        REQUIRE(rho.has_value());
        CHECK(*s.monotonic == doctest::Approx((*rho) * (*rho)).epsilon(1e-9));
    }
}

TEST_CASE("an injected outlier raises outlying (paired comparison)") {
    for (unsigned seed = 100; seed < 120; ++seed) {
        std::mt19937 rng(seed);
        std::normal_distribution<double> N(0.0, 1.0);
        std::vector<double> x, y;
        for (int i = 0; i < 60; ++i) {
            x.push_back(N(rng));
            y.push_back(N(rng));
        }
        const auto base = scagnostics_scores(x, y);
        auto x2 = x;
        auto y2 = y;
        x2.push_back(25.0);
        y2.push_back(25.0);
        const auto with_outlier = scagnostics_scores(x2, y2);
        REQUIRE(base.outlying.has_value());
        REQUIRE(with_outlier.outlying.has_value());
        CHECK(*with_outlier.outlying > *base.outlying);
    }
}

TEST_CASE("all scores stay in range and respect symmetries") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 20 + rng() % 300;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = u(rng);
            y[i] = u(rng) * u(rng);
        }
        const auto s = scagnostics_scores(x, y);
        for (const auto& name : scagnostic_names()) {
            const auto v = s.by_name(name);
            if (v) {
                CHECK(*v >= 0.0);
                CHECK(*v <= 1.0);
            }
        }

        // axis swap
        const auto sw = scagnostics_scores(y, x);
        for (const auto& name : scagnostic_names()) {
            const auto a = s.by_name(name);
            const auto b = sw.by_name(name);
            CHECK(a.has_value() == b.has_value());
            if (a && b) CHECK(*a == doctest::Approx(*b).epsilon(1e-9));
        }

        // positive affine rescaling of either axis
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = 100.0 + 42.0 * x[i];
        const auto sa = scagnostics_scores(xs, y);
        for (const auto& name : scagnostic_names()) {
            const auto a = s.by_name(name);
            const auto b = sa.by_name(name);
            CHECK(a.has_value() == b.has_value());
            if (a && b) CHECK(*a == doctest::Approx(*b).epsilon(1e-9));
        }
    }
}

TEST_CASE("two dense clusters score clumpy far above uniform scatter") {
    std::mt19937 rng(77);
    std::normal_distribution<double> N(0.0, 0.02);
    std::vector<double> x, y;
    for (int i = 0; i < 40; ++i) {
        x.push_back(0.1 + N(rng));
        y.push_back(0.1 + N(rng));
        x.push_back(0.9 + N(rng));
        y.push_back(0.9 + N(rng));
    }
    const auto clustered = scagnostics_scores(x, y);
    REQUIRE(clustered.clumpy.has_value());
    CHECK(*clustered.clumpy > 0.9);

    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> ux(80), uy(80);
    for (int i = 0; i < 80; ++i) {
        ux[i] = u(rng);
        uy[i] = u(rng);
    }
    const auto uniform = scagnostics_scores(ux, uy);
    REQUIRE(uniform.clumpy.has_value());
    CHECK(*clustered.clumpy > *uniform.clumpy);
}

TEST_CASE("convex near one for a filled disc, skinny near one for a thin path") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x, y;
    while (x.size() < 200) {
        const double px = u(rng), py = u(rng);
        if (px * px + py * py <= 1.0) {
            x.push_back(px);
            y.push_back(py);
        }
    }
    const auto disc = scagnostics_scores(x, y);
    REQUIRE(disc.convex.has_value());
    CHECK(*disc.convex > 0.6);
    REQUIRE(disc.skinny.has_value());

    // a slightly wiggly monotone path is skinny, the disc much less so
    std::vector<double> px(120), py(120);
    for (int i = 0; i < 120; ++i) {
        px[i] = i / 119.0;
        py[i] = px[i] + 0.002 * std::sin(i);
    }
    const auto path = scagnostics_scores(px, py);
    REQUIRE(path.skinny.has_value());
    CHECK(*path.skinny > 0.8);
    CHECK(*disc.skinny < *path.skinny);
    REQUIRE(path.convex.has_value());
    CHECK(*path.convex < *disc.convex);
}
