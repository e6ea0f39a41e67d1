#include "pairscore/scagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "pairscore/errors.hpp"

namespace pairscore {

const std::array<std::string, 9>& scagnostic_names() {
    static const std::array<std::string, 9> names = {"outlying", "skewed",   "clumpy",
                                                     "sparse",   "striated", "convex",
                                                     "skinny",   "stringy",  "monotonic"};
    return names;
}

std::optional<double> ScagnosticScores::by_name(const std::string& name) const {
    if (name == "outlying") return outlying;
    if (name == "skewed") return skewed;
    if (name == "clumpy") return clumpy;
    if (name == "sparse") return sparse;
    if (name == "striated") return striated;
    if (name == "convex") return convex;
    if (name == "skinny") return skinny;
    if (name == "stringy") return stringy;
    if (name == "monotonic") return monotonic;
    return std::nullopt;
}

namespace {

constexpr int kGridWidth = 40; // hex lattice columns and row cap (<= 1600 cells)

double quantile7(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[std::min(lo + 1, v.size() - 1)] - v[lo]);
}

double dist(const CloudPoint& a, const CloudPoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double cross(const CloudPoint& o, const CloudPoint& a, const CloudPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

} // namespace

std::optional<BinnedCloud> bin_cloud(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size()) fail("LengthMismatch", "vectors differ in length");
    if (n < 3) return std::nullopt;
    double xmin = x[0], xmax = x[0], ymin = y[0], ymax = y[0];
    for (std::size_t i = 1; i < n; ++i) {
        xmin = std::min(xmin, x[i]);
        xmax = std::max(xmax, x[i]);
        ymin = std::min(ymin, y[i]);
        ymax = std::max(ymax, y[i]);
    }
    if (xmax <= xmin || ymax <= ymin) return std::nullopt; // constant axis

    std::vector<CloudPoint> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i].x = (x[i] - xmin) / (xmax - xmin);
        scaled[i].y = (y[i] - ymin) / (ymax - ymin);
    }

    std::map<std::pair<double, double>, double> agg;
    if (n > 250) {
        // 40x40 cell grid, points snapped to cell centers. A square lattice
        // keeps the axis-swap invariance of the scores exact, which an
        // oriented hexagon lattice cannot. Normalized coordinates are rounded
        // to 1e-12 first so cell assignment survives affine rescaling noise,
        // and centers carry a tiny symmetric jitter that removes the exact
        // cocircularity of grid quads from the triangulation.
        auto jitter = [](int i, int j) {
            const unsigned h = static_cast<unsigned>(i) * 73856093u ^ static_cast<unsigned>(j) * 19349663u;
            return (static_cast<double>(h % 2000003u) / 2000003.0 - 0.5) * 2e-7;
        };
        for (const auto& p : scaled) {
            const double tx = std::round(p.x * 1e12) / 1e12;
            const double ty = std::round(p.y * 1e12) / 1e12;
            const int i = std::min(kGridWidth - 1, static_cast<int>(tx * kGridWidth));
            const int j = std::min(kGridWidth - 1, static_cast<int>(ty * kGridWidth));
            agg[{(i + 0.5) / kGridWidth + jitter(i, j), (j + 0.5) / kGridWidth + jitter(j, i)}] +=
                1.0;
        }
    } else {
        for (const auto& p : scaled) agg[{p.x, p.y}] += 1.0;
    }

    BinnedCloud cloud;
    cloud.points.reserve(agg.size());
    cloud.weights.reserve(agg.size());
    for (const auto& [pos, w] : agg) {
        cloud.points.push_back({pos.first, pos.second});
        cloud.weights.push_back(w);
    }
    if (cloud.points.size() < 3) return std::nullopt;
    return cloud;
}

// --- geometric graphs ----------------------------------------------------------

namespace {

std::vector<GraphEdge> prim_mst(const std::vector<CloudPoint>& pts) {
    const std::size_t m = pts.size();
    std::vector<GraphEdge> edges;
    if (m < 2) return edges;
    std::vector<double> key(m, HUGE_VAL);
    std::vector<std::size_t> parent(m, 0);
    std::vector<char> in_tree(m, 0);
    key[0] = 0.0;
    for (std::size_t it = 0; it < m; ++it) {
        std::size_t u = m;
        for (std::size_t v = 0; v < m; ++v)
            if (!in_tree[v] && (u == m || key[v] < key[u])) u = v;
        in_tree[u] = 1;
        if (u != 0)
            edges.push_back(
                {std::min(u, parent[u]), std::max(u, parent[u]), dist(pts[u], pts[parent[u]])});
        for (std::size_t v = 0; v < m; ++v) {
            if (in_tree[v]) continue;
            const double d = dist(pts[u], pts[v]);
            if (d < key[v]) {
                key[v] = d;
                parent[v] = u;
            }
        }
    }
    std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        if (a.length != b.length) return a.length < b.length;
        if (a.a != b.a) return a.a < b.a;
        return a.b < b.b;
    });
    return edges;
}

std::vector<std::size_t> convex_hull(const std::vector<CloudPoint>& pts) {
    const std::size_t m = pts.size();
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
        return pts[a].y < pts[b].y;
    });
    if (m < 3) return idx;
    std::vector<std::size_t> h(2 * m);
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) { // lower chain
        while (k >= 2 && cross(pts[h[k - 2]], pts[h[k - 1]], pts[idx[i]]) <= 0.0) --k;
        h[k++] = idx[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t ii = m - 1; ii-- > 0;) { // upper chain
        while (k >= lower && cross(pts[h[k - 2]], pts[h[k - 1]], pts[idx[ii]]) <= 0.0) --k;
        h[k++] = idx[ii];
    }
    h.resize(k - 1);
    return h; // counterclockwise
}

double polygon_area(const std::vector<CloudPoint>& pts, const std::vector<std::size_t>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& p = pts[poly[i]];
        const auto& q = pts[poly[(i + 1) % poly.size()]];
        a += p.x * q.y - q.x * p.y;
    }
    return std::abs(a) / 2.0;
}

// Bowyer-Watson triangulation; circumcircles in long double, cocircular
// points resolve to "outside" so insertion stays deterministic.
struct DelaunayTri {
    std::size_t a, b, c;
    long double ux, uy, r2;
    bool contains_all = false;
    bool alive = true;

    bool circum_contains(const CloudPoint& p) const {
        if (contains_all) return true;
        const long double dx = static_cast<long double>(p.x) - ux;
        const long double dy = static_cast<long double>(p.y) - uy;
        return dx * dx + dy * dy < r2 * (1.0L - 1e-12L);
    }
};

std::vector<GraphTriangle> delaunay(const std::vector<CloudPoint>& pts) {
    const std::size_t m = pts.size();
    if (m < 3) return {};

    std::vector<CloudPoint> v(pts);
    // super-triangle well outside the unit square
    v.push_back({-10.0, -10.0});
    v.push_back({30.0, -10.0});
    v.push_back({0.5, 30.0});
    const std::size_t s0 = m, s1 = m + 1, s2 = m + 2;

    auto make_tri = [&](std::size_t a, std::size_t b, std::size_t c) {
        DelaunayTri t{a, b, c, 0.0L, 0.0L, 0.0L, false, true};
        const long double ax = v[a].x, ay = v[a].y;
        const long double bx = v[b].x, by = v[b].y;
        const long double cx = v[c].x, cy = v[c].y;
        const long double d = 2.0L * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
        if (std::abs(static_cast<double>(d)) < 1e-30) {
            t.contains_all = true;
            return t;
        }
        const long double a2 = ax * ax + ay * ay;
        const long double b2 = bx * bx + by * by;
        const long double c2 = cx * cx + cy * cy;
        t.ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
        t.uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
        const long double dx = ax - t.ux, dy = ay - t.uy;
        t.r2 = dx * dx + dy * dy;
        return t;
    };

    std::vector<DelaunayTri> tris;
    tris.push_back(make_tri(s0, s1, s2));

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
        return pts[a].y < pts[b].y;
    });

    for (std::size_t pi : order) {
        const CloudPoint& p = pts[pi];
        std::map<std::pair<std::size_t, std::size_t>, int> edge_count;
        std::vector<std::size_t> bad;
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!tris[t].alive || !tris[t].circum_contains(p)) continue;
            bad.push_back(t);
            auto add_edge = [&](std::size_t a, std::size_t b) {
                edge_count[{std::min(a, b), std::max(a, b)}] += 1;
            };
            add_edge(tris[t].a, tris[t].b);
            add_edge(tris[t].b, tris[t].c);
            add_edge(tris[t].c, tris[t].a);
        }
        for (std::size_t t : bad) tris[t].alive = false;
        for (const auto& [edge, count] : edge_count) {
            if (count != 1) continue; // interior edge of the cavity
            tris.push_back(make_tri(edge.first, edge.second, pi));
        }
        // compact occasionally to keep the scan cheap
        if (tris.size() > 16 * m + 64) {
            std::vector<DelaunayTri> live;
            live.reserve(tris.size());
            for (auto& t : tris)
                if (t.alive) live.push_back(t);
            tris = std::move(live);
        }
    }

    std::vector<GraphTriangle> out;
    for (const auto& t : tris) {
        if (!t.alive) continue;
        if (t.a >= m || t.b >= m || t.c >= m) continue; // touches the super-triangle
        out.push_back({t.a, t.b, t.c});
    }
    std::sort(out.begin(), out.end(), [](const GraphTriangle& a, const GraphTriangle& b) {
        if (a.a != b.a) return a.a < b.a;
        if (a.b != b.b) return a.b < b.b;
        return a.c < b.c;
    });
    return out;
}

} // namespace

GeomGraphs build_graphs(const BinnedCloud& cloud) {
    GeomGraphs g;
    g.mst_edges = prim_mst(cloud.points);
    g.hull = convex_hull(cloud.points);

    std::vector<double> lengths;
    lengths.reserve(g.mst_edges.size());
    for (const auto& e : g.mst_edges) lengths.push_back(e.length);
    g.alpha = quantile7(lengths, 0.90);

    auto tris = delaunay(cloud.points);
    std::map<std::pair<std::size_t, std::size_t>, double> dedges;
    for (const auto& t : tris) {
        auto add = [&](std::size_t a, std::size_t b) {
            const auto key = std::make_pair(std::min(a, b), std::max(a, b));
            dedges.emplace(key, dist(cloud.points[a], cloud.points[b]));
        };
        add(t.a, t.b);
        add(t.b, t.c);
        add(t.c, t.a);
    }
    if (tris.empty()) {
        // collinear cloud: no triangulation, alpha graph falls back to the MST
        for (const auto& e : g.mst_edges)
            if (e.length <= g.alpha) g.alpha_edges.push_back(e);
    } else {
        for (const auto& [key, len] : dedges)
            if (len <= g.alpha) g.alpha_edges.push_back({key.first, key.second, len});
    }
    // alpha-complex triangle rule: a Delaunay triangle belongs to the shape
    // when its circumradius is at most alpha
    for (const auto& t : tris) {
        const double ab = dist(cloud.points[t.a], cloud.points[t.b]);
        const double bc = dist(cloud.points[t.b], cloud.points[t.c]);
        const double ca = dist(cloud.points[t.c], cloud.points[t.a]);
        const double area2 = std::abs(cross(cloud.points[t.a], cloud.points[t.b], cloud.points[t.c]));
        if (area2 <= 0.0) continue;
        const double circumradius = ab * bc * ca / (2.0 * area2);
        if (circumradius <= g.alpha) g.alpha_triangles.push_back(t);
    }
    return g;
}

// --- the nine scores ------------------------------------------------------------

namespace {

struct Dsu {
    std::vector<std::size_t> parent, size;
    std::vector<double> max_edge;

    explicit Dsu(std::size_t n) : parent(n), size(n, 1), max_edge(n, 0.0) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b, double len) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
        max_edge[a] = std::max({max_edge[a], max_edge[b], len});
    }
};

// Hartigan-Mohanty runt statistic: for each MST edge, the components grown
// from strictly shorter edges; the smaller side is the runt.
double clumpy_score(const std::vector<GraphEdge>& mst, std::size_t n_vertices) {
    Dsu dsu(n_vertices);
    double best = 0.0;
    std::size_t i = 0;
    while (i < mst.size()) {
        std::size_t j = i;
        while (j + 1 < mst.size() && mst[j + 1].length == mst[i].length) ++j;
        for (std::size_t e = i; e <= j; ++e) {
            const std::size_t ra = dsu.find(mst[e].a);
            const std::size_t rb = dsu.find(mst[e].b);
            std::size_t runt;
            if (dsu.size[ra] != dsu.size[rb]) runt = dsu.size[ra] < dsu.size[rb] ? ra : rb;
            else runt = dsu.max_edge[ra] <= dsu.max_edge[rb] ? ra : rb; // geometric tie-break
            if (dsu.size[runt] >= 2 && mst[e].length > 0.0)
                best = std::max(best, 1.0 - dsu.max_edge[runt] / mst[e].length);
        }
        for (std::size_t e = i; e <= j; ++e) dsu.unite(mst[e].a, mst[e].b, mst[e].length);
        i = j + 1;
    }
    return std::clamp(best, 0.0, 1.0);
}

// weighted mid-ranks over blocks of equal values
std::vector<double> weighted_ranks(const std::vector<double>& v, const std::vector<double>& w) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    double before = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        double block = w[idx[i]];
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) block += w[idx[++j]];
        const double r = before + (block + 1.0) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        before += block;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> weighted_pearson(const std::vector<double>& x, const std::vector<double>& y,
                                       const std::vector<double>& w) {
    double sw = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        mx += w[i] * x[i];
        my += w[i] * y[i];
    }
    mx /= sw;
    my /= sw;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        syy += w[i] * (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

} // namespace

ScagnosticScores scagnostics_scores(std::span<const double> x, std::span<const double> y) {
    ScagnosticScores s;
    const auto cloud = bin_cloud(x, y);
    if (!cloud) return s;
    const auto& pts = cloud->points;
    const std::size_t m = pts.size();
    const GeomGraphs g = build_graphs(*cloud);

    std::vector<double> lengths;
    lengths.reserve(g.mst_edges.size());
    double total_len = 0.0;
    for (const auto& e : g.mst_edges) {
        lengths.push_back(e.length);
        total_len += e.length;
    }

    if (total_len > 0.0) {
        const double q25 = quantile7(lengths, 0.25);
        const double q75 = quantile7(lengths, 0.75);
        const double omega = q75 + 1.5 * (q75 - q25);
        double long_len = 0.0;
        for (const auto& e : g.mst_edges)
            if (e.length > omega) long_len += e.length;
        s.outlying = std::clamp(long_len / total_len, 0.0, 1.0);

        const double q10 = quantile7(lengths, 0.10);
        const double q50 = quantile7(lengths, 0.50);
        const double q90 = quantile7(lengths, 0.90);
        if (q90 - q10 > 0.0) s.skewed = std::clamp((q90 - q50) / (q90 - q10), 0.0, 1.0);
        s.sparse = std::clamp(q90, 0.0, 1.0);
        s.clumpy = clumpy_score(g.mst_edges, m);
    }

    // degree census
    std::vector<std::vector<std::size_t>> adj(m);
    for (const auto& e : g.mst_edges) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    std::size_t leaves = 0, degree2 = 0, straight = 0;
    for (std::size_t v = 0; v < m; ++v) {
        if (adj[v].size() == 1) ++leaves;
        if (adj[v].size() == 2) {
            ++degree2;
            const auto& a = pts[adj[v][0]];
            const auto& b = pts[adj[v][1]];
            const auto& o = pts[v];
            const double la = dist(o, a), lb = dist(o, b);
            if (la > 0.0 && lb > 0.0) {
                const double cosv =
                    ((a.x - o.x) * (b.x - o.x) + (a.y - o.y) * (b.y - o.y)) / (la * lb);
                if (std::abs(cosv) >= 0.75) ++straight;
            }
        }
    }
    s.striated = static_cast<double>(straight) / static_cast<double>(m);
    if (m > leaves) s.stringy = static_cast<double>(degree2) / static_cast<double>(m - leaves);

    // alpha-shape area and boundary
    const double hull_area = polygon_area(pts, g.hull);
    if (hull_area > 1e-12) {
        double alpha_area = 0.0;
        std::map<std::pair<std::size_t, std::size_t>, int> adjacency;
        for (const auto& e : g.alpha_edges) adjacency[{e.a, e.b}] = 0;
        for (const auto& t : g.alpha_triangles) {
            alpha_area += std::abs(cross(pts[t.a], pts[t.b], pts[t.c])) / 2.0;
            adjacency[{std::min(t.a, t.b), std::max(t.a, t.b)}] += 1;
            adjacency[{std::min(t.b, t.c), std::max(t.b, t.c)}] += 1;
            adjacency[{std::min(t.c, t.a), std::max(t.c, t.a)}] += 1;
        }
        double perimeter = 0.0;
        for (const auto& [edge, count] : adjacency) {
            const double len = dist(pts[edge.first], pts[edge.second]);
            if (count == 0) perimeter += 2.0 * len; // dangling edge, both sides exposed
            else if (count == 1) perimeter += len;
        }
        s.convex = std::clamp(alpha_area / hull_area, 0.0, 1.0);
        if (perimeter > 0.0)
            s.skinny = std::clamp(1.0 - std::sqrt(4.0 * M_PI * alpha_area) / perimeter, 0.0, 1.0);
    }

    // weighted Spearman on the binned points
    std::vector<double> xs(m), ys(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = pts[i].x;
        ys[i] = pts[i].y;
    }
    const auto rx = weighted_ranks(xs, cloud->weights);
    const auto ry = weighted_ranks(ys, cloud->weights);
    if (auto r = weighted_pearson(rx, ry, cloud->weights)) s.monotonic = (*r) * (*r);

    return s;
}

} // namespace pairscore
