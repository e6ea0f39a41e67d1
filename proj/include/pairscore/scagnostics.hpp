#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pairscore {

struct CloudPoint {
    double x = 0.0, y = 0.0;
};

/// Scatter cloud rescaled to the unit square, duplicate positions merged into
/// weighted points; hex-binned onto a 40-wide grid when n > 250.
struct BinnedCloud {
    std::vector<CloudPoint> points;
    std::vector<double> weights;
};

struct GraphEdge {
    std::size_t a = 0, b = 0;
    double length = 0.0;
};

struct GraphTriangle {
    std::size_t a = 0, b = 0, c = 0;
};

/// Geometric graphs underlying the diagnostics: Euclidean MST, convex hull
/// (counterclockwise), and the alpha complex cut from the Delaunay
/// triangulation at alpha = the 90th percentile of MST edge lengths.
struct GeomGraphs {
    std::vector<GraphEdge> mst_edges;
    std::vector<std::size_t> hull;
    std::vector<GraphEdge> alpha_edges;
    std::vector<GraphTriangle> alpha_triangles;
    double alpha = 0.0;
};

struct ScagnosticScores {
    std::optional<double> outlying, skewed, clumpy, sparse, striated, convex, skinny, stringy,
        monotonic;

    std::optional<double> by_name(const std::string& name) const;
};

const std::array<std::string, 9>& scagnostic_names();

/// nullopt when an axis is constant or fewer than 3 points remain.
std::optional<BinnedCloud> bin_cloud(std::span<const double> x, std::span<const double> y);

GeomGraphs build_graphs(const BinnedCloud& cloud);

/// All nine diagnostics; all-missing on degenerate clouds, convex/skinny
/// missing when the hull is flat.
ScagnosticScores scagnostics_scores(std::span<const double> x, std::span<const double> y);

} // namespace pairscore
