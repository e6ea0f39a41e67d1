#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pairscore/pairwise.hpp"
#include "pairscore/seriation.hpp"

namespace pairscore {

struct Color {
    std::uint8_t r = 0, g = 0, b = 0;
    std::string hex() const;
};

/// Value-to-fill mapping keyed to a score's registered range: diverging
/// blue-white-red for signed ranges, sequential light-to-dark blue for [0,1];
/// missing values map to the fixed grey.
struct ColorScale {
    double lo = -1.0, hi = 1.0;
    bool diverging = true;

    static ColorScale for_score(const std::string& score, const PairwiseTable& t);
    Color map(std::optional<double> value) const;
    static Color na_color();
};

/// One wedge of a bullseye glyph; angles in radians anti-clockwise from
/// 3 o'clock, spans partition [0, 2pi) within each ring.
struct GlyphWedge {
    std::string score, group;
    std::optional<double> value;
    double a0 = 0.0, a1 = 0.0;
    bool inner = true;
};

struct GlyphSpec {
    std::string x, y;       // pair, x < y
    std::size_t row = 0, col = 0; // grid cell (row > col: lower triangle)
    std::vector<GlyphWedge> inner_wedges;
    std::vector<GlyphWedge> outer_wedges;
    double inner_radius_frac = 0.5;
};

/// Glyph layout for the matrix display over a fixed variable order;
/// exposed separately so the wedge bookkeeping is testable without SVG.
std::vector<GlyphSpec> layout_matrix_glyphs(const PairwiseTable& t,
                                            const std::vector<std::string>& var_order);

// --- scene model -----------------------------------------------------------

struct WedgeMark {
    double cx = 0, cy = 0, r0 = 0, r1 = 0, a0 = 0, a1 = 0;
    std::string fill;
    std::string cls;
    std::string tooltip;
};

struct RectMark {
    double x = 0, y = 0, w = 0, h = 0;
    std::string fill, stroke;
    std::string cls;
    std::string tooltip;
};

struct CircleMark {
    double cx = 0, cy = 0, r = 0;
    std::string fill, stroke;
    std::string cls;
    std::string tooltip;
};

struct TextMark {
    double x = 0, y = 0;
    std::string text;
    double size = 12.0;
    std::string anchor = "middle"; // start | middle | end
    std::string cls;
};

struct LineMark {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    std::string stroke;
    double width = 1.0;
};

/// Resolution-independent vector scene; serialization is deterministic
/// (fixed number formatting, no timestamps).
struct RenderDocument {
    int width = 800, height = 800;
    bool interactive = false;
    std::vector<WedgeMark> wedges;
    std::vector<RectMark> rects;
    std::vector<CircleMark> circles;
    std::vector<TextMark> texts;
    std::vector<LineMark> lines;

    std::string to_svg() const;
    std::string to_html() const;
};

enum class LinearGeom { tile, point };

RenderDocument plot_matrix(const PairwiseTable& t, SummaryMode order_mode, bool interactive,
                           int width = 800, int height = 800);

RenderDocument plot_linear(const PairwiseTable& t, LinearGeom geom, SummaryMode order_mode,
                           bool interactive, int width = 800, int row_height = 40);

} // namespace pairscore
