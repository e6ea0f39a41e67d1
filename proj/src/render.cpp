#include "pairscore/render.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "pairscore/errors.hpp"

namespace pairscore {

namespace {

constexpr double kTwoPi = 6.283185307179586;

std::string fmt(double v) {
    if (std::abs(v) < 5e-7) v = 0.0; // avoid "-0.00"
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

std::string fmt_value(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

Color lerp(const Color& a, const Color& b, double t) {
    auto ch = [t](std::uint8_t x, std::uint8_t y) {
        return static_cast<std::uint8_t>(std::lround(x + t * (static_cast<double>(y) - x)));
    };
    return {ch(a.r, b.r), ch(a.g, b.g), ch(a.b, b.b)};
}

const Color kBlue{0x21, 0x66, 0xAC};
const Color kWhite{0xF7, 0xF7, 0xF7};
const Color kRed{0xB2, 0x18, 0x2B};
const Color kSeqLight{0xF7, 0xFB, 0xFF};
const Color kSeqDark{0x08, 0x30, 0x6B};
const Color kGrey{0x80, 0x80, 0x80};

// categorical palette for groups/scores in the point geom
const std::vector<Color>& palette() {
    static const std::vector<Color> p = {
        {0x1B, 0x9E, 0x77}, {0xD9, 0x5F, 0x02}, {0x75, 0x70, 0xB3}, {0xE7, 0x29, 0x8A},
        {0x66, 0xA6, 0x1E}, {0xE6, 0xAB, 0x02}, {0xA6, 0x76, 0x1D}, {0x66, 0x66, 0x66},
    };
    return p;
}

} // namespace

std::string Color::hex() const {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02X%02X%02X", r, g, b);
    return buf;
}

Color ColorScale::na_color() { return kGrey; }

ColorScale ColorScale::for_score(const std::string& score, const PairwiseTable& t) {
    ColorScale cs;
    if (auto range = score_range(score)) {
        cs.lo = range->first;
        cs.hi = range->second;
        cs.diverging = range->first < 0.0;
        return cs;
    }
    // unknown score: signed scale when any negative value is present
    bool any_negative = false;
    for (const auto& r : t.rows())
        if (r.score == score && r.value && *r.value < 0.0) any_negative = true;
    cs.lo = any_negative ? -1.0 : 0.0;
    cs.hi = 1.0;
    cs.diverging = any_negative;
    return cs;
}

Color ColorScale::map(std::optional<double> value) const {
    if (!value) return kGrey;
    const double t = std::clamp((*value - lo) / (hi - lo), 0.0, 1.0);
    if (!diverging) return lerp(kSeqLight, kSeqDark, t);
    if (t < 0.5) return lerp(kBlue, kWhite, t * 2.0);
    return lerp(kWhite, kRed, (t - 0.5) * 2.0);
}

// --- glyph layout ------------------------------------------------------------

std::vector<GlyphSpec> layout_matrix_glyphs(const PairwiseTable& t,
                                            const std::vector<std::string>& var_order) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < var_order.size(); ++i) pos[var_order[i]] = i;

    const auto groups = t.named_groups();

    // collect per-pair rows
    struct PairData {
        std::set<std::string> scores;
        std::map<std::pair<std::string, std::string>, std::optional<double>> values; // (score, group)
    };
    std::map<std::pair<std::string, std::string>, PairData> pairs;
    for (const auto& r : t.rows()) {
        auto& pd = pairs[{r.x, r.y}];
        pd.scores.insert(r.score);
        pd.values[{r.score, r.group}] = r.value;
    }

    std::vector<GlyphSpec> glyphs;
    for (const auto& [key, pd] : pairs) {
        if (!pos.count(key.first) || !pos.count(key.second)) continue;
        GlyphSpec g;
        g.x = key.first;
        g.y = key.second;
        const std::size_t pi = pos[key.first], pj = pos[key.second];
        g.row = std::max(pi, pj);
        g.col = std::min(pi, pj);

        // inner ring: scores with a group-"all" row
        std::vector<std::string> inner_scores;
        for (const auto& s : pd.scores)
            if (pd.values.count({s, "all"})) inner_scores.push_back(s);
        const double inner_span = inner_scores.empty() ? 0.0 : kTwoPi / inner_scores.size();
        for (std::size_t i = 0; i < inner_scores.size(); ++i) {
            GlyphWedge w;
            w.score = inner_scores[i];
            w.group = "all";
            w.value = pd.values.at({inner_scores[i], "all"});
            w.a0 = inner_span * i;
            w.a1 = inner_span * (i + 1);
            w.inner = true;
            g.inner_wedges.push_back(std::move(w));
        }

        // outer ring: every (group, score-for-this-pair) combination,
        // groups anti-clockwise in level order, scores nested within
        if (!groups.empty()) {
            const std::size_t n_outer = groups.size() * pd.scores.size();
            const double span = kTwoPi / static_cast<double>(n_outer);
            std::size_t slot = 0;
            for (const auto& grp : groups) {
                for (const auto& s : pd.scores) {
                    GlyphWedge w;
                    w.score = s;
                    w.group = grp;
                    auto it = pd.values.find({s, grp});
                    w.value = it == pd.values.end() ? std::nullopt : it->second;
                    w.a0 = span * static_cast<double>(slot);
                    w.a1 = span * static_cast<double>(slot + 1);
                    w.inner = false;
                    g.outer_wedges.push_back(std::move(w));
                    ++slot;
                }
            }
        }
        glyphs.push_back(std::move(g));
    }
    return glyphs;
}

// --- SVG serialization ---------------------------------------------------------

namespace {

std::string wedge_path(const WedgeMark& w) {
    auto px = [&](double r, double a) { return w.cx + r * std::cos(a); };
    auto py = [&](double r, double a) { return w.cy - r * std::sin(a); };
    std::ostringstream p;
    const bool full = (w.a1 - w.a0) >= kTwoPi - 1e-9;
    if (full) {
        // full ring as two half arcs
        const double mid = w.a0 + kTwoPi / 2.0;
        p << "M " << fmt(px(w.r1, w.a0)) << ' ' << fmt(py(w.r1, w.a0));
        p << " A " << fmt(w.r1) << ' ' << fmt(w.r1) << " 0 0 0 " << fmt(px(w.r1, mid)) << ' '
          << fmt(py(w.r1, mid));
        p << " A " << fmt(w.r1) << ' ' << fmt(w.r1) << " 0 0 0 " << fmt(px(w.r1, w.a0)) << ' '
          << fmt(py(w.r1, w.a0));
        if (w.r0 > 0.0) {
            p << " M " << fmt(px(w.r0, w.a0)) << ' ' << fmt(py(w.r0, w.a0));
            p << " A " << fmt(w.r0) << ' ' << fmt(w.r0) << " 0 0 1 " << fmt(px(w.r0, mid)) << ' '
              << fmt(py(w.r0, mid));
            p << " A " << fmt(w.r0) << ' ' << fmt(w.r0) << " 0 0 1 " << fmt(px(w.r0, w.a0)) << ' '
              << fmt(py(w.r0, w.a0));
        }
        p << " Z";
        return p.str();
    }
    const int large = (w.a1 - w.a0) > kTwoPi / 2.0 ? 1 : 0;
    p << "M " << fmt(px(w.r0, w.a0)) << ' ' << fmt(py(w.r0, w.a0));
    p << " L " << fmt(px(w.r1, w.a0)) << ' ' << fmt(py(w.r1, w.a0));
    p << " A " << fmt(w.r1) << ' ' << fmt(w.r1) << " 0 " << large << " 0 " << fmt(px(w.r1, w.a1))
      << ' ' << fmt(py(w.r1, w.a1));
    p << " L " << fmt(px(w.r0, w.a1)) << ' ' << fmt(py(w.r0, w.a1));
    if (w.r0 > 0.0)
        p << " A " << fmt(w.r0) << ' ' << fmt(w.r0) << " 0 " << large << " 1 "
          << fmt(px(w.r0, w.a0)) << ' ' << fmt(py(w.r0, w.a0));
    p << " Z";
    return p.str();
}

void append_tooltip(std::ostringstream& out, const std::string& tooltip) {
    out << "<title>" << xml_escape(tooltip) << "</title>";
}

} // namespace

std::string RenderDocument::to_svg() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"#FFFFFF\"/>\n";
    for (const auto& r : rects) {
        out << "<rect";
        if (!r.cls.empty()) out << " class=\"" << r.cls << "\"";
        out << " x=\"" << fmt(r.x) << "\" y=\"" << fmt(r.y) << "\" width=\"" << fmt(r.w)
            << "\" height=\"" << fmt(r.h) << "\" fill=\"" << (r.fill.empty() ? "none" : r.fill)
            << "\"";
        if (!r.stroke.empty()) out << " stroke=\"" << r.stroke << "\"";
        if (interactive && !r.tooltip.empty()) {
            out << ">";
            append_tooltip(out, r.tooltip);
            out << "</rect>\n";
        } else {
            out << "/>\n";
        }
    }
    for (const auto& l : lines) {
        out << "<line x1=\"" << fmt(l.x1) << "\" y1=\"" << fmt(l.y1) << "\" x2=\"" << fmt(l.x2)
            << "\" y2=\"" << fmt(l.y2) << "\" stroke=\"" << l.stroke << "\" stroke-width=\""
            << fmt(l.width) << "\"/>\n";
    }
    for (const auto& w : wedges) {
        out << "<path";
        if (!w.cls.empty()) out << " class=\"" << w.cls << "\"";
        out << " d=\"" << wedge_path(w) << "\" fill=\"" << w.fill << "\" fill-rule=\"evenodd\"";
        if (interactive && !w.tooltip.empty()) {
            out << ">";
            append_tooltip(out, w.tooltip);
            out << "</path>\n";
        } else {
            out << "/>\n";
        }
    }
    for (const auto& c : circles) {
        out << "<circle";
        if (!c.cls.empty()) out << " class=\"" << c.cls << "\"";
        out << " cx=\"" << fmt(c.cx) << "\" cy=\"" << fmt(c.cy) << "\" r=\"" << fmt(c.r)
            << "\" fill=\"" << c.fill << "\"";
        if (!c.stroke.empty()) out << " stroke=\"" << c.stroke << "\"";
        if (interactive && !c.tooltip.empty()) {
            out << ">";
            append_tooltip(out, c.tooltip);
            out << "</circle>\n";
        } else {
            out << "/>\n";
        }
    }
    for (const auto& t : texts) {
        out << "<text";
        if (!t.cls.empty()) out << " class=\"" << t.cls << "\"";
        out << " x=\"" << fmt(t.x) << "\" y=\"" << fmt(t.y) << "\" font-size=\"" << fmt(t.size)
            << "\" font-family=\"sans-serif\" text-anchor=\"" << t.anchor << "\">"
            << xml_escape(t.text) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string RenderDocument::to_html() const {
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"/><title>pairscore</title></head>\n"
        << "<body>\n";
    const std::string svg = to_svg();
    // drop the xml prolog when embedding
    const auto pos = svg.find("<svg");
    out << (pos == std::string::npos ? svg : svg.substr(pos));
    out << "</body>\n</html>\n";
    return out.str();
}

// --- matrix display -------------------------------------------------------------

namespace {

std::string tooltip_for(const std::string& x, const std::string& y, const GlyphWedge& w) {
    std::string tip = x + ":" + y + " " + w.score + " " + w.group + " ";
    tip += w.value ? fmt_value(*w.value) : std::string("NA");
    return tip;
}

void add_legends(RenderDocument& doc, const PairwiseTable& t, double x0, double y0) {
    const auto scores = t.scores();
    double y = y0;
    for (const auto& s : scores) {
        if (y + 46.0 > doc.height) break;
        const ColorScale cs = ColorScale::for_score(s, t);
        TextMark label;
        label.x = x0;
        label.y = y + 10.0;
        label.text = s;
        label.size = 11.0;
        label.anchor = "start";
        label.cls = "legend-label";
        doc.texts.push_back(std::move(label));
        const int steps = 24;
        const double bar_w = 110.0, bar_h = 10.0;
        for (int i = 0; i < steps; ++i) {
            RectMark r;
            r.x = x0 + bar_w * i / steps;
            r.y = y + 16.0;
            r.w = bar_w / steps + 0.5;
            r.h = bar_h;
            r.fill = cs.map(cs.lo + (cs.hi - cs.lo) * (i + 0.5) / steps).hex();
            r.cls = "legend-swatch";
            doc.rects.push_back(std::move(r));
        }
        TextMark lo;
        lo.x = x0;
        lo.y = y + 38.0;
        lo.text = fmt_value(cs.lo);
        lo.size = 9.0;
        lo.anchor = "start";
        doc.texts.push_back(std::move(lo));
        TextMark hi;
        hi.x = x0 + bar_w;
        hi.y = y + 38.0;
        hi.text = fmt_value(cs.hi);
        hi.size = 9.0;
        hi.anchor = "end";
        doc.texts.push_back(std::move(hi));
        y += 46.0;
    }
    // NA swatch
    if (y + 16.0 <= doc.height) {
        RectMark r;
        r.x = x0;
        r.y = y + 2.0;
        r.w = 10.0;
        r.h = 10.0;
        r.fill = ColorScale::na_color().hex();
        r.cls = "legend-na";
        doc.rects.push_back(std::move(r));
        TextMark na;
        na.x = x0 + 14.0;
        na.y = y + 11.0;
        na.text = "NA";
        na.size = 9.0;
        na.anchor = "start";
        doc.texts.push_back(std::move(na));
    }
}

} // namespace

RenderDocument plot_matrix(const PairwiseTable& t, SummaryMode order_mode, bool interactive,
                           int width, int height) {
    if (t.empty()) fail("EmptyTable", "cannot plot an empty pairwise table");

    RenderDocument doc;
    doc.width = width;
    doc.height = height;
    doc.interactive = interactive;

    const auto vars = seriate_variables(t, order_mode);
    const std::size_t k = vars.size();
    const double legend_w = 140.0;
    const double margin = 12.0;
    const double span = std::min(width - legend_w - 2.0 * margin, height - 2.0 * margin);
    const double cell = span / static_cast<double>(k);
    const double x0 = margin, y0 = margin;

    // cell frames and diagonal labels
    for (std::size_t i = 0; i < k; ++i) {
        TextMark label;
        label.x = x0 + cell * (static_cast<double>(i) + 0.5);
        label.y = y0 + cell * (static_cast<double>(i) + 0.5) + 4.0;
        label.text = vars[i];
        label.size = std::min(12.0, cell / 5.5);
        label.anchor = "middle";
        label.cls = "var-label";
        doc.texts.push_back(std::move(label));
    }
    for (std::size_t row = 0; row < k; ++row) {
        for (std::size_t col = 0; col <= row; ++col) {
            RectMark frame;
            frame.x = x0 + cell * static_cast<double>(col);
            frame.y = y0 + cell * static_cast<double>(row);
            frame.w = cell;
            frame.h = cell;
            frame.fill = "";
            frame.stroke = "#DDDDDD";
            frame.cls = "cell-frame";
            doc.rects.push_back(std::move(frame));
        }
    }

    std::map<std::string, ColorScale> scales;
    for (const auto& s : t.scores()) scales.emplace(s, ColorScale::for_score(s, t));

    const auto glyphs = layout_matrix_glyphs(t, vars);
    for (const auto& g : glyphs) {
        const double cx = x0 + cell * (static_cast<double>(g.col) + 0.5);
        const double cy = y0 + cell * (static_cast<double>(g.row) + 0.5);
        const double radius = 0.42 * cell;
        const bool has_outer = !g.outer_wedges.empty();
        const double r_split = has_outer ? g.inner_radius_frac * radius : radius;

        for (const auto& w : g.inner_wedges) {
            WedgeMark mark;
            mark.cx = cx;
            mark.cy = cy;
            mark.r0 = 0.0;
            mark.r1 = r_split;
            mark.a0 = w.a0;
            mark.a1 = w.a1;
            mark.fill = scales.at(w.score).map(w.value).hex();
            mark.cls = "wedge inner";
            mark.tooltip = tooltip_for(g.x, g.y, w);
            doc.wedges.push_back(std::move(mark));
        }
        for (const auto& w : g.outer_wedges) {
            WedgeMark mark;
            mark.cx = cx;
            mark.cy = cy;
            mark.r0 = r_split;
            mark.r1 = radius;
            mark.a0 = w.a0;
            mark.a1 = w.a1;
            mark.fill = scales.at(w.score).map(w.value).hex();
            mark.cls = "wedge outer";
            mark.tooltip = tooltip_for(g.x, g.y, w);
            doc.wedges.push_back(std::move(mark));
        }
    }

    add_legends(doc, t, x0 + span + margin, y0 + 4.0);
    return doc;
}

// --- linear display ---------------------------------------------------------------

RenderDocument plot_linear(const PairwiseTable& t, LinearGeom geom, SummaryMode order_mode,
                           bool interactive, int width, int row_height) {
    if (t.empty()) fail("EmptyTable", "cannot plot an empty pairwise table");

    const auto pairs = order_pairs_linear(t, order_mode);

    RenderDocument doc;
    doc.width = width;
    doc.interactive = interactive;
    const double header = 24.0;
    doc.height = static_cast<int>(header + row_height * static_cast<double>(pairs.size()) + 16.0);

    const double label_w = 170.0;
    const double legend_w = 130.0;
    const double x0 = label_w, x1 = width - legend_w;
    const double plot_w = x1 - x0;

    std::map<std::pair<std::string, std::string>,
             std::vector<std::pair<std::pair<std::string, std::string>, std::optional<double>>>>
        rows_of; // pair -> [((score, group), value)]
    for (const auto& r : t.rows())
        rows_of[{r.x, r.y}].push_back({{r.score, r.group}, r.value});

    std::map<std::string, ColorScale> scales;
    bool any_signed = false;
    for (const auto& s : t.scores()) {
        auto cs = ColorScale::for_score(s, t);
        if (cs.diverging) any_signed = true;
        scales.emplace(s, std::move(cs));
    }

    const auto groups = t.named_groups();
    const bool color_by_group = !groups.empty();
    std::vector<std::string> categories;
    if (color_by_group) {
        categories = groups;
        categories.push_back("all");
    } else {
        categories = t.scores();
    }
    auto category_color = [&](const std::string& c) {
        for (std::size_t i = 0; i < categories.size(); ++i)
            if (categories[i] == c) return palette()[i % palette().size()];
        return palette().back();
    };

    const double axis_lo = any_signed ? -1.0 : 0.0;
    auto x_of = [&](double v) { return x0 + (v - axis_lo) / (1.0 - axis_lo) * plot_w; };

    if (geom == LinearGeom::point) {
        // axis with ticks
        for (double tick = axis_lo; tick <= 1.0 + 1e-9; tick += 0.5) {
            LineMark l;
            l.x1 = l.x2 = x_of(tick);
            l.y1 = header - 6.0;
            l.y2 = header + row_height * static_cast<double>(pairs.size());
            l.stroke = "#EEEEEE";
            l.width = 1.0;
            doc.lines.push_back(std::move(l));
            TextMark tm;
            tm.x = x_of(tick);
            tm.y = header - 10.0;
            tm.text = fmt_value(tick);
            tm.size = 9.0;
            tm.anchor = "middle";
            doc.texts.push_back(std::move(tm));
        }
    }

    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const auto& key = pairs[pi];
        const double ry = header + row_height * static_cast<double>(pi);

        TextMark label;
        label.x = label_w - 8.0;
        label.y = ry + row_height / 2.0 + 4.0;
        label.text = key.first + ":" + key.second;
        label.size = 11.0;
        label.anchor = "end";
        label.cls = "pair-label";
        doc.texts.push_back(std::move(label));

        LineMark sep;
        sep.x1 = x0;
        sep.x2 = x1;
        sep.y1 = sep.y2 = ry + row_height;
        sep.stroke = "#F2F2F2";
        sep.width = 1.0;
        doc.lines.push_back(std::move(sep));

        auto& cells = rows_of[key];
        std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
            if (a.first.first != b.first.first) return a.first.first < b.first.first;
            const bool aa = a.first.second == "all", ba = b.first.second == "all";
            if (aa != ba) return ba;
            return a.first.second < b.first.second;
        });

        if (geom == LinearGeom::tile) {
            const double tw = plot_w / static_cast<double>(cells.size());
            for (std::size_t ci = 0; ci < cells.size(); ++ci) {
                const auto& [sg, value] = cells[ci];
                RectMark tile;
                tile.x = x0 + tw * static_cast<double>(ci);
                tile.y = ry + 2.0;
                tile.w = tw - 1.0;
                tile.h = row_height - 4.0;
                tile.fill = scales.at(sg.first).map(value).hex();
                tile.cls = "tile";
                tile.tooltip = key.first + ":" + key.second + " " + sg.first + " " + sg.second +
                               " " + (value ? fmt_value(*value) : std::string("NA"));
                doc.rects.push_back(std::move(tile));
            }
        } else {
            for (const auto& [sg, value] : cells) {
                if (!value) continue; // a point needs a position
                CircleMark pt;
                pt.cx = x_of(std::clamp(*value, axis_lo, 1.0));
                pt.cy = ry + row_height / 2.0;
                pt.r = std::min(6.0, row_height / 5.0);
                pt.fill = category_color(color_by_group ? sg.second : sg.first).hex();
                pt.cls = "point";
                pt.tooltip = key.first + ":" + key.second + " " + sg.first + " " + sg.second + " " +
                             fmt_value(*value);
                doc.circles.push_back(std::move(pt));
            }
        }
    }

    // legend
    double ly = header;
    if (geom == LinearGeom::point) {
        for (const auto& c : categories) {
            if (ly + 16.0 > doc.height) break;
            CircleMark sw;
            sw.cx = x1 + 14.0;
            sw.cy = ly + 5.0;
            sw.r = 4.0;
            sw.fill = category_color(c).hex();
            sw.cls = "legend-swatch";
            doc.circles.push_back(std::move(sw));
            TextMark tm;
            tm.x = x1 + 24.0;
            tm.y = ly + 9.0;
            tm.text = c;
            tm.size = 10.0;
            tm.anchor = "start";
            doc.texts.push_back(std::move(tm));
            ly += 16.0;
        }
    } else {
        RenderDocument tmp;
        tmp.width = doc.width;
        tmp.height = doc.height;
        add_legends(tmp, t, x1 + 10.0, header);
        for (auto& r : tmp.rects) doc.rects.push_back(std::move(r));
        for (auto& tx : tmp.texts) doc.texts.push_back(std::move(tx));
    }
    return doc;
}

} // namespace pairscore
