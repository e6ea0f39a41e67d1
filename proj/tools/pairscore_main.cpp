#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pairscore/dispatch.hpp"
#include "pairscore/errors.hpp"
#include "pairscore/pairwise.hpp"
#include "pairscore/render.hpp"
#include "pairscore/seriation.hpp"

namespace {

using namespace pairscore;

int exit_code_for(const Error& e) {
    const std::string& c = e.code();
    if (c == "IoError") return 2;
    if (c == "ParseError" || c == "SchemaColumnMissing" || c == "UnknownLevel") return 3;
    if (c == "UnknownMeasure") return 4;
    return 5; // malformed score tables and table-level violations
}

std::string category_for(const Error& e) {
    const int code = exit_code_for(e);
    switch (code) {
        case 2: return "io";
        case 3: return "schema";
        case 4: return "measure";
        default: return "format";
    }
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct CliConfig {
    std::string input, output, schema_path;
    std::string measures;
    std::string by;
    bool no_ungrouped = false;
    ScoreControl control;
    std::string cor_method = "pearson";
    std::string mine_methods = "MIC";
    MicParams mic;
    std::string plot_type = "matrix";
    std::string order = "seriate_max_abs";
    std::string geom = "tile";
    bool interactive = false;
    int width = 800, height = 800, row_height = 40;
    std::optional<double> min_max, min_range;
    std::string with_var;
    std::string filter_types;
    std::string score_name;
    std::string pair_type = "nn";
    int threads = 0;
    unsigned seed = 0; // reserved for stochastic utilities
};

Dataset load_input(const CliConfig& cfg) {
    Schema schema;
    if (!cfg.schema_path.empty()) schema = load_schema(cfg.schema_path);
    return load_csv(cfg.input, schema);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoError", "cannot open '" + path + "' for writing");
    out << text;
    if (!out) fail("IoError", "write to '" + path + "' failed");
}

int cmd_scores(const CliConfig& cfg) {
    const Dataset d = load_input(cfg);
    MeasureOptions opt;
    opt.cor_method = cfg.cor_method;
    opt.mine_methods = split_list(cfg.mine_methods);
    opt.mic = cfg.mic;

    PairwiseTable t;
    const auto ids = split_list(cfg.measures);
    const bool ungrouped = !cfg.no_ungrouped;
    if (ids.empty()) {
        t = pairwise_scores(d, cfg.control,
                            cfg.by.empty() ? std::nullopt : std::optional<std::string>(cfg.by),
                            ungrouped, opt);
    } else if (!cfg.by.empty()) {
        std::vector<PairwiseRow> rows;
        for (const auto& id : ids) {
            const auto part = pairwise_by(d, cfg.by, id, ungrouped, opt);
            rows.insert(rows.end(), part.rows().begin(), part.rows().end());
        }
        t = new_pairwise(std::move(rows));
    } else {
        t = pairwise_multi(d, ids, opt);
    }
    write_score_csv_file(t, cfg.output);
    return 0;
}

int cmd_plot(const CliConfig& cfg) {
    const PairwiseTable t = read_score_csv_file(cfg.input);
    const SummaryMode mode = summary_mode_from_order_name(cfg.order);

    RenderDocument doc;
    if (cfg.plot_type == "matrix") {
        doc = plot_matrix(t, mode, cfg.interactive, cfg.width, cfg.height);
    } else if (cfg.plot_type == "linear") {
        const LinearGeom geom = cfg.geom == "point" ? LinearGeom::point : LinearGeom::tile;
        doc = plot_linear(t, geom, mode, cfg.interactive, cfg.width, cfg.row_height);
    } else {
        fail("FormatError", "plot type must be 'matrix' or 'linear'");
    }

    const bool html = cfg.interactive || cfg.output.ends_with(".html");
    write_text_file(cfg.output, html ? doc.to_html() : doc.to_svg());
    return 0;
}

int cmd_filter(const CliConfig& cfg) {
    const PairwiseTable t = read_score_csv_file(cfg.input);
    FilterSpec spec;
    spec.min_max_abs = cfg.min_max;
    spec.min_range = cfg.min_range;
    if (!cfg.with_var.empty()) spec.with_variable = cfg.with_var;
    write_score_csv_file(filter_pairs(t, spec), cfg.output);
    return 0;
}

int cmd_methods(const CliConfig& cfg) {
    bool want_nn = false, want_ff = false, want_fn = false, want_ordinal = false;
    for (const auto& f : split_list(cfg.filter_types)) {
        if (f == "nn") want_nn = true;
        else if (f == "ff") want_ff = true;
        else if (f == "fn") want_fn = true;
        else if (f == "ordinal") want_ordinal = true;
        else fail("FormatError", "unknown type filter '" + f + "'");
    }
    std::printf("%-12s %-6s %-6s %-6s %-47s %-7s %s\n", "name", "nn", "ff", "fn", "from", "range",
                "ordinal");
    for (const auto& m : method_registry()) {
        if (want_nn && !m.nn) continue;
        if (want_ff && !m.ff) continue;
        if (want_fn && !m.fn) continue;
        if (want_ordinal && !m.ordinal) continue;
        std::printf("%-12s %-6s %-6s %-6s %-47s [%g,%g]  %s\n", m.name.c_str(),
                    m.nn ? "true" : "false", m.ff ? "true" : "false", m.fn ? "true" : "false",
                    m.from.c_str(), m.range_lo, m.range_hi, m.ordinal ? "true" : "false");
    }
    return 0;
}

int cmd_convert(const CliConfig& cfg) {
    std::ifstream in(cfg.input, std::ios::binary);
    if (!in) fail("IoError", "cannot open matrix CSV '" + cfg.input + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::vector<std::string> lines;
    {
        std::string line;
        std::stringstream rs(ss.str());
        while (std::getline(rs, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) lines.push_back(line);
        }
    }
    if (lines.empty()) fail("FormatError", "empty matrix CSV");
    auto header = split_csv_line(lines[0]);
    if (header.size() < 2) fail("FormatError", "matrix CSV needs a label column plus labels");
    std::vector<std::string> labels(header.begin() + 1, header.end());
    if (lines.size() - 1 != labels.size())
        fail("FormatError", "matrix CSV row count does not match its label count");

    LabeledMatrix m = LabeledMatrix::zeros(labels);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto fields = split_csv_line(lines[r]);
        if (fields.size() != labels.size() + 1)
            fail("FormatError", "matrix CSV row " + std::to_string(r) + " has the wrong width");
        if (fields[0] != labels[r - 1])
            fail("FormatError", "matrix CSV row labels must match the header order");
        for (std::size_t c = 1; c < fields.size(); ++c) {
            if (fields[c].empty() || fields[c] == "NA") continue;
            try {
                m.at(r - 1, c - 1) = std::stod(fields[c]);
            } catch (const std::exception&) {
                fail("FormatError", "matrix CSV cell (" + std::to_string(r) + "," +
                                        std::to_string(c) + "): bad number '" + fields[c] + "'");
            }
        }
    }
    const auto pt = pair_type_from_string(cfg.pair_type);
    if (!pt) fail("FormatError", "pair type must be nn, ff or fn");
    write_score_csv_file(from_matrix(m, cfg.score_name, *pt), cfg.output);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pairwise association scores over typed tabular data"};
    app.require_subcommand(1);
    CliConfig cfg;

    auto* scores = app.add_subcommand("scores", "compute pairwise scores from a data CSV");
    scores->add_option("input", cfg.input, "input data CSV")->required();
    scores->add_option("-o,--output", cfg.output, "output score CSV")->required();
    scores->add_option("--schema", cfg.schema_path, "column type schema (JSON)");
    scores->add_option("--measures", cfg.measures, "comma-separated measure ids");
    scores->add_option("--by", cfg.by, "grouping factor column");
    scores->add_flag("--no-ungrouped", cfg.no_ungrouped, "omit the ungrouped 'all' rows");
    scores->add_option("--nn", cfg.control.nn, "measure for numeric pairs (default pearson)");
    scores->add_option("--fn", cfg.control.fn, "measure for factor-numeric pairs (default cancor)");
    scores->add_option("--ff", cfg.control.ff, "measure for factor pairs (default cancor)");
    scores->add_option("--oo", cfg.control.oo, "measure for ordered-ordered pairs (default polychor)");
    scores->add_option("--cor-method", cfg.cor_method, "pearson | spearman | kendall");
    scores->add_option("--mine-methods", cfg.mine_methods, "MIC and/or TIC");
    scores->add_option("--mic-alpha", cfg.mic.alpha, "MIC grid exponent");
    scores->add_option("--mic-c", cfg.mic.c, "MIC clump factor");
    scores->add_option("--threads", cfg.threads, "worker threads for pair evaluation");
    scores->add_option("--seed", cfg.seed, "seed for auxiliary stochastic utilities");

    auto* plot = app.add_subcommand("plot", "render a score CSV as SVG or HTML");
    plot->add_option("input", cfg.input, "input score CSV")->required();
    plot->add_option("-o,--output", cfg.output, "output SVG/HTML path")->required();
    plot->add_option("--type", cfg.plot_type, "matrix | linear");
    plot->add_option("--order", cfg.order, "seriate_max_abs | seriate_max_diff");
    plot->add_option("--geom", cfg.geom, "tile | point (linear only)");
    plot->add_flag("--interactive", cfg.interactive, "standalone HTML with tooltips");
    plot->add_option("--width", cfg.width, "canvas width");
    plot->add_option("--height", cfg.height, "canvas height (matrix)");
    plot->add_option("--row-height", cfg.row_height, "row height (linear)");

    auto* filter = app.add_subcommand("filter", "keep pairs passing summary thresholds");
    filter->add_option("input", cfg.input, "input score CSV")->required();
    filter->add_option("-o,--output", cfg.output, "output score CSV")->required();
    filter->add_option("--min-max", cfg.min_max, "keep pairs with max |value| >= this");
    filter->add_option("--min-range", cfg.min_range, "or with max - min >= this");
    filter->add_option("--var", cfg.with_var, "keep only pairs containing this variable");

    auto* methods = app.add_subcommand("methods", "list the measure registry");
    methods->add_option("--filter-types", cfg.filter_types,
                        "comma list of nn, ff, fn, ordinal; all must hold");

    auto* convert = app.add_subcommand("convert", "turn a symmetric matrix CSV into a score CSV");
    convert->add_option("input", cfg.input, "matrix CSV with labels")->required();
    convert->add_option("-o,--output", cfg.output, "output score CSV")->required();
    convert->add_option("--score", cfg.score_name, "score name for the rows")->required();
    convert->add_option("--pair-type", cfg.pair_type, "nn | ff | fn");

    CLI11_PARSE(app, argc, argv);

    if (cfg.threads > 0) setenv("PAIRSCORE_THREADS", std::to_string(cfg.threads).c_str(), 1);

    try {
        if (scores->parsed()) return cmd_scores(cfg);
        if (plot->parsed()) return cmd_plot(cfg);
        if (filter->parsed()) return cmd_filter(cfg);
        if (methods->parsed()) return cmd_methods(cfg);
        if (convert->parsed()) return cmd_convert(cfg);
    } catch (const Error& e) {
        std::cerr << "error[" << category_for(e) << "]: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
