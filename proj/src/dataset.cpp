#include "pairscore/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "pairscore/errors.hpp"

namespace pairscore {

std::string to_string(PairType t) {
    switch (t) {
        case PairType::nn: return "nn";
        case PairType::ff: return "ff";
        case PairType::fn: return "fn";
    }
    return "nn";
}

std::optional<PairType> pair_type_from_string(const std::string& s) {
    if (s == "nn") return PairType::nn;
    if (s == "ff") return PairType::ff;
    if (s == "fn") return PairType::fn;
    return std::nullopt;
}

const Column* Dataset::find(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.n_rows = rows.size();
    out.columns.reserve(columns.size());
    for (const auto& c : columns) {
        Column s;
        s.name = c.name;
        s.kind = c.kind;
        s.levels = c.levels;
        s.missing.reserve(rows.size());
        if (c.kind == ColumnKind::numeric) {
            s.numeric.reserve(rows.size());
            for (std::size_t r : rows) {
                s.numeric.push_back(c.numeric[r]);
                s.missing.push_back(c.missing[r]);
            }
        } else {
            s.codes.reserve(rows.size());
            for (std::size_t r : rows) {
                s.codes.push_back(c.codes[r]);
                s.missing.push_back(c.missing[r]);
            }
        }
        out.columns.push_back(std::move(s));
    }
    return out;
}

namespace {

ColumnKind kind_from_string(const std::string& s) {
    if (s == "numeric") return ColumnKind::numeric;
    if (s == "factor") return ColumnKind::factor;
    if (s == "ordered") return ColumnKind::ordered;
    fail("ParseError", "unknown column kind '" + s + "' in schema");
}

bool parse_double(const std::string& tok, double& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    // tolerate surrounding spaces
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
    if (first == last) return false;
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && p == last;
}

bool is_missing_token(const std::string& tok) { return tok.empty() || tok == "NA"; }

} // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (ch == '\r' && i + 1 == line.size()) {
            // drop trailing CR from CRLF files
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

Schema parse_schema_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        fail("ParseError", std::string("schema JSON: ") + e.what());
    }
    if (!j.is_object()) fail("ParseError", "schema JSON must be an object");
    Schema schema;
    for (auto it = j.begin(); it != j.end(); ++it) {
        Schema::Entry e;
        const auto& v = it.value();
        if (v.is_string()) {
            e.kind = kind_from_string(v.get<std::string>());
        } else if (v.is_object()) {
            if (!v.contains("kind")) fail("ParseError", "schema entry for '" + it.key() + "' lacks kind");
            e.kind = kind_from_string(v["kind"].get<std::string>());
            if (v.contains("levels")) {
                for (const auto& lv : v["levels"]) e.levels.push_back(lv.get<std::string>());
            }
        } else {
            fail("ParseError", "schema entry for '" + it.key() + "' must be a string or object");
        }
        if (e.kind == ColumnKind::ordered && e.levels.empty())
            fail("ParseError", "ordered column '" + it.key() + "' requires explicit levels");
        schema.entries[it.key()] = std::move(e);
    }
    return schema;
}

Schema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("IoError", "cannot open schema file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_schema_json(ss.str());
}

namespace {

// Columns are accumulated as raw tokens, then typed in a second pass so that
// numeric inference can see the whole column.
struct RawColumn {
    std::string name;
    std::vector<std::string> tokens;
};

Column type_column(const RawColumn& raw, const Schema& schema) {
    Column col;
    col.name = raw.name;
    const Schema::Entry* entry = nullptr;
    if (auto it = schema.entries.find(raw.name); it != schema.entries.end()) entry = &it->second;

    bool numeric;
    if (entry) {
        numeric = entry->kind == ColumnKind::numeric;
        col.kind = entry->kind;
    } else {
        numeric = true;
        for (const auto& tok : raw.tokens) {
            if (is_missing_token(tok)) continue;
            double v;
            if (!parse_double(tok, v)) {
                numeric = false;
                break;
            }
        }
        col.kind = numeric ? ColumnKind::numeric : ColumnKind::factor;
    }

    col.missing.reserve(raw.tokens.size());
    if (numeric) {
        col.numeric.reserve(raw.tokens.size());
        for (std::size_t r = 0; r < raw.tokens.size(); ++r) {
            const auto& tok = raw.tokens[r];
            if (is_missing_token(tok)) {
                col.numeric.push_back(0.0);
                col.missing.push_back(1);
                continue;
            }
            double v;
            if (!parse_double(tok, v) || !std::isfinite(v))
                fail("ParseError", "row " + std::to_string(r + 1) + ", column '" + raw.name +
                                       "': cannot parse '" + tok + "' as a finite number");
            col.numeric.push_back(v);
            col.missing.push_back(0);
        }
        return col;
    }

    std::unordered_map<std::string, int> level_index;
    if (entry && !entry->levels.empty()) {
        col.levels = entry->levels;
        for (std::size_t i = 0; i < col.levels.size(); ++i) level_index[col.levels[i]] = static_cast<int>(i);
    }
    const bool fixed_levels = entry && !entry->levels.empty();
    col.codes.reserve(raw.tokens.size());
    for (std::size_t r = 0; r < raw.tokens.size(); ++r) {
        const auto& tok = raw.tokens[r];
        if (is_missing_token(tok)) {
            col.codes.push_back(-1);
            col.missing.push_back(1);
            continue;
        }
        auto it = level_index.find(tok);
        if (it == level_index.end()) {
            if (fixed_levels)
                fail("UnknownLevel", "value '" + tok + "' not among schema levels of column '" + raw.name + "'");
            int idx = static_cast<int>(col.levels.size());
            col.levels.push_back(tok);
            it = level_index.emplace(tok, idx).first;
        }
        col.codes.push_back(it->second);
        col.missing.push_back(0);
    }
    return col;
}

} // namespace

Dataset parse_csv(const std::string& text, const Schema& schema) {
    // Logical lines: newlines inside quoted fields do not terminate a record.
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
    if (lines.empty()) fail("ParseError", "empty CSV input (missing header)");

    std::vector<std::string> header = split_csv_line(lines[0]);
    std::vector<RawColumn> raw(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) raw[c].name = header[c];
    {
        std::unordered_map<std::string, int> seen;
        for (const auto& h : header)
            if (++seen[h] > 1) fail("ParseError", "duplicate column name '" + h + "'");
    }

    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty() || lines[li] == "\r") continue;
        auto fields = split_csv_line(lines[li]);
        if (fields.size() != header.size())
            fail("ParseError", "row " + std::to_string(li) + ": expected " + std::to_string(header.size()) +
                                   " fields, got " + std::to_string(fields.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) raw[c].tokens.push_back(std::move(fields[c]));
    }

    for (const auto& [name, entry] : schema.entries) {
        (void)entry;
        bool found = std::any_of(raw.begin(), raw.end(), [&](const RawColumn& rc) { return rc.name == name; });
        if (!found) fail("SchemaColumnMissing", "schema names column '" + name + "' absent from CSV");
    }

    Dataset ds;
    ds.n_rows = raw.empty() ? 0 : raw[0].tokens.size();
    ds.columns.reserve(raw.size());
    for (const auto& rc : raw) ds.columns.push_back(type_column(rc, schema));
    return ds;
}

Dataset load_csv(const std::string& path, const Schema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open data file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), schema);
}

std::pair<Column, Column> complete_pairs(const Column& a, const Column& b) {
    if (a.size() != b.size()) fail("LengthMismatch", "columns differ in length");
    Column ca, cb;
    ca.name = a.name; ca.kind = a.kind; ca.levels = a.levels;
    cb.name = b.name; cb.kind = b.kind; cb.levels = b.levels;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (a.is_missing(i) || b.is_missing(i)) continue;
        if (a.kind == ColumnKind::numeric) ca.numeric.push_back(a.numeric[i]);
        else ca.codes.push_back(a.codes[i]);
        if (b.kind == ColumnKind::numeric) cb.numeric.push_back(b.numeric[i]);
        else cb.codes.push_back(b.codes[i]);
        ca.missing.push_back(0);
        cb.missing.push_back(0);
    }
    return {std::move(ca), std::move(cb)};
}

PairType pair_type_of(const Column& a, const Column& b) {
    const bool fa = a.is_factor(), fb = b.is_factor();
    if (!fa && !fb) return PairType::nn;
    if (fa && fb) return PairType::ff;
    return PairType::fn;
}

} // namespace pairscore
