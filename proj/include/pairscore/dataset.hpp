#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pairscore {

enum class ColumnKind { numeric, factor, ordered };

enum class PairType { nn, ff, fn };

std::string to_string(PairType t);
std::optional<PairType> pair_type_from_string(const std::string& s);

/// A typed column with a missing-value mask. Numeric columns store doubles,
/// factor/ordered columns store level codes indexing into `levels`.
struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<double> numeric;    // used when kind == numeric
    std::vector<int> codes;         // used for factor/ordered
    std::vector<std::string> levels;
    std::vector<std::uint8_t> missing;

    std::size_t size() const {
        return kind == ColumnKind::numeric ? numeric.size() : codes.size();
    }
    bool is_factor() const { return kind != ColumnKind::numeric; }
    bool is_missing(std::size_t i) const { return missing[i] != 0; }
};

struct Dataset {
    std::vector<Column> columns;
    std::size_t n_rows = 0;

    const Column* find(const std::string& name) const;
    /// Row-subset with identical column types and level sets.
    Dataset subset(const std::vector<std::size_t>& rows) const;
};

/// Per-column type assignments for load_csv. Columns not listed are inferred:
/// all values numeric-parseable -> numeric, otherwise factor with levels in
/// first-appearance order. Ordered factors must be listed with their levels.
struct Schema {
    struct Entry {
        ColumnKind kind = ColumnKind::factor;
        std::vector<std::string> levels; // required for ordered
    };
    std::map<std::string, Entry> entries;
};

/// Parse a schema JSON object: { "col": {"kind": "factor", "levels": [...] } }.
Schema parse_schema_json(const std::string& json_text);
Schema load_schema(const std::string& path);

/// Load a CSV file with header row. "" and "NA" tokens become missing values.
Dataset load_csv(const std::string& path, const Schema& schema = {});
Dataset parse_csv(const std::string& text, const Schema& schema = {});

/// Rows where both columns are non-missing, order preserved. The returned
/// columns carry all-false masks.
std::pair<Column, Column> complete_pairs(const Column& a, const Column& b);

/// nn for two numerics, ff for two factors (ordered counts as factor),
/// fn otherwise, independent of argument order.
PairType pair_type_of(const Column& a, const Column& b);

/// Split a CSV line (RFC 4180 quoting); exposed for the score-table reader.
std::vector<std::string> split_csv_line(const std::string& line);

} // namespace pairscore
