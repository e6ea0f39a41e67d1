#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pairscore/dataset.hpp"

namespace pairscore {

/// One scored variable pair. Invariants: x < y bytewise, never x == y;
/// group "all" marks ungrouped scores; value is missing when the measure
/// is undefined on the pair (degenerate input, empty group subset, ...).
struct PairwiseRow {
    std::string x;
    std::string y;
    std::string score;
    std::string group = "all";
    std::optional<double> value;
    PairType pair_type = PairType::nn;
};

bool operator==(const PairwiseRow& a, const PairwiseRow& b);

/// Canonical row order: (x, y, score, group) ascending, except that the
/// reserved group "all" sorts after named groups within the same
/// (x, y, score).
bool row_key_less(const PairwiseRow& a, const PairwiseRow& b);

/// Tidy table of pairwise scores, canonically sorted and key-unique.
/// Immutable after construction; all operations below are pure.
class PairwiseTable {
public:
    PairwiseTable() = default;

    const std::vector<PairwiseRow>& rows() const { return rows_; }
    bool empty() const { return rows_.empty(); }
    std::size_t size() const { return rows_.size(); }

    /// Sorted distinct variable names mentioned as x or y.
    std::vector<std::string> variables() const;
    /// Sorted distinct score names.
    std::vector<std::string> scores() const;
    /// Sorted distinct group labels other than "all".
    std::vector<std::string> named_groups() const;

private:
    friend PairwiseTable new_pairwise(std::vector<PairwiseRow> rows);
    explicit PairwiseTable(std::vector<PairwiseRow> rows) : rows_(std::move(rows)) {}
    std::vector<PairwiseRow> rows_;
};

/// Construct a table from raw rows: swaps variables so x < y, validates
/// values against registered score ranges, rejects duplicate keys and
/// self-pairs, and applies the canonical sort.
PairwiseTable new_pairwise(std::vector<PairwiseRow> rows);

/// Square matrix with row/column labels; missing cells are std::nullopt.
struct LabeledMatrix {
    std::vector<std::string> labels;
    std::vector<std::optional<double>> cells; // row-major, labels.size()^2

    std::size_t size() const { return labels.size(); }
    std::optional<double>& at(std::size_t i, std::size_t j) { return cells[i * labels.size() + j]; }
    const std::optional<double>& at(std::size_t i, std::size_t j) const { return cells[i * labels.size() + j]; }

    static LabeledMatrix zeros(std::vector<std::string> labels);
};

/// One row per unordered label pair; the diagonal is discarded and
/// group is "all". Input must be symmetric within 1e-12.
PairwiseTable from_matrix(const LabeledMatrix& m, const std::string& score, PairType pair_type);

/// Matrix over the variables mentioned in the table (sorted); each cell takes
/// the value of the first row in canonical order for that pair, the diagonal
/// is 1, absent pairs stay missing. Empty table -> 0x0 matrix.
LabeledMatrix to_matrix(const PairwiseTable& t);

struct FilterSpec {
    std::optional<double> min_max_abs; // keep pair when max |value| >= this
    std::optional<double> min_range;   // ... or when max - min >= this
    std::optional<std::string> with_variable;
};

/// Keep whole pairs by per-pair summary thresholds (disjunction of the numeric
/// criteria) and, independently, by variable membership. Pairs whose values
/// are all missing are dropped under any numeric criterion.
PairwiseTable filter_pairs(const PairwiseTable& t, const FilterSpec& spec);

/// Wide layout keyed by (x, y, group) with one value column per score.
struct WideTable {
    std::vector<std::string> score_names;
    struct Row {
        std::string x, y, group;
        std::vector<std::optional<double>> values; // parallel to score_names
    };
    std::vector<Row> rows;
};

WideTable pivot_wide(const PairwiseTable& t);

// --- score-table CSV (header: x,y,score,group,value,pair_type) -------------

void write_score_csv(const PairwiseTable& t, std::ostream& out);
void write_score_csv_file(const PairwiseTable& t, const std::string& path);
PairwiseTable read_score_csv(std::istream& in);
PairwiseTable read_score_csv_file(const std::string& path);

// --- method registry --------------------------------------------------------

/// Catalog entry for one measure: applicability flags per pair type, the
/// method family it comes from, the closed score range, and whether ordered
/// factors are required.
struct MethodInfo {
    std::string name;
    bool nn = false, ff = false, fn = false;
    std::string from;
    double range_lo = -1.0, range_hi = 1.0;
    bool ordinal = false;
};

/// The seventeen registered measures.
const std::vector<MethodInfo>& method_registry();

const MethodInfo* find_method(const std::string& name);

/// Range for a score identifier as it appears in PairwiseRow::score
/// (covers method names and derived names such as "pearson", "MIC",
/// "outlying"). Unknown names yield nullopt and are not range-checked.
std::optional<std::pair<double, double>> score_range(const std::string& score_name);

} // namespace pairscore
