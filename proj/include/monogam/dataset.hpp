#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monogam/calibrator.hpp"

namespace monogam {

enum class ColumnKind { Numeric, Boolean };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    Monotonicity monotonicity = Monotonicity::None;
    int keypoint_count = 20;   // boolean columns are pinned to 2

    void validate() const;
};

// Column-major tabular data with a binary label. Categorical input columns
// are expanded to boolean indicator columns at ingestion, so a Dataset only
// ever holds numeric and boolean columns.
struct Dataset {
    std::vector<ColumnSpec> columns;
    std::vector<std::vector<double>> values;   // [column][row]
    std::vector<int> labels;                   // 0/1
    std::optional<std::size_t> protected_column;
    std::size_t dropped_rows = 0;              // rows skipped for missing cells

    std::size_t rows() const { return labels.size(); }
    std::size_t column_index(const std::string& name) const;   // throws Schema
    std::vector<double> row(std::size_t r) const;
    void validate() const;
};

// Ingestion schema. Categorical columns expand to one boolean column per
// distinct value (sorted), named "<column>=<value>"; they cannot carry a
// monotonicity constraint.
enum class CsvKind { Numeric, Boolean, Categorical };

struct CsvColumnSpec {
    std::string name;
    CsvKind kind = CsvKind::Numeric;
    Monotonicity monotonicity = Monotonicity::None;
    int keypoint_count = 20;
};

struct CsvSchema {
    std::vector<CsvColumnSpec> columns;
    std::string label_column;
    std::optional<std::string> protected_column;
};

// JSON schema file: {"label": ..., "protected": ..., "columns": [{"name":
// ..., "kind": ..., "monotonicity": ..., "keypoints": ...}, ...]}.
CsvSchema load_schema(const std::string& path);

// Strict CSV: UTF-8, comma separator, header row, '.' decimal point, no
// quoting. Rows with empty cells are dropped and counted; any other
// unparseable cell is an error naming the row.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

struct SplitAssignment {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
};

// Deterministic 70/10/20 partition of [0, rows): Fisher-Yates shuffle of the
// index vector under mt19937_64(seed), then contiguous slices of size
// round(0.7 n) / round(0.1 n) / remainder.
SplitAssignment split(const Dataset& dataset, std::uint64_t seed);

// Keys at k evenly spaced quantile levels of the data (level q maps to
// position q*(n-1) of the sorted vector, linearly interpolated). Endpoints
// are the data min and max; duplicate keys collapse. Throws Numeric if all
// values are identical.
std::vector<double> quantile_keypoints(std::span<const double> values, int k);

}  // namespace monogam
