#include "monogam/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "monogam/error.hpp"
#include "monogam/rng.hpp"

namespace monogam {

void ColumnSpec::validate() const {
    if (name.empty()) throw_schema("column with empty name");
    if (kind == ColumnKind::Boolean && keypoint_count != 2) {
        throw_schema("boolean column '" + name + "' must have keypoint_count = 2");
    }
    if (keypoint_count < 2) {
        throw_schema("column '" + name + "': keypoint_count must be >= 2");
    }
}

std::size_t Dataset::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) return i;
    }
    throw_schema("unknown column '" + name + "'");
}

std::vector<double> Dataset::row(std::size_t r) const {
    std::vector<double> out(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) out[c] = values[c][r];
    return out;
}

void Dataset::validate() const {
    if (columns.size() != values.size()) throw_schema("dataset: column/value size mismatch");
    for (std::size_t c = 0; c < columns.size(); ++c) {
        columns[c].validate();
        if (values[c].size() != rows()) {
            throw_schema("dataset: column '" + columns[c].name + "' has wrong row count");
        }
        if (columns[c].kind == ColumnKind::Boolean) {
            for (double v : values[c]) {
                if (v != 0.0 && v != 1.0) {
                    throw_schema("dataset: boolean column '" + columns[c].name + "' has non 0/1 value");
                }
            }
        }
    }
    for (int y : labels) {
        if (y != 0 && y != 1) throw_schema("dataset: labels must be 0 or 1");
    }
    if (protected_column && *protected_column >= columns.size()) {
        throw_schema("dataset: protected column index out of range");
    }
}

namespace {

using nlohmann::json;

CsvKind csv_kind_from_string(const std::string& s) {
    if (s == "numeric") return CsvKind::Numeric;
    if (s == "boolean") return CsvKind::Boolean;
    if (s == "categorical") return CsvKind::Categorical;
    throw_schema("unknown column kind '" + s + "' (expected numeric/boolean/categorical)");
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

CsvSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open schema file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw_schema("schema parse error in " + path + ": " + e.what());
    }

    CsvSchema schema;
    try {
        schema.label_column = doc.at("label").get<std::string>();
        if (doc.contains("protected")) {
            schema.protected_column = doc.at("protected").get<std::string>();
        }
        for (const auto& col : doc.at("columns")) {
            CsvColumnSpec spec;
            spec.name = col.at("name").get<std::string>();
            spec.kind = csv_kind_from_string(col.value("kind", std::string("numeric")));
            spec.monotonicity = monotonicity_from_string(col.value("monotonicity", std::string("none")));
            spec.keypoint_count = col.value("keypoints", 20);
            if (spec.kind == CsvKind::Boolean) spec.keypoint_count = 2;
            schema.columns.push_back(std::move(spec));
        }
    } catch (const json::exception& e) {
        throw_schema("schema error in " + path + ": " + e.what());
    }
    if (schema.columns.empty()) throw_schema("schema has no columns: " + path);
    std::set<std::string> seen;
    for (const auto& c : schema.columns) {
        if (!seen.insert(c.name).second) throw_schema("duplicate schema column '" + c.name + "'");
        if (c.kind == CsvKind::Categorical && c.monotonicity != Monotonicity::None) {
            throw_schema("categorical column '" + c.name +
                         "' cannot carry a monotonicity constraint; constrain its expanded "
                         "boolean indicators via a boolean column instead");
        }
        if (c.keypoint_count < 2) {
            throw_schema("column '" + c.name + "': keypoints must be >= 2");
        }
    }
    return schema;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open data file: " + path);

    std::string header;
    if (!std::getline(in, header)) throw_io("empty data file: " + path);
    const auto names = split_line(header);

    std::map<std::string, std::size_t> header_index;
    for (std::size_t i = 0; i < names.size(); ++i) header_index[names[i]] = i;

    auto require = [&](const std::string& name) {
        auto it = header_index.find(name);
        if (it == header_index.end()) {
            throw_schema("column '" + name + "' not found in " + path);
        }
        return it->second;
    };

    std::vector<std::size_t> col_pos;
    for (const auto& c : schema.columns) col_pos.push_back(require(c.name));
    const std::size_t label_pos = require(schema.label_column);
    std::optional<std::size_t> protected_schema_idx;
    if (schema.protected_column) {
        bool found = false;
        for (std::size_t i = 0; i < schema.columns.size(); ++i) {
            if (schema.columns[i].name == *schema.protected_column) {
                protected_schema_idx = i;
                found = true;
            }
        }
        if (!found) {
            throw_schema("protected column '" + *schema.protected_column +
                         "' is not one of the schema columns");
        }
    }

    // First pass in memory: raw tokens per schema column.
    const std::size_t ncols = schema.columns.size();
    std::vector<std::vector<std::string>> raw(ncols);
    std::vector<int> labels;
    std::size_t dropped = 0;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != names.size()) {
            throw_schema("row " + std::to_string(line_no) + ": expected " +
                         std::to_string(names.size()) + " cells, got " +
                         std::to_string(cells.size()));
        }
        bool missing = cells[label_pos].empty();
        for (std::size_t c = 0; c < ncols && !missing; ++c) {
            missing = cells[col_pos[c]].empty();
        }
        if (missing) {
            ++dropped;
            continue;
        }
        const std::string& lab = cells[label_pos];
        if (lab == "0" || lab == "1") {
            labels.push_back(lab == "1" ? 1 : 0);
        } else {
            throw_schema("row " + std::to_string(line_no) + ": label '" + lab +
                         "' is not 0 or 1");
        }
        for (std::size_t c = 0; c < ncols; ++c) {
            raw[c].push_back(cells[col_pos[c]]);
        }
    }
    if (labels.empty()) throw_io("no data rows in " + path);

    auto parse_numeric = [&](const std::string& cell, std::size_t row,
                             const std::string& col) {
        try {
            std::size_t pos = 0;
            double v = std::stod(cell, &pos);
            if (pos != cell.size() || std::isnan(v)) throw std::invalid_argument(cell);
            return v;
        } catch (const std::exception&) {
            throw_schema("row " + std::to_string(row + 2) + ", column '" + col +
                         "': cannot parse '" + cell + "'");
        }
    };

    Dataset ds;
    ds.labels = std::move(labels);
    ds.dropped_rows = dropped;
    const std::size_t nrows = ds.labels.size();

    for (std::size_t c = 0; c < ncols; ++c) {
        const auto& spec = schema.columns[c];
        if (spec.kind == CsvKind::Categorical) {
            std::set<std::string> levels(raw[c].begin(), raw[c].end());
            for (const auto& level : levels) {
                ColumnSpec col;
                col.name = spec.name + "=" + level;
                col.kind = ColumnKind::Boolean;
                col.monotonicity = Monotonicity::None;
                col.keypoint_count = 2;
                std::vector<double> vals(nrows);
                for (std::size_t r = 0; r < nrows; ++r) {
                    vals[r] = raw[c][r] == level ? 1.0 : 0.0;
                }
                if (protected_schema_idx && *protected_schema_idx == c) {
                    throw_schema("protected column cannot be categorical; use a numeric "
                                 "group code");
                }
                ds.columns.push_back(std::move(col));
                ds.values.push_back(std::move(vals));
            }
        } else {
            ColumnSpec col;
            col.name = spec.name;
            col.kind = spec.kind == CsvKind::Boolean ? ColumnKind::Boolean : ColumnKind::Numeric;
            col.monotonicity = spec.monotonicity;
            col.keypoint_count = spec.kind == CsvKind::Boolean ? 2 : spec.keypoint_count;
            std::vector<double> vals(nrows);
            for (std::size_t r = 0; r < nrows; ++r) {
                vals[r] = parse_numeric(raw[c][r], r, spec.name);
                if (col.kind == ColumnKind::Boolean && vals[r] != 0.0 && vals[r] != 1.0) {
                    throw_schema("row " + std::to_string(r + 2) + ", column '" + spec.name +
                                 "': boolean cell must be 0 or 1");
                }
            }
            if (protected_schema_idx && *protected_schema_idx == c) {
                ds.protected_column = ds.columns.size();
            }
            ds.columns.push_back(std::move(col));
            ds.values.push_back(std::move(vals));
        }
    }
    ds.validate();
    return ds;
}

SplitAssignment split(const Dataset& dataset, std::uint64_t seed) {
    const std::size_t n = dataset.rows();
    if (n < 10) throw_numeric("split: need at least 10 rows, got " + std::to_string(n));

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng::Engine g(seed);
    rng::shuffle(idx, g);

    const auto n_train = static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(n)));
    const auto n_val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n)));

    SplitAssignment s;
    s.seed = seed;
    s.train.assign(idx.begin(), idx.begin() + n_train);
    s.validation.assign(idx.begin() + n_train, idx.begin() + n_train + n_val);
    s.test.assign(idx.begin() + n_train + n_val, idx.end());
    return s;
}

std::vector<double> quantile_keypoints(std::span<const double> values, int k) {
    if (k < 2) throw_numeric("quantile_keypoints: k must be >= 2");
    std::vector<double> sorted;
    sorted.reserve(values.size());
    for (double v : values) {
        if (std::isfinite(v)) sorted.push_back(v);
    }
    if (sorted.empty()) throw_numeric("quantile_keypoints: no finite values");
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    std::vector<double> keys;
    keys.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const double q = static_cast<double>(i) / static_cast<double>(k - 1);
        const double pos = q * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        const double key = frac == 0.0 || lo + 1 >= n
                               ? sorted[lo]
                               : sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
        if (keys.empty() || key > keys.back()) keys.push_back(key);
    }
    if (keys.size() < 2) {
        throw_numeric("quantile_keypoints: degenerate feature (all values identical)");
    }
    return keys;
}

}  // namespace monogam
