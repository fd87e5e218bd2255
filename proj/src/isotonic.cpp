#include "monogam/isotonic.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "monogam/error.hpp"

namespace monogam {

std::vector<double> pav(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size()) {
        throw_numeric("pav: values and weights must have equal length");
    }
    if (values.empty()) {
        throw_numeric("pav: empty input");
    }
    for (double w : weights) {
        if (!(w > 0.0)) throw_numeric("pav: weights must be strictly positive");
    }

    const std::size_t n = values.size();
    // Block stack: pooled mean, pooled weight, element count.
    std::vector<double> mean(n), weight(n);
    std::vector<std::size_t> count(n);
    std::size_t top = 0;

    for (std::size_t i = 0; i < n; ++i) {
        double m = values[i];
        double w = weights[i];
        std::size_t c = 1;
        while (top > 0 && mean[top - 1] > m) {
            --top;
            const double tw = weight[top] + w;
            m = (mean[top] * weight[top] + m * w) / tw;
            w = tw;
            c += count[top];
        }
        mean[top] = m;
        weight[top] = w;
        count[top] = c;
        ++top;
    }

    std::vector<double> out;
    out.reserve(n);
    for (std::size_t b = 0; b < top; ++b) {
        out.insert(out.end(), count[b], mean[b]);
    }
    return out;
}

std::vector<double> pav(std::span<const double> values) {
    std::vector<double> unit(values.size(), 1.0);
    return pav(values, unit);
}

void ScoreTable::validate() const {
    if (x_cells.empty() || z_values.empty()) {
        throw_numeric("score table: empty support");
    }
    if (scores.size() != x_cells.size()) {
        throw_numeric("score table: row count does not match x support");
    }
    for (const auto& row : scores) {
        if (row.size() != z_values.size()) {
            throw_numeric("score table: ragged row");
        }
    }
    for (std::size_t i = 1; i < z_values.size(); ++i) {
        if (!(z_values[i - 1] <= z_values[i])) {
            throw_numeric("score table: z support must be sorted ascending");
        }
    }
}

ScoreTable project_table(const ScoreTable& table, Direction direction) {
    table.validate();
    ScoreTable out = table;
    for (auto& row : out.scores) {
        if (direction == Direction::Increasing) {
            row = pav(row);
        } else {
            std::reverse(row.begin(), row.end());
            row = pav(row);
            std::reverse(row.begin(), row.end());
        }
    }
    return out;
}

namespace {

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

double parse_cell(const std::string& cell, std::size_t line_no, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw_schema("line " + std::to_string(line_no) + ": non-numeric " + what + " '" + cell + "'");
    }
}

}  // namespace

ScoreTable read_score_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open grid file: " + path);

    ScoreTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_line(line);
        if (t.z_values.empty()) {
            if (cells.size() < 2) throw_schema("grid header needs at least one z column");
            for (std::size_t i = 1; i < cells.size(); ++i) {
                t.z_values.push_back(parse_cell(cells[i], line_no, "z value"));
            }
            continue;
        }
        if (cells.size() != t.z_values.size() + 1) {
            throw_schema("line " + std::to_string(line_no) + ": ragged grid row");
        }
        t.x_cells.push_back(cells[0]);
        std::vector<double> row;
        row.reserve(t.z_values.size());
        for (std::size_t i = 1; i < cells.size(); ++i) {
            row.push_back(parse_cell(cells[i], line_no, "score"));
        }
        t.scores.push_back(std::move(row));
    }
    if (t.z_values.empty()) throw_io("empty grid file: " + path);
    t.validate();
    return t;
}

void write_score_table_csv(const ScoreTable& table, std::ostream& os) {
    table.validate();
    os << "x";
    std::ostringstream num;
    num.precision(17);
    for (double z : table.z_values) {
        num.str("");
        num << z;
        os << ',' << num.str();
    }
    os << '\n';
    for (std::size_t i = 0; i < table.x_size(); ++i) {
        os << table.x_cells[i];
        for (double s : table.scores[i]) {
            num.str("");
            num << s;
            os << ',' << num.str();
        }
        os << '\n';
    }
}

void write_score_table_csv(const ScoreTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_io("cannot write grid file: " + path);
    write_score_table_csv(table, out);
}

}  // namespace monogam
