#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace monogam {

enum class Direction { Increasing, Decreasing };

// Weighted L2 isotonic regression: the unique minimizer of
// sum_i w_i (values_i - u_i)^2 over non-decreasing u.
// Pool-adjacent-violators, stack-based, O(n). Adjacent ties are left unpooled.
std::vector<double> pav(std::span<const double> values, std::span<const double> weights);
std::vector<double> pav(std::span<const double> values);

// Finite score table f(x, z): rows indexed by x cells, columns by ascending
// real z values.
struct ScoreTable {
    std::vector<std::string> x_cells;
    std::vector<double> z_values;                 // sorted ascending
    std::vector<std::vector<double>> scores;      // [x][z]

    std::size_t x_size() const { return x_cells.size(); }
    std::size_t z_size() const { return z_values.size(); }
    void validate() const;
};

// Nearest z-monotone table in total L2 distance; each x row is projected
// independently with unit weights (decreasing = reverse, project, reverse).
ScoreTable project_table(const ScoreTable& table, Direction direction);

// Grid CSV: header "x,z1,...,zm", one row per x cell.
ScoreTable read_score_table_csv(const std::string& path);
void write_score_table_csv(const ScoreTable& table, std::ostream& os);
void write_score_table_csv(const ScoreTable& table, const std::string& path);

}  // namespace monogam
