#include "monogam/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "monogam/error.hpp"
#include "monogam/rng.hpp"

namespace monogam {

namespace {

void check_conditional(const ScoreTable& table,
                       const std::vector<std::vector<double>>& conditional) {
    table.validate();
    if (conditional.size() != table.x_size()) {
        throw_numeric("conditional: row count must match the x support");
    }
    for (const auto& row : conditional) {
        if (row.size() != table.z_size()) throw_numeric("conditional: ragged row");
    }
    for (std::size_t z = 0; z < table.z_size(); ++z) {
        double col = 0.0;
        for (std::size_t x = 0; x < table.x_size(); ++x) {
            const double p = conditional[x][z];
            if (!(p >= 0.0 && p <= 1.0)) throw_numeric("conditional: probability outside [0,1]");
            col += p;
        }
        if (std::abs(col - 1.0) > 1e-9) {
            throw_numeric("conditional: column " + std::to_string(z) + " sums to " +
                          std::to_string(col) + ", expected 1");
        }
    }
}

double rate(const std::vector<int>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double max_pairwise(const std::vector<double>& per_group, std::vector<PairViolation>* pairs) {
    double worst = 0.0;
    for (std::size_t j = 0; j < per_group.size(); ++j) {
        for (std::size_t k = j + 1; k < per_group.size(); ++k) {
            const double v = std::max(0.0, per_group[j] - per_group[k]);
            if (pairs) pairs->push_back({j, k, v});
            worst = std::max(worst, v);
        }
    }
    return worst;
}

}  // namespace

GroupedPredictions group_predictions(const GamModel& model, const Dataset& dataset,
                                     std::span<const std::size_t> indices,
                                     double threshold, bool descending) {
    if (!dataset.protected_column) {
        throw_schema("dataset has no protected column designated");
    }
    if (indices.empty()) throw_numeric("group_predictions: empty index set");
    const auto& zcol = dataset.values[*dataset.protected_column];
    const auto mapping = feature_mapping(model, dataset);

    std::map<double, std::size_t> group_of;
    for (std::size_t r : indices) group_of.emplace(zcol[r], 0);
    GroupedPredictions preds;
    for (auto& [z, slot] : group_of) {
        slot = preds.group_values.size();
        preds.group_values.push_back(z);
    }
    if (descending) {
        std::reverse(preds.group_values.begin(), preds.group_values.end());
        for (auto& [z, slot] : group_of) slot = preds.group_values.size() - 1 - slot;
    }
    preds.decisions.resize(preds.group_values.size());
    preds.labels.resize(preds.group_values.size());
    for (std::size_t r : indices) {
        const std::size_t gidx = group_of[zcol[r]];
        const double proba = sigmoid(predict_score_row(model, dataset, mapping, r));
        preds.decisions[gidx].push_back(proba >= threshold ? 1 : 0);
        preds.labels[gidx].push_back(dataset.labels[r]);
    }
    return preds;
}

double max_one_sided_parity(const GroupedPredictions& preds, std::vector<PairViolation>* pairs) {
    if (preds.group_values.size() < 2) throw_numeric("parity: need at least 2 groups");
    std::vector<double> rates;
    for (std::size_t g = 0; g < preds.decisions.size(); ++g) {
        if (preds.decisions[g].empty()) {
            throw_numeric("parity: empty group z=" + std::to_string(preds.group_values[g]));
        }
        rates.push_back(rate(preds.decisions[g]));
    }
    return max_pairwise(rates, pairs);
}

double max_one_sided_equal_opportunity(const GroupedPredictions& preds,
                                       std::vector<PairViolation>* pairs) {
    if (preds.group_values.size() < 2) throw_numeric("equal opportunity: need at least 2 groups");
    if (preds.labels.size() != preds.decisions.size()) {
        throw_numeric("equal opportunity: labels required");
    }
    std::vector<double> tprs;
    for (std::size_t g = 0; g < preds.decisions.size(); ++g) {
        std::size_t positives = 0;
        std::size_t true_positives = 0;
        for (std::size_t i = 0; i < preds.decisions[g].size(); ++i) {
            if (preds.labels[g][i] == 1) {
                ++positives;
                true_positives += preds.decisions[g][i];
            }
        }
        if (positives == 0) {
            throw_numeric("equal opportunity: group z=" + std::to_string(preds.group_values[g]) +
                          " has no positive examples");
        }
        tprs.push_back(static_cast<double>(true_positives) / static_cast<double>(positives));
    }
    return max_pairwise(tprs, pairs);
}

std::vector<double> group_score_means(const ScoreTable& table,
                                      const std::vector<std::vector<double>>& conditional) {
    check_conditional(table, conditional);
    std::vector<double> means(table.z_size(), 0.0);
    for (std::size_t z = 0; z < table.z_size(); ++z) {
        for (std::size_t x = 0; x < table.x_size(); ++x) {
            means[z] += table.scores[x][z] * conditional[x][z];
        }
    }
    return means;
}

double max_one_sided_parity_scores(const ScoreTable& table,
                                   const std::vector<std::vector<double>>& conditional,
                                   std::vector<PairViolation>* pairs) {
    return max_pairwise(group_score_means(table, conditional), pairs);
}

double average_violation_rf(const ScoreTable& table,
                            const std::vector<std::vector<double>>& conditional) {
    const auto means = group_score_means(table, conditional);
    return (means.front() - means.back()) / static_cast<double>(means.size());
}

std::vector<MonotonicityViolation> audit_monotonicity(
    const GamModel& model, const Dataset& dataset, const std::string& column,
    Direction direction, std::span<const double> deltas,
    std::size_t max_probes, std::uint64_t seed) {
    const std::size_t col = model.feature_index(column);
    const auto mapping = feature_mapping(model, dataset);
    for (double d : deltas) {
        if (!(d > 0.0)) throw_numeric("audit: deltas must be positive");
    }

    // Probe sample: up to max_probes dataset rows, deterministic in the seed.
    std::vector<std::size_t> probes(dataset.rows());
    std::iota(probes.begin(), probes.end(), std::size_t{0});
    if (probes.size() > max_probes) {
        rng::Engine g(seed);
        rng::shuffle(probes, g);
        probes.resize(max_probes);
        std::sort(probes.begin(), probes.end());
    }

    const double sign = direction == Direction::Increasing ? 1.0 : -1.0;
    std::vector<MonotonicityViolation> out;
    auto probe_pair = [&](std::vector<double>& row, std::size_t probe, double lo, double hi) {
        row[col] = lo;
        const double base = predict_score(model, row);
        row[col] = hi;
        const double moved = predict_score(model, row);
        const double drop = sign * (base - moved);
        if (drop > 0.0) {
            out.push_back({column, probe, lo, hi - lo, drop});
        }
    };

    const auto& keys = model.calibrators[col].keys;
    for (std::size_t p : probes) {
        // Row in model feature order.
        std::vector<double> row(model.calibrators.size());
        for (std::size_t d = 0; d < row.size(); ++d) row[d] = dataset.values[mapping[d]][p];
        const double x0 = row[col];
        for (double d : deltas) {
            probe_pair(row, p, x0, x0 + d);
        }
        // Keypoint sweep: adjacent key pairs with the rest of the row fixed.
        for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
            probe_pair(row, p, keys[i], keys[i + 1]);
        }
    }
    return out;
}

std::vector<MonotonicityViolation> audit_grid(const ScoreTable& table, Direction direction,
                                              std::span<const double> deltas) {
    table.validate();
    const double sign = direction == Direction::Increasing ? 1.0 : -1.0;
    std::vector<MonotonicityViolation> out;
    const auto& z = table.z_values;

    auto check = [&](std::size_t x, std::size_t a, std::size_t b) {
        const double drop = sign * (table.scores[x][a] - table.scores[x][b]);
        if (drop > 0.0) {
            out.push_back({table.x_cells[x], x, z[a], z[b] - z[a], drop});
        }
    };

    for (std::size_t x = 0; x < table.x_size(); ++x) {
        if (deltas.empty()) {
            for (std::size_t i = 0; i + 1 < z.size(); ++i) check(x, i, i + 1);
        } else {
            for (double d : deltas) {
                if (!(d > 0.0)) throw_numeric("audit: deltas must be positive");
                for (std::size_t i = 0; i < z.size(); ++i) {
                    for (std::size_t j = i + 1; j < z.size(); ++j) {
                        if (std::abs(z[j] - z[i] - d) <= 1e-12) check(x, i, j);
                    }
                }
            }
        }
    }
    return out;
}

ScoreTable import_prediction_grid(const std::string& path) {
    return read_score_table_csv(path);
}

ScoreTable decisions_from_scores(const ScoreTable& table, double threshold) {
    table.validate();
    ScoreTable out = table;
    for (auto& row : out.scores) {
        for (auto& s : row) s = sigmoid(s) >= threshold ? 1.0 : 0.0;
    }
    return out;
}

FairnessReport build_fairness_report(const GamModel& model, const Dataset& dataset,
                                     std::span<const std::size_t> indices,
                                     double threshold, bool descending, std::uint64_t seed) {
    FairnessReport report;
    const auto preds = group_predictions(model, dataset, indices, threshold, descending);
    report.group_values = preds.group_values;
    for (const auto& g : preds.decisions) report.group_sizes.push_back(g.size());
    for (const auto& g : preds.decisions) report.positive_rates.push_back(rate(g));

    report.max_parity = max_one_sided_parity(preds, &report.parity_pairs);
    try {
        report.max_eqopp = max_one_sided_equal_opportunity(preds, &report.eqopp_pairs);
        report.eqopp_valid = true;
    } catch (const Error& e) {
        report.eqopp_valid = false;
        report.eqopp_note = e.what();
    }

    // Empirical score means per group and the average violation R.
    const auto& zcol = dataset.values[*dataset.protected_column];
    const auto mapping = feature_mapping(model, dataset);
    std::map<double, std::pair<double, std::size_t>> acc;
    for (std::size_t r : indices) {
        auto& slot = acc[zcol[r]];
        slot.first += predict_score_row(model, dataset, mapping, r);
        slot.second += 1;
    }
    std::vector<double> means;
    for (const auto& [z, sum_count] : acc) {
        means.push_back(sum_count.first / static_cast<double>(sum_count.second));
    }
    if (descending) std::reverse(means.begin(), means.end());
    report.score_means = means;
    report.average_violation =
        (means.front() - means.back()) / static_cast<double>(means.size());

    for (std::size_t d = 0; d < model.calibrators.size(); ++d) {
        const auto m = model.calibrators[d].monotonicity;
        if (m == Monotonicity::None) continue;
        const Direction dir =
            m == Monotonicity::Increasing ? Direction::Increasing : Direction::Decreasing;
        auto violations =
            audit_monotonicity(model, dataset, model.feature_names[d], dir, {}, 1000, seed);
        report.audited_columns.push_back(model.feature_names[d]);
        report.audit.insert(report.audit.end(), violations.begin(), violations.end());
    }
    return report;
}

}  // namespace monogam
