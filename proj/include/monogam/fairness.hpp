#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "monogam/dataset.hpp"
#include "monogam/gam.hpp"
#include "monogam/isotonic.hpp"

namespace monogam {

// Empirical predictions grouped by ascending protected value.
struct GroupedPredictions {
    std::vector<double> group_values;             // ascending z
    std::vector<std::vector<int>> decisions;      // per group, 0/1
    std::vector<std::vector<int>> labels;         // optional; empty if absent
};

// Threshold model decisions on `indices`, grouped by the dataset's protected
// column. `descending` reverses the group order (policy choice of which end
// is favored).
GroupedPredictions group_predictions(const GamModel& model, const Dataset& dataset,
                                     std::span<const std::size_t> indices,
                                     double threshold = 0.5, bool descending = false);

struct PairViolation {
    std::size_t j = 0;
    std::size_t k = 0;       // indices into group_values, j < k
    double value = 0.0;      // clamped at 0
};

// max over j<k of (P(Yhat=1|Z=j) - P(Yhat=1|Z=k))+ with empirical frequencies.
double max_one_sided_parity(const GroupedPredictions& preds,
                            std::vector<PairViolation>* pairs = nullptr);

// Same, conditioned on Y=1. Throws Numeric naming any group without positives.
double max_one_sided_equal_opportunity(const GroupedPredictions& preds,
                                       std::vector<PairViolation>* pairs = nullptr);

// Exact-expectation variants on a finite score table with conditional
// P(X=x|Z=z) columns (each summing to 1 within 1e-9).
std::vector<double> group_score_means(const ScoreTable& table,
                                      const std::vector<std::vector<double>>& conditional);
double max_one_sided_parity_scores(const ScoreTable& table,
                                   const std::vector<std::vector<double>>& conditional,
                                   std::vector<PairViolation>* pairs = nullptr);

// Average one-sided violation R = (E[f|Z=z_(1)] - E[f|Z=z_(m)]) / m, the
// telescoped form of the per-step sum.
double average_violation_rf(const ScoreTable& table,
                            const std::vector<std::vector<double>>& conditional);

struct MonotonicityViolation {
    std::string column;
    std::size_t probe = 0;    // probe row (model audit) or x-row index (grid audit)
    double at = 0.0;          // input value where the decrease starts
    double delta = 0.0;
    double drop = 0.0;        // positive magnitude of the directed decrease
};

// Ceteris-paribus audit of a model column: for sampled dataset rows (plus a
// sweep over the column's keypoints), report every directed decrease of
// predict_score when the column moves by +delta with the rest of the row
// fixed. Empty result == clean.
std::vector<MonotonicityViolation> audit_monotonicity(
    const GamModel& model, const Dataset& dataset, const std::string& column,
    Direction direction, std::span<const double> deltas,
    std::size_t max_probes = 1000, std::uint64_t seed = 0);

// Grid audit along z: checks all pairs (z, z+delta) present in the support
// (all adjacent pairs when `deltas` is empty).
std::vector<MonotonicityViolation> audit_grid(const ScoreTable& table, Direction direction,
                                              std::span<const double> deltas = {});

// Reads the isotonic grid CSV format for auditing external model outputs.
ScoreTable import_prediction_grid(const std::string& path);

// 0/1 decision table from scores: sigmoid(score) >= threshold.
ScoreTable decisions_from_scores(const ScoreTable& table, double threshold = 0.5);

struct FairnessReport {
    std::vector<double> group_values;
    std::vector<std::size_t> group_sizes;
    std::vector<double> positive_rates;          // P(Yhat=1|Z=z)
    std::vector<double> score_means;             // E[score|Z=z]
    std::vector<PairViolation> parity_pairs;
    double max_parity = 0.0;
    std::vector<PairViolation> eqopp_pairs;
    double max_eqopp = 0.0;
    bool eqopp_valid = false;
    std::string eqopp_note;
    double average_violation = 0.0;              // empirical R
    std::vector<MonotonicityViolation> audit;    // constrained columns
    std::vector<std::string> audited_columns;
};

// Full report over `indices`: Eq-style metrics from thresholded decisions,
// score means, empirical R, and a monotonicity audit of every constrained
// column in its tagged direction.
FairnessReport build_fairness_report(const GamModel& model, const Dataset& dataset,
                                     std::span<const std::size_t> indices,
                                     double threshold = 0.5, bool descending = false,
                                     std::uint64_t seed = 0);

}  // namespace monogam
