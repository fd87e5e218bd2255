#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "monogam/calibrator.hpp"
#include "monogam/dataset.hpp"

namespace monogam {

enum class Link { Identity, Sigmoid };

std::string to_string(Link link);
Link link_from_string(const std::string& s);

// Additive model: score(x) = bias + sum_d calibrator_d(x[d]).
struct GamModel {
    std::vector<std::string> feature_names;
    std::vector<CalibratorCurve> calibrators;
    double bias = 0.0;
    Link link = Link::Sigmoid;

    std::size_t feature_index(const std::string& name) const;   // throws Schema
    void validate() const;
};

double sigmoid(double x);
double predict_score(const GamModel& model, std::span<const double> row);
double predict_proba(const GamModel& model, std::span<const double> row);

// Dataset column index for each model feature, matched by name.
std::vector<std::size_t> feature_mapping(const GamModel& model, const Dataset& dataset);

// Score for a dataset row via a precomputed mapping.
double predict_score_row(const GamModel& model, const Dataset& dataset,
                         std::span<const std::size_t> mapping, std::size_t row);

enum class Loss { Logistic };

struct TrainConfig {
    int epochs = 1000;
    int minibatch_size = 128;
    std::vector<double> learning_rates = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    std::uint64_t seed = 0;
    double threshold = 0.5;      // decision threshold for validation accuracy
    Loss loss = Loss::Logistic;
    bool track_loss = false;     // record full-batch training loss per epoch
};

struct RateResult {
    double learning_rate = 0.0;
    double validation_accuracy = 0.0;
};

struct TrainReport {
    std::vector<RateResult> rates;         // ascending learning rate
    double chosen_rate = 0.0;
    double validation_accuracy = 0.0;
    bool grid_edge_warning = false;        // chosen rate sits on a grid endpoint
    std::vector<double> epoch_losses;      // at the chosen rate, when track_loss
};

struct TrainResult {
    GamModel model;
    TrainReport report;
};

// Projected minibatch SGD on logistic loss. Keypoint keys come from the
// training rows only and stay frozen; every parameter update is followed by
// the PAV projection of each constrained calibrator. One model is trained
// per learning rate; the one with the best validation accuracy wins, ties
// going to the smaller rate.
TrainResult train(const Dataset& dataset, const SplitAssignment& split, const TrainConfig& config);

double accuracy(const GamModel& model, const Dataset& dataset,
                std::span<const std::size_t> indices, double threshold = 0.5);

// Mann-Whitney rank statistic, ties counting 1/2.
double auc(const GamModel& model, const Dataset& dataset, std::span<const std::size_t> indices);

// Mean logistic loss and its exact gradient, for gradient checking and the
// training loop itself.
double logistic_loss(const GamModel& model, const Dataset& dataset,
                     std::span<const std::size_t> indices);

struct LossGradient {
    std::vector<std::vector<double>> values;   // [feature][keypoint]
    double bias = 0.0;
};
LossGradient logistic_loss_gradient(const GamModel& model, const Dataset& dataset,
                                    std::span<const std::size_t> indices);

// Versioned JSON model file; round-trips bit-exactly. `meta` lands in the
// file verbatim (seed, config hash, ...).
void save_model(const GamModel& model, const std::string& path,
                const std::map<std::string, std::string>& meta = {});
GamModel load_model(const std::string& path,
                    std::map<std::string, std::string>* meta = nullptr);

}  // namespace monogam
