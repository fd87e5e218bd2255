#include "monogam/gam.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "monogam/error.hpp"
#include "monogam/rng.hpp"

namespace monogam {

std::string to_string(Link link) {
    return link == Link::Identity ? "identity" : "sigmoid";
}

Link link_from_string(const std::string& s) {
    if (s == "identity") return Link::Identity;
    if (s == "sigmoid") return Link::Sigmoid;
    throw_schema("unknown link '" + s + "'");
}

std::size_t GamModel::feature_index(const std::string& name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        if (feature_names[i] == name) return i;
    }
    throw_schema("model has no feature '" + name + "'");
}

void GamModel::validate() const {
    if (feature_names.size() != calibrators.size()) {
        throw_numeric("model: feature name/calibrator count mismatch");
    }
    for (const auto& c : calibrators) c.validate();
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double predict_score(const GamModel& model, std::span<const double> row) {
    if (row.size() != model.calibrators.size()) {
        throw_numeric("predict: row has " + std::to_string(row.size()) + " features, model has " +
                      std::to_string(model.calibrators.size()));
    }
    double s = model.bias;
    for (std::size_t d = 0; d < row.size(); ++d) {
        s += eval(model.calibrators[d], row[d]);
    }
    return s;
}

double predict_proba(const GamModel& model, std::span<const double> row) {
    return sigmoid(predict_score(model, row));
}

std::vector<std::size_t> feature_mapping(const GamModel& model, const Dataset& dataset) {
    std::vector<std::size_t> mapping;
    mapping.reserve(model.feature_names.size());
    for (const auto& name : model.feature_names) {
        mapping.push_back(dataset.column_index(name));
    }
    return mapping;
}

double predict_score_row(const GamModel& model, const Dataset& dataset,
                         std::span<const std::size_t> mapping, std::size_t row) {
    double s = model.bias;
    for (std::size_t d = 0; d < model.calibrators.size(); ++d) {
        s += eval(model.calibrators[d], dataset.values[mapping[d]][row]);
    }
    return s;
}

namespace {

double score_at(const GamModel& model, const Dataset& ds, std::size_t r) {
    double s = model.bias;
    for (std::size_t d = 0; d < model.calibrators.size(); ++d) {
        s += eval(model.calibrators[d], ds.values[d][r]);
    }
    return s;
}

// loss(s, y) = max(s,0) - s*y + log(1 + exp(-|s|)), the stable form of
// -y*log(sigmoid(s)) - (1-y)*log(1-sigmoid(s)).
double row_loss(double s, int y) {
    return std::max(s, 0.0) - s * static_cast<double>(y) + std::log1p(std::exp(-std::abs(s)));
}

GamModel init_model(const Dataset& ds, std::span<const std::size_t> train_idx) {
    GamModel model;
    model.link = Link::Sigmoid;
    for (std::size_t c = 0; c < ds.columns.size(); ++c) {
        const auto& col = ds.columns[c];
        std::vector<double> train_vals;
        train_vals.reserve(train_idx.size());
        for (std::size_t r : train_idx) train_vals.push_back(ds.values[c][r]);
        CalibratorCurve curve;
        try {
            curve.keys = quantile_keypoints(train_vals, col.keypoint_count);
        } catch (const Error& e) {
            throw_numeric("feature '" + col.name + "': " + e.what());
        }
        curve.values.assign(curve.keys.size(), 0.0);
        curve.monotonicity = col.monotonicity;
        model.feature_names.push_back(col.name);
        model.calibrators.push_back(std::move(curve));
    }
    double pos = 0.0;
    for (std::size_t r : train_idx) pos += ds.labels[r];
    double rate = pos / static_cast<double>(train_idx.size());
    rate = std::clamp(rate, 1e-12, 1.0 - 1e-12);
    model.bias = std::log(rate / (1.0 - rate));
    return model;
}

GamModel train_one_rate(const Dataset& ds, std::span<const std::size_t> train_idx,
                        const TrainConfig& config, double lr, std::vector<double>* losses) {
    GamModel model = init_model(ds, train_idx);
    const std::size_t n_features = model.calibrators.size();
    const std::size_t batch = std::min<std::size_t>(
        std::max(1, config.minibatch_size), train_idx.size());

    std::vector<std::size_t> order(train_idx.begin(), train_idx.end());
    rng::Engine g(config.seed);

    // Sparse per-batch gradient: (feature, keypoint, weight) triples.
    struct Entry {
        std::size_t feature;
        std::size_t key;
        double weight;
    };
    std::vector<Entry> entries;

    std::vector<std::size_t> all(train_idx.begin(), train_idx.end());
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng::shuffle(order, g);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            const double inv = 1.0 / static_cast<double>(stop - start);
            entries.clear();
            double grad_bias = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                const std::size_t r = order[i];
                double s = model.bias;
                const std::size_t first_entry = entries.size();
                for (std::size_t d = 0; d < n_features; ++d) {
                    const auto w = grad_values(model.calibrators[d], ds.values[d][r]);
                    s += w.w_lo * model.calibrators[d].values[w.lo] +
                         w.w_hi * model.calibrators[d].values[w.hi];
                    entries.push_back({d, w.lo, w.w_lo});
                    if (w.hi != w.lo) entries.push_back({d, w.hi, w.w_hi});
                }
                const double g_row = (sigmoid(s) - static_cast<double>(ds.labels[r])) * inv;
                grad_bias += g_row;
                for (std::size_t e = first_entry; e < entries.size(); ++e) {
                    entries[e].weight *= g_row;
                }
            }
            model.bias -= lr * grad_bias;
            for (const auto& e : entries) {
                model.calibrators[e.feature].values[e.key] -= lr * e.weight;
            }
            for (auto& curve : model.calibrators) project_monotone(curve);
        }
        if (losses) {
            losses->push_back(logistic_loss(model, ds, all));
        }
    }
    return model;
}

}  // namespace

TrainResult train(const Dataset& dataset, const SplitAssignment& split, const TrainConfig& config) {
    dataset.validate();
    if (split.train.empty()) throw_numeric("train: empty training split");
    if (config.learning_rates.empty()) throw_numeric("train: empty learning-rate grid");
    if (config.epochs < 1) throw_numeric("train: epochs must be >= 1");
    if (config.loss != Loss::Logistic) throw_numeric("train: unsupported loss");

    std::vector<double> grid = config.learning_rates;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (double lr : grid) {
        if (!(lr > 0.0)) throw_numeric("train: learning rates must be positive");
    }

    TrainResult result;
    bool have_best = false;
    double best_acc = -1.0;
    double best_rate = 0.0;

    // Validation fallback: with an empty validation split (tiny datasets)
    // rates are scored on the training split.
    std::span<const std::size_t> val_idx =
        split.validation.empty() ? std::span<const std::size_t>(split.train)
                                 : std::span<const std::size_t>(split.validation);

    for (double lr : grid) {
        GamModel candidate = train_one_rate(dataset, split.train, config, lr, nullptr);
        const double acc = accuracy(candidate, dataset, val_idx, config.threshold);
        result.report.rates.push_back({lr, acc});
        if (!have_best || acc > best_acc) {
            have_best = true;
            best_acc = acc;
            best_rate = lr;
            result.model = std::move(candidate);
        }
    }

    result.report.chosen_rate = best_rate;
    result.report.validation_accuracy = best_acc;
    result.report.grid_edge_warning = grid.size() > 1 &&
        (best_rate == grid.front() || best_rate == grid.back());
    if (config.track_loss) {
        // Rerun the chosen rate recording the post-epoch full-batch loss.
        std::vector<double> losses;
        train_one_rate(dataset, split.train, config, best_rate, &losses);
        result.report.epoch_losses = std::move(losses);
    }
    return result;
}

double accuracy(const GamModel& model, const Dataset& dataset,
                std::span<const std::size_t> indices, double threshold) {
    if (indices.empty()) throw_numeric("accuracy: empty index set");
    if (!(threshold > 0.0 && threshold < 1.0)) throw_numeric("accuracy: threshold must be in (0,1)");
    std::size_t hits = 0;
    for (std::size_t r : indices) {
        const int pred = sigmoid(score_at(model, dataset, r)) >= threshold ? 1 : 0;
        hits += pred == dataset.labels[r];
    }
    return static_cast<double>(hits) / static_cast<double>(indices.size());
}

double auc(const GamModel& model, const Dataset& dataset, std::span<const std::size_t> indices) {
    std::vector<std::pair<double, int>> scored;
    scored.reserve(indices.size());
    std::size_t n_pos = 0;
    for (std::size_t r : indices) {
        scored.emplace_back(score_at(model, dataset, r), dataset.labels[r]);
        n_pos += dataset.labels[r];
    }
    const std::size_t n_neg = scored.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw_numeric("auc: need both label classes");

    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // Average ranks over tied scores; AUC = (R+ - n+(n+ + 1)/2) / (n+ n-).
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < scored.size()) {
        std::size_t j = i;
        while (j < scored.size() && scored[j].first == scored[i].first) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);   // 1-based
        for (std::size_t t = i; t < j; ++t) {
            if (scored[t].second == 1) rank_sum_pos += avg_rank;
        }
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

double logistic_loss(const GamModel& model, const Dataset& dataset,
                     std::span<const std::size_t> indices) {
    if (indices.empty()) throw_numeric("loss: empty index set");
    double total = 0.0;
    for (std::size_t r : indices) {
        total += row_loss(score_at(model, dataset, r), dataset.labels[r]);
    }
    return total / static_cast<double>(indices.size());
}

LossGradient logistic_loss_gradient(const GamModel& model, const Dataset& dataset,
                                    std::span<const std::size_t> indices) {
    if (indices.empty()) throw_numeric("loss gradient: empty index set");
    LossGradient grad;
    grad.values.resize(model.calibrators.size());
    for (std::size_t d = 0; d < model.calibrators.size(); ++d) {
        grad.values[d].assign(model.calibrators[d].size(), 0.0);
    }
    const double inv = 1.0 / static_cast<double>(indices.size());
    for (std::size_t r : indices) {
        const double g_row = (sigmoid(score_at(model, dataset, r)) -
                              static_cast<double>(dataset.labels[r])) * inv;
        grad.bias += g_row;
        for (std::size_t d = 0; d < model.calibrators.size(); ++d) {
            const auto w = grad_values(model.calibrators[d], dataset.values[d][r]);
            grad.values[d][w.lo] += g_row * w.w_lo;
            if (w.hi != w.lo) grad.values[d][w.hi] += g_row * w.w_hi;
        }
    }
    return grad;
}

namespace {
using ojson = nlohmann::ordered_json;
constexpr int kModelVersion = 1;
}  // namespace

void save_model(const GamModel& model, const std::string& path,
                const std::map<std::string, std::string>& meta) {
    model.validate();
    ojson doc;
    doc["format"] = "gam-model";
    doc["version"] = kModelVersion;
    doc["link"] = to_string(model.link);
    doc["bias"] = model.bias;
    ojson cols = ojson::array();
    for (std::size_t d = 0; d < model.calibrators.size(); ++d) {
        const auto& c = model.calibrators[d];
        ojson col;
        col["name"] = model.feature_names[d];
        col["monotonicity"] = to_string(c.monotonicity);
        col["keys"] = c.keys;
        col["values"] = c.values;
        cols.push_back(std::move(col));
    }
    doc["columns"] = std::move(cols);
    for (const auto& [k, v] : meta) doc[k] = v;

    std::ofstream out(path);
    if (!out) throw_io("cannot write model file: " + path);
    out << doc.dump(2) << '\n';
}

GamModel load_model(const std::string& path, std::map<std::string, std::string>* meta) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open model file: " + path);
    ojson doc;
    try {
        doc = ojson::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is the offset of the failure, which also localizes truncation.
        throw_schema("model parse error at byte " + std::to_string(e.byte) + " in " + path);
    }
    GamModel model;
    try {
        if (doc.value("format", std::string()) != "gam-model") {
            throw_schema("not a model file: " + path);
        }
        const int version = doc.at("version").get<int>();
        if (version != kModelVersion) {
            throw_schema("unsupported model version " + std::to_string(version) +
                         " (expected " + std::to_string(kModelVersion) + ")");
        }
        model.link = link_from_string(doc.at("link").get<std::string>());
        model.bias = doc.at("bias").get<double>();
        for (const auto& col : doc.at("columns")) {
            CalibratorCurve c;
            c.keys = col.at("keys").get<std::vector<double>>();
            c.values = col.at("values").get<std::vector<double>>();
            c.monotonicity = monotonicity_from_string(col.at("monotonicity").get<std::string>());
            model.feature_names.push_back(col.at("name").get<std::string>());
            model.calibrators.push_back(std::move(c));
        }
        if (meta) {
            for (const auto& [key, value] : doc.items()) {
                if (value.is_string() && key != "format" && key != "link") {
                    (*meta)[key] = value.get<std::string>();
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw_schema("malformed model file " + path + ": " + e.what());
    }
    model.validate();
    return model;
}

}  // namespace monogam
