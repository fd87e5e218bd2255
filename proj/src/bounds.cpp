#include "monogam/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "monogam/error.hpp"

namespace monogam {

namespace {

void check_matrix(const std::vector<std::vector<double>>& m, std::size_t nx, std::size_t nz,
                  const std::string& what, double lo, double hi) {
    if (m.size() != nx) throw_numeric(what + ": row count mismatch");
    for (const auto& row : m) {
        if (row.size() != nz) throw_numeric(what + ": ragged row");
        for (double v : row) {
            if (!(v >= lo) || !(v <= hi) || !std::isfinite(v)) {
                throw_numeric(what + ": value " + std::to_string(v) + " outside [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
            }
        }
    }
}

}  // namespace

ScoreTable DiscreteCase::score_table() const {
    return ScoreTable{x_support, z_support, score};
}

ScoreTable DiscreteCase::decision_table() const {
    if (!has_decision()) throw_numeric("case has no decision table");
    return ScoreTable{x_support, z_support, decision};
}

void DiscreteCase::validate() const {
    if (x_support.empty() || z_support.empty()) throw_numeric("case: empty support");
    for (std::size_t i = 1; i < z_support.size(); ++i) {
        if (!(z_support[i - 1] <= z_support[i])) {
            throw_numeric("case: z support must be sorted ascending");
        }
    }
    if (z_prior.size() != z_size()) throw_numeric("case: prior size mismatch");
    double prior_sum = 0.0;
    for (double p : z_prior) {
        if (!(p >= 0.0 && p <= 1.0)) throw_numeric("case: prior outside [0,1]");
        prior_sum += p;
    }
    if (std::abs(prior_sum - 1.0) > 1e-9) throw_numeric("case: priors must sum to 1");

    check_matrix(conditional, x_size(), z_size(), "conditional", 0.0, 1.0);
    for (std::size_t z = 0; z < z_size(); ++z) {
        double col = 0.0;
        for (std::size_t x = 0; x < x_size(); ++x) col += conditional[x][z];
        if (std::abs(col - 1.0) > 1e-9) {
            throw_numeric("conditional: column " + std::to_string(z) + " sums to " +
                          std::to_string(col) + ", expected 1");
        }
    }
    check_matrix(score, x_size(), z_size(), "score",
                 0.0, std::numeric_limits<double>::infinity());
    if (has_decision()) check_matrix(decision, x_size(), z_size(), "decision", 0.0, 1.0);
    if (has_label()) check_matrix(label, x_size(), z_size(), "label", 0.0, 1.0);
}

double density_ratio_c(const DiscreteCase& c, std::size_t j, std::size_t k,
                       std::string* witness) {
    c.validate();
    if (j >= c.z_size() || k >= c.z_size()) throw_numeric("density ratio: group out of range");
    double best = 0.0;
    std::size_t best_x = 0;
    bool seen = false;
    for (std::size_t x = 0; x < c.x_size(); ++x) {
        const double pj = c.conditional[x][j];
        const double pk = c.conditional[x][k];
        if (pk == 0.0) {
            if (pj > 0.0) {
                throw_numeric("density ratio: P(X=" + c.x_support[x] + "|Z=z_" +
                              std::to_string(j) + ") > 0 where the z_" + std::to_string(k) +
                              " conditional is 0 (absolute continuity violated)");
            }
            continue;
        }
        const double ratio = pj / pk;
        if (!seen || ratio > best) {
            best = ratio;
            best_x = x;
            seen = true;
        }
    }
    if (!seen) throw_numeric("density ratio: reference conditional is all zero");
    if (witness) *witness = c.x_support[best_x];
    return best;
}

namespace {

void require_monotone_scores(const DiscreteCase& c, std::size_t j, std::size_t k) {
    for (std::size_t x = 0; x < c.x_size(); ++x) {
        if (c.score[x][j] > c.score[x][k]) {
            throw_numeric("scores are not monotone between the groups at x=" + c.x_support[x]);
        }
    }
}

void require_monotone_decisions(const DiscreteCase& c, std::size_t j, std::size_t k) {
    for (std::size_t x = 0; x < c.x_size(); ++x) {
        if (c.decision[x][j] > c.decision[x][k]) {
            throw_numeric("decisions are not monotone between the groups at x=" + c.x_support[x]);
        }
    }
}

}  // namespace

BoundReport verify_lemma1(const DiscreteCase& c, std::size_t j, std::size_t k) {
    c.validate();
    if (j > k) throw_numeric("lemma1: requires j <= k");
    require_monotone_scores(c, j, k);

    std::string witness;
    const double C = density_ratio_c(c, j, k, &witness);
    double ej = 0.0;
    double ek = 0.0;
    for (std::size_t x = 0; x < c.x_size(); ++x) {
        ej += c.score[x][j] * c.conditional[x][j];
        ek += c.score[x][k] * c.conditional[x][k];
    }

    BoundReport report;
    report.lemma = "lemma1";
    report.observed_value = ej;
    report.bound_value = C * ek;
    report.satisfied = report.observed_value <= report.bound_value + kBoundTolerance;
    report.witness = witness;
    report.details = {{"C", C}, {"E[f|Z=j]", ej}, {"E[f|Z=k]", ek}};
    return report;
}

BoundReport lemma3_bound(const DiscreteCase& c, std::size_t j, std::size_t k) {
    c.validate();
    if (!c.has_decision()) throw_numeric("lemma3: decision table required");
    if (j > k) throw_numeric("lemma3: requires j <= k");
    require_monotone_decisions(c, j, k);

    double qj = 0.0;
    double qk = 0.0;
    for (std::size_t x = 0; x < c.x_size(); ++x) {
        qj += c.conditional[x][j] * c.decision[x][j];
        qk += c.conditional[x][k] * c.decision[x][k];
    }

    BoundReport report;
    report.lemma = "lemma3";
    bool found = false;
    double best = 0.0;
    double best_f1 = 0.0;
    double best_f2 = 0.0;
    std::size_t best_x = 0;
    for (std::size_t x = 0; x < c.x_size(); ++x) {
        // S: positive joint density p(x, yhat=1 | z) for both groups.
        const double joint_j = c.conditional[x][j] * c.decision[x][j];
        const double joint_k = c.conditional[x][k] * c.decision[x][k];
        if (joint_j <= 0.0 || joint_k <= 0.0) continue;
        const double factor1 = c.conditional[x][j] / c.conditional[x][k];
        const double factor2 = (joint_k / qk) / (joint_j / qj);
        const double value = factor1 * factor2;
        if (!found || value < best) {
            found = true;
            best = value;
            best_f1 = factor1;
            best_f2 = factor2;
            best_x = x;
        }
    }
    if (!found) throw_numeric("lemma3: empty support (no x with positive decision mass in both groups)");

    report.observed_value = qj / qk;
    report.bound_value = best;
    report.satisfied = report.observed_value <= report.bound_value + kBoundTolerance;
    report.witness = c.x_support[best_x];
    report.details = {{"P(Yhat=1|Z=j)", qj},
                      {"P(Yhat=1|Z=k)", qk},
                      {"likelihood_ratio", best_f1},
                      {"inverse_ratio_given_yhat", best_f2}};
    return report;
}

BoundReport lemma4_bound(const DiscreteCase& c, std::size_t j, std::size_t k) {
    c.validate();
    if (!c.has_decision() || !c.has_label()) {
        throw_numeric("lemma4: decision and label tables required");
    }
    if (j > k) throw_numeric("lemma4: requires j <= k");
    require_monotone_decisions(c, j, k);

    // Per-group marginals under label/decision conditional independence.
    auto marginals = [&](std::size_t z, double& q, double& py, double& pyy) {
        q = py = pyy = 0.0;
        for (std::size_t x = 0; x < c.x_size(); ++x) {
            const double px = c.conditional[x][z];
            q += px * c.decision[x][z];
            py += px * c.label[x][z];
            pyy += px * c.label[x][z] * c.decision[x][z];
        }
    };
    double qj, pyj, pyyj, qk, pyk, pyyk;
    marginals(j, qj, pyj, pyyj);
    marginals(k, qk, pyk, pyyk);

    BoundReport report;
    report.lemma = "lemma4";
    bool found = false;
    double best = 0.0;
    double alt_best = 0.0;
    bool alt_differs = false;
    std::size_t best_x = 0;
    for (std::size_t x = 0; x < c.x_size(); ++x) {
        // S: p(x, y=1, yhat=1 | z) > 0 for both groups.
        const double mass_j = c.conditional[x][j] * c.label[x][j] * c.decision[x][j];
        const double mass_k = c.conditional[x][k] * c.label[x][k] * c.decision[x][k];
        if (mass_j <= 0.0 || mass_k <= 0.0) continue;

        auto c_of = [&](std::size_t z, double q, double py, double pyy) {
            const double p_y_given_yhat = pyy / q;
            const double post = c.decision[x][z] * c.conditional[x][z] / q;  // p(x|Yhat=1,z)
            return c.conditional[x][z] * p_y_given_yhat / (post * py);
        };
        auto c_alt = [&](std::size_t z, double q, double py, double pyy) {
            const double p_y_given_yhat = pyy / q;
            const double post_y = c.label[x][z] * c.conditional[x][z] / py;  // p(x|Y=1,z)
            return c.conditional[x][z] * p_y_given_yhat / (post_y * py);
        };
        const double value = c_of(j, qj, pyj, pyyj) / c_of(k, qk, pyk, pyyk);
        const double alt = c_alt(j, qj, pyj, pyyj) / c_alt(k, qk, pyk, pyyk);
        if (!found || value < best) {
            best = value;
            best_x = x;
        }
        if (!found || alt < alt_best) alt_best = alt;
        if (std::abs(alt - value) > 1e-12) alt_differs = true;
        found = true;
    }
    if (!found) {
        throw_numeric("lemma4: empty support (a group lacks positive-label decision mass)");
    }

    report.observed_value = (pyyj / pyj) / (pyyk / pyk);   // TPR_j / TPR_k
    report.bound_value = best;
    report.satisfied = report.observed_value <= report.bound_value + kBoundTolerance;
    report.witness = c.x_support[best_x];
    report.details = {{"TPR_j", pyyj / pyj}, {"TPR_k", pyyk / pyk}};
    if (alt_differs) {
        // The proof-side variant normalizing by p(x|Y=1,z); reported for
        // comparison, not used for the satisfied flag.
        report.details.emplace_back("bound_variant_p_x_given_y", alt_best);
    }
    return report;
}

namespace {

std::vector<std::vector<double>> zeros(std::size_t nx, std::size_t nz) {
    return std::vector<std::vector<double>>(nx, std::vector<double>(nz, 0.0));
}

}  // namespace

Fixture fixture_b1() {
    Fixture f;
    f.name = "b1";
    f.note = "z-monotone scores, skewed conditionals: one-sided parity violation 1.2 "
             "between the middle groups via Simpson's paradox; lemma1 bound is tight (C=9).";
    DiscreteCase& c = f.data;
    c.x_support = {"0", "1"};
    c.z_support = {0, 1, 2, 3};
    c.z_prior = {0.25, 0.25, 0.25, 0.25};
    c.conditional = {{0.9, 0.9, 0.1, 0.1},
                     {0.1, 0.1, 0.9, 0.9}};
    c.score = {{1.0, 1.5, 1.5, 3.0},
               {0.0, 0.0, 0.0, 0.0}};
    c.validate();
    f.expected = {{"max_parity_violation", 1.2},
                  {"violation_pair_j", 1},
                  {"violation_pair_k", 2},
                  {"lemma1_C_1_2", 9.0}};
    return f;
}

Fixture fixture_b2() {
    Fixture f;
    f.name = "b2";
    f.note = "height/team selection: exact statistical parity, yet the decision flips "
             "0<->1 across groups at every x, so both monotone directions are violated "
             "with magnitude 1.";
    DiscreteCase& c = f.data;
    c.x_support = {"h0", "h1", "h2", "h3"};
    c.z_support = {0, 1};
    c.z_prior = {0.5, 0.5};
    c.conditional = {{0.25, 0.25}, {0.25, 0.25}, {0.25, 0.25}, {0.25, 0.25}};
    c.decision = {{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}};
    c.score = c.decision;
    c.validate();
    f.expected = {{"parity_violation", 0.0},
                  {"monotonicity_violation_increasing", 1.0},
                  {"monotonicity_violation_decreasing", 1.0}};
    return f;
}

Fixture fixture_b3() {
    Fixture f;
    f.name = "b3";
    f.note = "monotone projection increases the worst-case pairwise violation "
             "(0.85 -> 1.2) while the average violation R decreases (0.2125 -> 0.1).";
    DiscreteCase& c = f.data;
    c.x_support = {"0", "1"};
    c.z_support = {0, 1, 2, 3};
    c.z_prior = {0.25, 0.25, 0.25, 0.25};
    c.conditional = {{0.9, 0.9, 0.1, 0.1},
                     {0.1, 0.1, 0.9, 0.9}};
    c.score = {{5.25, 4.75, 5.0, 9.5},
               {0.0, 3.5, 3.75, 3.25}};
    c.validate();
    f.expected = {{"max_parity_violation", 0.85},
                  {"projected_max_parity_violation", 1.2},
                  {"average_violation", 0.2125},
                  {"projected_average_violation", 0.1}};
    return f;
}

std::vector<Fixture> all_fixtures() {
    return {fixture_b1(), fixture_b2(), fixture_b3()};
}

EmpiricalC estimate_c_empirical(const Dataset& dataset, int feature_bins,
                                double group_j, double group_k, double epsilon) {
    dataset.validate();
    if (!dataset.protected_column) throw_schema("dataset has no protected column designated");
    if (feature_bins < 1) throw_numeric("estimate_c: feature_bins must be >= 1");
    if (epsilon < 0.0) throw_numeric("estimate_c: epsilon must be >= 0");

    const std::size_t zc = *dataset.protected_column;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < dataset.columns.size(); ++c) {
        if (c != zc) feature_cols.push_back(c);
    }
    if (feature_cols.empty()) throw_numeric("estimate_c: no feature columns besides the protected one");

    double cells = 1.0;
    for (std::size_t i = 0; i < feature_cols.size(); ++i) {
        cells *= static_cast<double>(feature_bins);
    }
    if (cells > 1e6) throw_numeric("estimate_c: bin grid too large; reduce feature_bins");
    const auto n_cells = static_cast<std::size_t>(cells);

    // Equal-width bins per column over the pooled range.
    std::vector<double> lo(feature_cols.size()), width(feature_cols.size());
    for (std::size_t i = 0; i < feature_cols.size(); ++i) {
        const auto& col = dataset.values[feature_cols[i]];
        const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        lo[i] = *mn;
        width[i] = (*mx - *mn) / static_cast<double>(feature_bins);
        if (width[i] == 0.0) width[i] = 1.0;   // constant column: single occupied bin
    }
    auto bin_of = [&](std::size_t r) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < feature_cols.size(); ++i) {
            const double v = dataset.values[feature_cols[i]][r];
            auto b = static_cast<long long>((v - lo[i]) / width[i]);
            b = std::clamp<long long>(b, 0, feature_bins - 1);
            idx = idx * static_cast<std::size_t>(feature_bins) + static_cast<std::size_t>(b);
        }
        return idx;
    };

    std::vector<double> count_j(n_cells, 0.0), count_k(n_cells, 0.0);
    std::size_t n_j = 0, n_k = 0;
    const auto& zvals = dataset.values[zc];
    for (std::size_t r = 0; r < dataset.rows(); ++r) {
        if (zvals[r] == group_j) {
            ++n_j;
            count_j[bin_of(r)] += 1.0;
        } else if (zvals[r] == group_k) {
            ++n_k;
            count_k[bin_of(r)] += 1.0;
        }
    }
    if (n_j == 0) throw_numeric("estimate_c: empty group j");
    if (n_k == 0) throw_numeric("estimate_c: empty group k");

    EmpiricalC result;
    result.epsilon = epsilon;
    const double denom_j = static_cast<double>(n_j) + epsilon * static_cast<double>(n_cells);
    const double denom_k = static_cast<double>(n_k) + epsilon * static_cast<double>(n_cells);
    for (std::size_t b = 0; b < n_cells; ++b) {
        if (count_j[b] == 0.0 && count_k[b] == 0.0) continue;
        ++result.bins_used;
        const double pj = (count_j[b] + epsilon) / denom_j;
        const double pk = (count_k[b] + epsilon) / denom_k;
        if (pk == 0.0) {
            if (pj > 0.0) result.infinite = true;
            continue;
        }
        const double ratio = pj / pk;
        result.bin_ratios.push_back(ratio);
        result.c = std::max(result.c, ratio);
    }
    if (result.infinite) result.c = std::numeric_limits<double>::infinity();
    return result;
}

DiscreteCase random_monotone_case(rng::Engine& g, const CaseGenOptions& options) {
    const std::size_t nx = options.x_size != 0
        ? options.x_size
        : 2 + static_cast<std::size_t>(rng::bounded(g, options.max_x - 1));
    const std::size_t nz = options.z_size != 0
        ? options.z_size
        : 2 + static_cast<std::size_t>(rng::bounded(g, options.max_z - 1));

    DiscreteCase c;
    for (std::size_t x = 0; x < nx; ++x) c.x_support.push_back("x" + std::to_string(x));
    for (std::size_t z = 0; z < nz; ++z) c.z_support.push_back(static_cast<double>(z));
    c.z_prior = rng::dirichlet(g, nz, options.alpha);

    c.conditional = zeros(nx, nz);
    for (std::size_t z = 0; z < nz; ++z) {
        const auto col = rng::dirichlet(g, nx, options.alpha);
        for (std::size_t x = 0; x < nx; ++x) c.conditional[x][z] = col[x];
    }

    c.score = zeros(nx, nz);
    for (std::size_t x = 0; x < nx; ++x) {
        std::vector<double> row(nz);
        for (auto& v : row) v = rng::uniform(g, 0.0, options.score_scale);
        std::sort(row.begin(), row.end());
        c.score[x] = std::move(row);
    }

    if (options.with_decision) {
        c.decision = zeros(nx, nz);
        for (std::size_t x = 0; x < nx; ++x) {
            std::vector<double> row(nz);
            for (auto& v : row) v = rng::uniform(g, 0.02, 0.98);
            std::sort(row.begin(), row.end());
            c.decision[x] = std::move(row);
        }
    }
    if (options.with_label) {
        c.label = zeros(nx, nz);
        for (std::size_t x = 0; x < nx; ++x) {
            for (std::size_t z = 0; z < nz; ++z) {
                c.label[x][z] = rng::uniform(g, 0.05, 0.95);
            }
        }
    }
    c.validate();
    return c;
}

namespace {
using ojson = nlohmann::ordered_json;

ojson matrix_to_json(const std::vector<std::vector<double>>& m) {
    ojson out = ojson::array();
    for (const auto& row : m) out.push_back(row);
    return out;
}

std::vector<std::vector<double>> matrix_from_json(const ojson& j) {
    std::vector<std::vector<double>> out;
    for (const auto& row : j) out.push_back(row.get<std::vector<double>>());
    return out;
}
}  // namespace

void write_case_json(const DiscreteCase& c, const std::string& path) {
    c.validate();
    ojson doc;
    doc["format"] = "discrete-case";
    doc["version"] = 1;
    doc["x_support"] = c.x_support;
    doc["z_support"] = c.z_support;
    doc["z_prior"] = c.z_prior;
    doc["conditional"] = matrix_to_json(c.conditional);
    doc["score"] = matrix_to_json(c.score);
    if (c.has_decision()) doc["decision"] = matrix_to_json(c.decision);
    if (c.has_label()) doc["label"] = matrix_to_json(c.label);
    std::ofstream out(path);
    if (!out) throw_io("cannot write case file: " + path);
    out << doc.dump(2) << '\n';
}

DiscreteCase read_case_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open case file: " + path);
    ojson doc;
    try {
        doc = ojson::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw_schema("case parse error at byte " + std::to_string(e.byte) + " in " + path);
    }
    DiscreteCase c;
    try {
        if (doc.value("format", std::string()) != "discrete-case") {
            throw_schema("not a discrete-case file: " + path);
        }
        if (doc.at("version").get<int>() != 1) {
            throw_schema("unsupported case version in " + path);
        }
        c.x_support = doc.at("x_support").get<std::vector<std::string>>();
        c.z_support = doc.at("z_support").get<std::vector<double>>();
        c.z_prior = doc.at("z_prior").get<std::vector<double>>();
        c.conditional = matrix_from_json(doc.at("conditional"));
        c.score = matrix_from_json(doc.at("score"));
        if (doc.contains("decision")) c.decision = matrix_from_json(doc.at("decision"));
        if (doc.contains("label")) c.label = matrix_from_json(doc.at("label"));
    } catch (const nlohmann::json::exception& e) {
        throw_schema("malformed case file " + path + ": " + e.what());
    }
    c.validate();
    return c;
}

}  // namespace monogam
