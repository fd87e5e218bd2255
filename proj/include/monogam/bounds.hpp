#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "monogam/dataset.hpp"
#include "monogam/isotonic.hpp"
#include "monogam/rng.hpp"

namespace monogam {

// Finite joint distribution over (X, Z) with a non-negative score table and
// optional decision / label models. Semantics: the decision and the label
// are conditionally independent given (X, Z), so
//   p(x, y=1, yhat=1 | z) = P(X=x|Z=z) * label[x][z] * decision[x][z].
struct DiscreteCase {
    std::vector<std::string> x_support;
    std::vector<double> z_support;                  // ascending
    std::vector<double> z_prior;                    // P(Z=z), sums to 1
    std::vector<std::vector<double>> conditional;   // [x][z] = P(X=x|Z=z)
    std::vector<std::vector<double>> score;         // [x][z] = f(x,z) >= 0
    std::vector<std::vector<double>> decision;      // [x][z] = P(Yhat=1|x,z); may be empty
    std::vector<std::vector<double>> label;         // [x][z] = P(Y=1|x,z); may be empty

    std::size_t x_size() const { return x_support.size(); }
    std::size_t z_size() const { return z_support.size(); }
    bool has_decision() const { return !decision.empty(); }
    bool has_label() const { return !label.empty(); }
    ScoreTable score_table() const;
    ScoreTable decision_table() const;
    void validate() const;
};

DiscreteCase read_case_json(const std::string& path);
void write_case_json(const DiscreteCase& c, const std::string& path);

struct BoundReport {
    std::string lemma;
    double bound_value = 0.0;
    double observed_value = 0.0;
    bool satisfied = false;                 // observed <= bound + 1e-12
    std::string witness;                    // x cell at the binding ratio
    std::vector<std::pair<std::string, double>> details;
};

inline constexpr double kBoundTolerance = 1e-12;

// Max over the support of P(X=x|Z=j)/P(X=x|Z=k). Requires absolute
// continuity: P(.|j) must vanish wherever P(.|k) does.
double density_ratio_c(const DiscreteCase& c, std::size_t j, std::size_t k,
                       std::string* witness = nullptr);

// E[f|Z=j] <= C * E[f|Z=k] for z-monotone non-negative scores.
// observed = E[f|Z=j], bound = C * E[f|Z=k].
BoundReport verify_lemma1(const DiscreteCase& c, std::size_t j, std::size_t k);

// P(Yhat=1|Z=j)/P(Yhat=1|Z=k) <= inf_x over the positive-decision support of
// [p(x|j) p(x|Yhat=1,k)] / [p(x|k) p(x|Yhat=1,j)], for monotone decisions.
BoundReport lemma3_bound(const DiscreteCase& c, std::size_t j, std::size_t k);

// True-positive-rate ratio bound: observed = TPR_j / TPR_k, bound =
// inf_x c_j(x)/c_k(x) with c_z(x) = p(x|z) P(Y=1|Yhat=1,z) /
// [p(x|Yhat=1,z) P(Y=1|z)]. The details also carry the variant that
// normalizes by p(x|Y=1,z) instead, when the two differ.
BoundReport lemma4_bound(const DiscreteCase& c, std::size_t j, std::size_t k);

struct Fixture {
    std::string name;
    DiscreteCase data;
    std::map<std::string, double> expected;
    std::string note;
};

// Simpson's-paradox case: z-monotone scores with a one-sided parity
// violation of exactly 1.2 between z=1 and z=2.
Fixture fixture_b1();

// Exact statistical parity with ceteris-paribus decision flips of
// magnitude 1 in both directions.
Fixture fixture_b2();

// Non-monotone table whose monotone projection has a strictly larger
// worst-case pairwise violation (1.2 vs 0.85) while the average violation
// R decreases.
Fixture fixture_b3();

std::vector<Fixture> all_fixtures();

struct EmpiricalC {
    double c = 0.0;
    bool infinite = false;           // absolute-continuity warning (eps = 0)
    double epsilon = 0.5;
    std::size_t bins_used = 0;
    std::vector<double> bin_ratios;  // occupied bins only
};

// Histogram density-ratio estimate between two protected groups, additive
// smoothing eps on counts. An estimate, not a certificate.
EmpiricalC estimate_c_empirical(const Dataset& dataset, int feature_bins,
                                double group_j, double group_k, double epsilon = 0.5);

struct CaseGenOptions {
    std::size_t x_size = 0;      // 0 = draw in [2, max_x]
    std::size_t z_size = 0;      // 0 = draw in [2, max_z]
    std::size_t max_x = 8;
    std::size_t max_z = 4;
    int alpha = 2;               // symmetric Dirichlet concentration
    bool with_decision = true;
    bool with_label = false;
    double score_scale = 2.0;
};

// Random valid case: Dirichlet conditionals/priors, z-monotone scores and
// decisions (rows sorted), strictly interior probabilities.
DiscreteCase random_monotone_case(rng::Engine& g, const CaseGenOptions& options = {});

}  // namespace monogam
