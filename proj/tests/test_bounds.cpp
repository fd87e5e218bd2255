#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "monogam/bounds.hpp"
#include "monogam/error.hpp"
#include "monogam/fairness.hpp"
#include "test_helpers.hpp"

using namespace monogam;
namespace fs = std::filesystem;

namespace {

DiscreteCase two_cell_case(double pj0, double pk0) {
    DiscreteCase c;
    c.x_support = {"0", "1"};
    c.z_support = {0, 1};
    c.z_prior = {0.5, 0.5};
    c.conditional = {{pj0, pk0}, {1.0 - pj0, 1.0 - pk0}};
    c.score = {{0.5, 1.0}, {1.0, 2.0}};
    return c;
}

}  // namespace

TEST_CASE("density ratio C on simple conditionals") {
    CHECK(density_ratio_c(two_cell_case(0.3, 0.3), 0, 1) == doctest::Approx(1.0));
    CHECK(density_ratio_c(two_cell_case(0.9, 0.1), 0, 1) == doctest::Approx(9.0));

    DiscreteCase gap = two_cell_case(0.5, 0.5);
    gap.conditional = {{1.0, 0.0}, {0.0, 1.0}};
    CHECK_THROWS_WITH_AS(density_ratio_c(gap, 0, 1),
                         doctest::Contains("absolute continuity"), Error);
}

TEST_CASE("lemma 1 holds with C = 1 under identical conditionals") {
    const auto c = two_cell_case(0.4, 0.4);
    const auto report = verify_lemma1(c, 0, 1);
    CHECK(report.satisfied);
    CHECK(report.details[0].second == doctest::Approx(1.0));   // C
    CHECK(report.observed_value <= report.bound_value + 1e-12);
}

TEST_CASE("lemma 1 rejects non-monotone scores") {
    auto c = two_cell_case(0.4, 0.4);
    c.score = {{1.0, 0.5}, {1.0, 2.0}};
    CHECK_THROWS_WITH_AS(verify_lemma1(c, 0, 1), doctest::Contains("monotone"), Error);
}

TEST_CASE("fixture b1: Simpson's paradox with violation exactly 1.2") {
    const auto fixture = fixture_b1();
    const auto& c = fixture.data;

    std::vector<PairViolation> pairs;
    const double max_violation = max_one_sided_parity_scores(c.score_table(), c.conditional, &pairs);
    CHECK(std::abs(max_violation - 1.2) <= 1e-12);

    // The binding pair is the middle one, z=1 over z=2.
    double at_1_2 = -1.0;
    for (const auto& p : pairs) {
        if (p.j == 1 && p.k == 2) at_1_2 = p.value;
    }
    CHECK(std::abs(at_1_2 - 1.2) <= 1e-12);

    // The score rows are z-monotone.
    CHECK(audit_grid(c.score_table(), Direction::Increasing).empty());

    // Lemma 1 between the binding groups: tight at C = 9.
    const auto report = verify_lemma1(c, 1, 2);
    CHECK(report.satisfied);
    CHECK(report.details[0].second == doctest::Approx(9.0));
    CHECK(report.observed_value == doctest::Approx(report.bound_value));
}

TEST_CASE("lemma 1 bound is meaningful: any smaller C fails on b1") {
    const auto c = fixture_b1().data;
    const auto report = verify_lemma1(c, 1, 2);
    const double C = report.details[0].second;
    const double ek = report.details[2].second;
    const double observed_ratio = report.observed_value / ek;
    CHECK(observed_ratio == doctest::Approx(C));
    for (double shrink : {0.999, 0.9, 0.5}) {
        const double c_prime = C * shrink;
        CHECK(report.observed_value > c_prime * ek + 1e-12);
    }
}

TEST_CASE("fixture b2: exact parity, opposite monotonicity violations of magnitude 1") {
    const auto fixture = fixture_b2();
    const auto& c = fixture.data;
    const auto decisions = c.decision_table();

    std::vector<PairViolation> pairs;
    const double parity = max_one_sided_parity_scores(decisions, c.conditional, &pairs);
    CHECK(parity == doctest::Approx(0.0));
    // Both directions: reversing group order also yields zero violation.
    ScoreTable reversed = decisions;
    for (auto& row : reversed.scores) std::reverse(row.begin(), row.end());
    CHECK(max_one_sided_parity_scores(reversed, c.conditional, nullptr) == doctest::Approx(0.0));

    const auto inc = audit_grid(decisions, Direction::Increasing);
    const auto dec = audit_grid(decisions, Direction::Decreasing);
    CHECK(!inc.empty());
    CHECK(!dec.empty());
    for (const auto& v : inc) CHECK(v.drop == doctest::Approx(1.0));
    for (const auto& v : dec) CHECK(v.drop == doctest::Approx(1.0));
    CHECK(inc.size() + dec.size() == c.x_size());
}

TEST_CASE("fixture b3: projection worsens the worst case but improves the average") {
    const auto fixture = fixture_b3();
    const auto& c = fixture.data;
    const auto original = c.score_table();
    const auto projected = project_table(original, Direction::Increasing);

    // The stored table is genuinely non-monotone and its projection matches
    // the frozen rows.
    CHECK(!audit_grid(original, Direction::Increasing).empty());
    const std::vector<double> want_row0{5.0, 5.0, 5.0, 9.5};
    const std::vector<double> want_row1{0.0, 3.5, 3.5, 3.5};
    for (std::size_t z = 0; z < 4; ++z) {
        CHECK(projected.scores[0][z] == doctest::Approx(want_row0[z]));
        CHECK(projected.scores[1][z] == doctest::Approx(want_row1[z]));
    }

    const double before = max_one_sided_parity_scores(original, c.conditional, nullptr);
    const double after = max_one_sided_parity_scores(projected, c.conditional, nullptr);
    CHECK(std::abs(before - 0.85) <= 1e-12);
    CHECK(std::abs(after - 1.2) <= 1e-12);
    CHECK(after > before);

    const double r_before = average_violation_rf(original, c.conditional);
    const double r_after = average_violation_rf(projected, c.conditional);
    CHECK(r_before == doctest::Approx(0.2125));
    CHECK(r_after == doctest::Approx(0.1));
    CHECK(r_after < r_before);
}

TEST_CASE("lemma 3: independent decisions give ratio 1 and bound 1") {
    auto c = two_cell_case(0.4, 0.4);
    c.decision = {{0.3, 0.3}, {0.3, 0.3}};
    const auto report = lemma3_bound(c, 0, 1);
    CHECK(report.observed_value == doctest::Approx(1.0));
    CHECK(report.bound_value == doctest::Approx(1.0));
    CHECK(report.satisfied);
}

TEST_CASE("lemma 3 on the frozen likelihood-ratio tradeoff case") {
    // Searched so the infimum witness has a small first factor and a large
    // second factor, the tradeoff between the two likelihood ratios.
    DiscreteCase c;
    c.x_support = {"x0", "x1", "x2"};
    c.z_support = {0, 1};
    c.z_prior = {0.5, 0.5};
    c.conditional = {{0.5, 0.1}, {0.1, 0.6}, {0.4, 0.3}};
    c.decision = {{0.2, 0.5}, {0.4, 0.8}, {0.1, 0.4}};
    c.score = c.decision;

    const auto report = lemma3_bound(c, 0, 1);
    CHECK(report.satisfied);
    CHECK(report.witness == "x1");
    CHECK(report.observed_value == doctest::Approx(18.0 / 65.0).epsilon(1e-12));
    CHECK(report.bound_value == doctest::Approx(36.0 / 65.0).epsilon(1e-12));

    double factor1 = 0.0;
    double factor2 = 0.0;
    for (const auto& [name, value] : report.details) {
        if (name == "likelihood_ratio") factor1 = value;
        if (name == "inverse_ratio_given_yhat") factor2 = value;
    }
    CHECK(factor1 == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(factor2 == doctest::Approx(216.0 / 65.0).epsilon(1e-12));
    CHECK(factor1 < 0.5);
    CHECK(factor2 > 2.0);
}

TEST_CASE("lemma 3 requires monotone decisions and a non-empty support") {
    auto c = two_cell_case(0.4, 0.4);
    c.decision = {{0.6, 0.3}, {0.3, 0.3}};
    CHECK_THROWS_WITH_AS(lemma3_bound(c, 0, 1), doctest::Contains("monotone"), Error);

    c.decision = {{0.0, 0.5}, {0.5, 0.0}};
    CHECK_THROWS_AS(lemma3_bound(c, 0, 1), Error);
}

TEST_CASE("lemma 4: z-independent labels and decisions give ratio 1") {
    auto c = two_cell_case(0.4, 0.4);
    c.decision = {{0.3, 0.3}, {0.3, 0.3}};
    c.label = {{0.7, 0.7}, {0.7, 0.7}};
    const auto report = lemma4_bound(c, 0, 1);
    CHECK(report.observed_value == doctest::Approx(1.0));
    CHECK(report.bound_value == doctest::Approx(1.0));
    CHECK(report.satisfied);
}

TEST_CASE("lemma 4 errors when a group lacks positive-label mass") {
    auto c = two_cell_case(0.4, 0.4);
    c.decision = {{0.3, 0.5}, {0.3, 0.5}};
    c.label = {{0.0, 0.7}, {0.0, 0.7}};   // group j never has Y=1
    CHECK_THROWS_AS(lemma4_bound(c, 0, 1), Error);
}

TEST_CASE("theorem harness: lemmas 1, 3, 4 hold on seeded random cases") {
    rng::Engine g(2024);
    int checks = 0;
    for (int it = 0; it < 300; ++it) {
        CaseGenOptions options;
        options.with_decision = true;
        options.with_label = true;
        const auto c = random_monotone_case(g, options);
        for (std::size_t j = 0; j < c.z_size(); ++j) {
            for (std::size_t k = j + 1; k < c.z_size(); ++k) {
                const auto l1 = verify_lemma1(c, j, k);
                const auto l3 = lemma3_bound(c, j, k);
                const auto l4 = lemma4_bound(c, j, k);
                CHECK(l1.satisfied);
                CHECK(l3.satisfied);
                CHECK(l4.satisfied);
                checks += 3;
            }
        }
    }
    CHECK(checks >= 900);
}

TEST_CASE("bundled fixture files match the built-in definitions") {
    const fs::path dir = fs::path(MONOGAM_SOURCE_DIR) / "data" / "fixtures";
    for (const auto& fixture : all_fixtures()) {
        const auto path = dir / (fixture.name + ".json");
        REQUIRE(fs::exists(path));
        const auto shipped = read_case_json(path.string());
        CHECK(shipped.x_support == fixture.data.x_support);
        CHECK(shipped.z_support == fixture.data.z_support);
        CHECK(shipped.conditional == fixture.data.conditional);
        CHECK(shipped.score == fixture.data.score);
        CHECK(shipped.decision == fixture.data.decision);
    }
}

TEST_CASE("case json round trip") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = (dir / "monogam_case_rt.json").string();
    const auto fixture = fixture_b3();
    write_case_json(fixture.data, path);
    const auto back = read_case_json(path);
    CHECK(back.x_support == fixture.data.x_support);
    CHECK(back.z_support == fixture.data.z_support);
    CHECK(back.conditional == fixture.data.conditional);
    CHECK(back.score == fixture.data.score);

    testutil::write_file(dir / "monogam_case_bad.json", "{\"format\": \"nope\"}");
    CHECK_THROWS_AS(read_case_json((dir / "monogam_case_bad.json").string()), Error);
}

TEST_CASE("empirical C estimation") {
    SUBCASE("same distribution converges near 1") {
        Dataset ds;
        ds.columns = {{"x", ColumnKind::Numeric, Monotonicity::None, 5},
                      {"z", ColumnKind::Numeric, Monotonicity::None, 2}};
        ds.values.resize(2);
        rng::Engine g(99);
        for (int i = 0; i < 10000; ++i) {
            ds.values[0].push_back(rng::unit(g));
            ds.values[1].push_back(static_cast<double>(rng::bounded(g, 2)));
            ds.labels.push_back(static_cast<int>(rng::bounded(g, 2)));
        }
        ds.protected_column = 1;
        const auto est = estimate_c_empirical(ds, 10, 0.0, 1.0, 0.5);
        CHECK(!est.infinite);
        CHECK(est.c <= 1.5);
        CHECK(est.c >= 1.0);   // max of ratios with mean 1 is >= 1
    }

    SUBCASE("disjoint supports with eps=0 flag absolute continuity") {
        Dataset ds;
        ds.columns = {{"x", ColumnKind::Numeric, Monotonicity::None, 5},
                      {"z", ColumnKind::Numeric, Monotonicity::None, 2}};
        ds.values.resize(2);
        for (int i = 0; i < 100; ++i) {
            const double z = i % 2;
            ds.values[0].push_back(z == 0.0 ? 0.1 : 0.9);
            ds.values[1].push_back(z);
            ds.labels.push_back(0);
        }
        ds.protected_column = 1;
        const auto est = estimate_c_empirical(ds, 2, 0.0, 1.0, 0.0);
        CHECK(est.infinite);
        CHECK(std::isinf(est.c));
    }

    SUBCASE("a known 3:1 two-bin ratio is recovered") {
        Dataset ds;
        ds.columns = {{"x", ColumnKind::Numeric, Monotonicity::None, 5},
                      {"z", ColumnKind::Numeric, Monotonicity::None, 2}};
        ds.values.resize(2);
        rng::Engine g(123);
        for (int i = 0; i < 20000; ++i) {
            const double z = static_cast<double>(rng::bounded(g, 2));
            // Group 0 puts 75% of mass in the low bin, group 1 puts 25%.
            const double low_prob = z == 0.0 ? 0.75 : 0.25;
            ds.values[0].push_back(rng::unit(g) < low_prob ? 0.25 : 0.75);
            ds.values[1].push_back(z);
            ds.labels.push_back(0);
        }
        ds.protected_column = 1;
        const auto est = estimate_c_empirical(ds, 2, 0.0, 1.0, 0.5);
        CHECK(est.c == doctest::Approx(3.0).epsilon(0.2 / 3.0));
    }

    SUBCASE("empty group errors") {
        Dataset ds;
        ds.columns = {{"x", ColumnKind::Numeric, Monotonicity::None, 5},
                      {"z", ColumnKind::Numeric, Monotonicity::None, 2}};
        ds.values = {{0.1, 0.2}, {0.0, 0.0}};
        ds.labels = {0, 1};
        ds.protected_column = 1;
        CHECK_THROWS_AS(estimate_c_empirical(ds, 4, 0.0, 1.0, 0.5), Error);
    }
}

TEST_CASE("random case generator emits valid cases of bounded size") {
    rng::Engine g(7);
    for (int it = 0; it < 100; ++it) {
        CaseGenOptions options;
        options.with_decision = true;
        options.with_label = true;
        const auto c = random_monotone_case(g, options);
        CHECK(c.x_size() >= 2);
        CHECK(c.x_size() <= 8);
        CHECK(c.z_size() >= 2);
        CHECK(c.z_size() <= 4);
        // Scores and decisions must be z-monotone by construction.
        CHECK(audit_grid(c.score_table(), Direction::Increasing).empty());
        CHECK(audit_grid(c.decision_table(), Direction::Increasing).empty());
    }
}
