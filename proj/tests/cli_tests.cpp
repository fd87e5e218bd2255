// Integration tests that drive the installed CLI binary end to end.
// Usage: cli_tests <path-to-monogam-binary>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "monogam/calibrator.hpp"
#include "monogam/gam.hpp"
#include "monogam/isotonic.hpp"
#include "monogam/rng.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    std::cout << (ok ? "  ok: " : "  FAIL: ") << what << "\n";
    if (!ok) ++g_failures;
}

int run(const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string make_dataset_csv(std::size_t rows, std::uint64_t seed) {
    std::ostringstream os;
    os << "months_overdue,married,defaulted\n";
    monogam::rng::Engine g(seed);
    for (std::size_t r = 0; r < rows; ++r) {
        const double overdue = static_cast<double>(monogam::rng::bounded(g, 7)) - 1.0;
        const int married = static_cast<int>(monogam::rng::bounded(g, 2));
        const double p = 0.1 + 0.12 * (overdue + 1.0);
        const int label = monogam::rng::unit(g) < p ? 1 : 0;
        os << overdue << ',' << married << ',' << label << '\n';
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <monogam binary>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path work = fs::temp_directory_path() / "monogam_cli_tests";
    fs::remove_all(work);
    fs::create_directories(work);

    write(work / "data.csv", make_dataset_csv(400, 5));
    write(work / "schema.json", R"({
      "label": "defaulted",
      "protected": "married",
      "columns": [
        {"name": "months_overdue", "kind": "numeric", "monotonicity": "increasing", "keypoints": 8},
        {"name": "married", "kind": "boolean"}
      ]
    })");

    std::cout << "train writes model, report, and split manifest\n";
    const std::string train_cmd = cli + " train --data " + (work / "data.csv").string() +
                                  " --schema " + (work / "schema.json").string() +
                                  " --seed 3 --epochs 25 --lr-grid 0.01,0.1,1 --out " +
                                  (work / "run1").string();
    check(run(train_cmd) == 0, "train exits 0");
    check(fs::exists(work / "run1/model.json"), "model.json written");
    check(fs::exists(work / "run1/train_report.json"), "train_report.json written");
    check(fs::exists(work / "run1/split_manifest.json"), "split_manifest.json written");
    {
        const auto model = monogam::load_model((work / "run1/model.json").string());
        check(monogam::check_monotone(model.calibrators[0]) == 0.0,
              "constrained calibrator is exactly monotone");
    }

    std::cout << "re-running with the same seed is byte-identical\n";
    const std::string rerun_cmd = cli + " train --data " + (work / "data.csv").string() +
                                  " --schema " + (work / "schema.json").string() +
                                  " --seed 3 --epochs 25 --lr-grid 0.01,0.1,1 --out " +
                                  (work / "run2").string();
    check(run(rerun_cmd) == 0, "second train exits 0");
    check(slurp(work / "run1/model.json") == slurp(work / "run2/model.json"),
          "model files identical");
    check(slurp(work / "run1/train_report.json") == slurp(work / "run2/train_report.json"),
          "train reports identical");

    std::cout << "schema errors surface as exit code 3\n";
    write(work / "bad_schema.json", R"({
      "label": "defaulted",
      "columns": [{"name": "absent_column", "kind": "numeric"}]
    })");
    check(run(cli + " train --data " + (work / "data.csv").string() + " --schema " +
              (work / "bad_schema.json").string() + " --out " + (work / "bad").string()) == 3,
          "missing column exits 3");
    check(run(cli + " train --data " + (work / "nope.csv").string() + " --schema " +
              (work / "schema.json").string() + " --out " + (work / "bad").string()) == 2,
          "missing data file exits 2");

    std::cout << "audit produces fairness reports on both scopes\n";
    const std::string audit_cmd = cli + " audit --model " + (work / "run1/model.json").string() +
                                  " --data " + (work / "data.csv").string() + " --schema " +
                                  (work / "schema.json").string() +
                                  " --seed 3 --out " + (work / "audit").string();
    check(run(audit_cmd) == 0, "audit exits 0");
    check(fs::exists(work / "audit/fairness_report.json"), "fairness_report.json written");
    check(fs::exists(work / "audit/fairness_full.csv"), "full-data CSV written");
    check(fs::exists(work / "audit/fairness_test.csv"), "test-split CSV written");
    {
        const auto text = slurp(work / "audit/fairness_report.json");
        check(text.find("\"monotonicity_violation_count\": 0") != std::string::npos,
              "constrained column audits clean");
        check(text.find("config_hash") != std::string::npos, "config hash embedded");
    }

    std::cout << "audit without a protected column is a config error\n";
    write(work / "schema_noprot.json", R"({
      "label": "defaulted",
      "columns": [
        {"name": "months_overdue", "kind": "numeric", "monotonicity": "increasing", "keypoints": 8},
        {"name": "married", "kind": "boolean"}
      ]
    })");
    check(run(cli + " audit --model " + (work / "run1/model.json").string() + " --data " +
              (work / "data.csv").string() + " --schema " +
              (work / "schema_noprot.json").string() + " --out " +
              (work / "audit_noprot").string()) == 3,
          "missing protected column exits 3");

    std::cout << "fixtures and bounds\n";
    check(run(cli + " fixtures --out " + (work / "fixtures").string()) == 0, "fixtures exit 0");
    check(fs::exists(work / "fixtures/b1.json"), "b1.json written");
    check(fs::exists(work / "fixtures/b3.json"), "b3.json written");
    check(run(cli + " bounds --fixture all --out " + (work / "bounds").string()) == 0,
          "fixture bounds exit 0");
    {
        const auto text = slurp(work / "bounds/fixture_report.json");
        check(text.find("1.2") != std::string::npos, "b1 violation 1.2 reported");
        check(text.find("\"satisfied\": true") != std::string::npos, "lemma1 satisfied on b1");
    }
    check(run(cli + " bounds --random 200 --seed 9 --out " + (work / "rand").string()) == 0,
          "random-case bounds exit 0");
    check(run(cli + " bounds --case " + (work / "fixtures/b1.json").string() +
              " --j 1 --k 2 --lemma 1 --out " + (work / "case1").string()) == 0,
          "case bounds exit 0");
    check(run(cli + " bounds --data " + (work / "data.csv").string() + " --schema " +
              (work / "schema.json").string() + " --bins 5 --j 0 --k 1 --out " +
              (work / "empc").string()) == 0,
          "empirical C exit 0");
    check(fs::exists(work / "empc/empirical_c.json"), "empirical_c.json written");

    std::cout << "project restores monotonicity of an imported grid\n";
    write(work / "grid.csv", "x,0,1,2\nrow,1,3,2\n");
    check(run(cli + " project --grid " + (work / "grid.csv").string() + " --direction increasing" +
              " --out " + (work / "proj").string()) == 0,
          "project exits 0");
    {
        const auto t = monogam::read_score_table_csv((work / "proj/projected_grid.csv").string());
        check(t.scores[0][0] == 1.0 && t.scores[0][1] == 2.5 && t.scores[0][2] == 2.5,
              "projected row matches the pooled values");
    }

    std::cout << "grid audit finds the dip\n";
    check(run(cli + " audit --grid " + (work / "grid.csv").string() + " --out " +
              (work / "gridaudit").string()) == 0,
          "grid audit exits 0");
    {
        const auto text = slurp(work / "gridaudit/grid_audit.json");
        check(text.find("\"monotonicity_violation_count\": 1") != std::string::npos,
              "one violation reported");
    }

    std::cout << "export-plots emits curves, grid, and label means\n";
    check(run(cli + " export-plots --model " + (work / "run1/model.json").string() + " --data " +
              (work / "data.csv").string() + " --schema " + (work / "schema.json").string() +
              " --out " + (work / "plots").string()) == 0,
          "export-plots exits 0");
    check(fs::exists(work / "plots/calibrators.csv"), "calibrators.csv written");
    check(fs::exists(work / "plots/prediction_grid.csv"), "prediction_grid.csv written");
    check(fs::exists(work / "plots/label_means.csv"), "label_means.csv written");
    {
        // The constrained feature indexes the grid rows, so scores must be
        // non-decreasing down every column.
        std::ifstream in(work / "plots/prediction_grid.csv");
        std::string header_comment;
        std::getline(in, header_comment);
        std::ostringstream rest;
        rest << in.rdbuf();
        write(work / "plots/grid_body.csv", rest.str());
        const auto grid =
            monogam::read_score_table_csv((work / "plots/grid_body.csv").string());
        bool monotone = true;
        for (std::size_t z = 0; z < grid.z_size(); ++z) {
            for (std::size_t x = 1; x < grid.x_size(); ++x) {
                if (grid.scores[x][z] < grid.scores[x - 1][z] - 1e-12) monotone = false;
            }
        }
        check(monotone, "grid is monotone along the constrained axis");
    }

    std::cout << (g_failures == 0 ? "all cli checks passed\n"
                                  : std::to_string(g_failures) + " cli checks FAILED\n");
    return g_failures == 0 ? 0 : 1;
}
