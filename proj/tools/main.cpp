#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "monogam/bounds.hpp"
#include "monogam/error.hpp"
#include "monogam/fairness.hpp"
#include "monogam/gam.hpp"
#include "monogam/report.hpp"

namespace fs = std::filesystem;
using namespace monogam;

namespace {

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return 2;
        case ErrorKind::Schema: return 3;
        case ErrorKind::Numeric: return 4;
        case ErrorKind::Theorem: return 5;
    }
    return 1;
}

std::string default_out() {
    if (const char* env = std::getenv("MONOGAM_OUT")) return env;
    return ".";
}

fs::path ensure_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw_io("cannot create output directory: " + dir);
    return p;
}

// Canonical "key=value" config string; its hash is embedded in every output.
class ConfigTrace {
public:
    explicit ConfigTrace(std::string command) : command_(std::move(command)) {}

    template <typename T>
    void add(const std::string& key, const T& value) {
        std::ostringstream os;
        os.precision(17);
        os << value;
        entries_.emplace_back(key, os.str());
    }

    std::string hash() const {
        std::string joined = command_;
        auto sorted = entries_;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& [k, v] : sorted) joined += "\n" + k + "=" + v;
        return fnv1a64_hex(joined);
    }

private:
    std::string command_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

struct DataArgs {
    std::string data_path;
    std::string schema_path;
    std::string protected_override;

    Dataset load() const {
        CsvSchema schema = load_schema(schema_path);
        if (!protected_override.empty()) schema.protected_column = protected_override;
        return load_csv(data_path, schema);
    }
};

std::vector<double> parse_lr_grid(const std::string& spec) {
    std::vector<double> grid;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            grid.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw_schema("bad learning rate '" + tok + "' in --lr-grid");
        }
    }
    if (grid.empty()) throw_schema("--lr-grid parsed to an empty grid");
    return grid;
}

std::string index_hash(const std::vector<std::size_t>& idx) {
    std::ostringstream os;
    for (std::size_t i : idx) os << i << ',';
    return fnv1a64_hex(os.str());
}

// ---------------------------------------------------------------- train ----

struct TrainArgs {
    DataArgs data;
    std::uint64_t seed = 0;
    int epochs = 1000;
    int batch = 128;
    double threshold = 0.5;
    std::string lr_grid = "1e-4,1e-3,1e-2,1e-1,1";
    bool track_loss = false;
    std::string out = default_out();
};

int cmd_train(const TrainArgs& args) {
    ConfigTrace trace("train");
    trace.add("data", args.data.data_path);
    trace.add("schema", args.data.schema_path);
    trace.add("protected", args.data.protected_override);
    trace.add("seed", args.seed);
    trace.add("epochs", args.epochs);
    trace.add("batch", args.batch);
    trace.add("threshold", args.threshold);
    trace.add("lr_grid", args.lr_grid);
    const std::string hash = trace.hash();

    const Dataset ds = args.data.load();
    const SplitAssignment parts = split(ds, args.seed);

    TrainConfig config;
    config.epochs = args.epochs;
    config.minibatch_size = args.batch;
    config.learning_rates = parse_lr_grid(args.lr_grid);
    config.seed = args.seed;
    config.threshold = args.threshold;
    config.track_loss = args.track_loss;

    const auto start = std::chrono::steady_clock::now();
    TrainResult result = train(ds, parts, config);
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

    const fs::path out = ensure_dir(args.out);
    std::map<std::string, std::string> meta{{"seed", std::to_string(args.seed)},
                                            {"config_hash", hash}};
    save_model(result.model, (out / "model.json").string(), meta);

    ojson report = to_json(result.report);
    report["seed"] = args.seed;
    report["config_hash"] = hash;
    report["train_accuracy"] = accuracy(result.model, ds, parts.train, args.threshold);
    if (!parts.test.empty()) {
        report["test_accuracy"] = accuracy(result.model, ds, parts.test, args.threshold);
    }
    write_json_file((out / "train_report.json").string(), report);

    ojson manifest;
    manifest["seed"] = args.seed;
    manifest["config_hash"] = hash;
    manifest["rows"] = ds.rows();
    manifest["dropped_rows"] = ds.dropped_rows;
    manifest["train_rows"] = parts.train.size();
    manifest["validation_rows"] = parts.validation.size();
    manifest["test_rows"] = parts.test.size();
    manifest["train_index_hash"] = index_hash(parts.train);
    manifest["validation_index_hash"] = index_hash(parts.validation);
    manifest["test_index_hash"] = index_hash(parts.test);
    write_json_file((out / "split_manifest.json").string(), manifest);

    std::cout << "model: " << (out / "model.json").string() << "\n"
              << "chosen learning rate: " << result.report.chosen_rate
              << (result.report.grid_edge_warning
                      ? "  (warning: on the grid edge, consider extending --lr-grid)"
                      : "")
              << "\n"
              << "validation accuracy: " << result.report.validation_accuracy << "\n"
              << "wall time: " << elapsed.count() << " s\n";
    return 0;
}

// ---------------------------------------------------------------- audit ----

struct AuditArgs {
    DataArgs data;
    std::string model_path;
    std::string grid_path;
    std::string case_path;
    std::string conditional_path;
    std::uint64_t seed = 0;
    double threshold = 0.5;
    std::string direction = "ascending";
    std::string out = default_out();
};

std::vector<std::vector<double>> conditional_from_grid(const ScoreTable& grid) {
    return grid.scores;
}

int cmd_audit(const AuditArgs& args) {
    ConfigTrace trace("audit");
    trace.add("model", args.model_path);
    trace.add("grid", args.grid_path);
    trace.add("case", args.case_path);
    trace.add("data", args.data.data_path);
    trace.add("seed", args.seed);
    trace.add("threshold", args.threshold);
    trace.add("direction", args.direction);
    const std::string hash = trace.hash();
    const fs::path out = ensure_dir(args.out);
    const bool descending = args.direction == "descending";

    if (!args.model_path.empty()) {
        if (args.data.data_path.empty()) throw_schema("audit --model requires --data and --schema");
        const Dataset ds = args.data.load();
        const GamModel model = load_model(args.model_path);

        std::vector<std::size_t> all(ds.rows());
        std::iota(all.begin(), all.end(), std::size_t{0});
        const SplitAssignment parts = split(ds, args.seed);

        // The split used at training time is recovered from the seed; both
        // full-data and test-split frequencies are reported, labeled.
        ojson doc;
        doc["seed"] = args.seed;
        doc["config_hash"] = hash;
        const FairnessReport full =
            build_fairness_report(model, ds, all, args.threshold, descending, args.seed);
        const FairnessReport test =
            build_fairness_report(model, ds, parts.test, args.threshold, descending, args.seed);
        doc["full_data"] = to_json(full);
        doc["test_split"] = to_json(test);
        write_json_file((out / "fairness_report.json").string(), doc);
        write_text_file((out / "fairness_full.csv").string(),
                        fairness_report_csv(full, "scope=full_data seed=" + std::to_string(args.seed) +
                                                      " config_hash=" + hash));
        write_text_file((out / "fairness_test.csv").string(),
                        fairness_report_csv(test, "scope=test_split seed=" + std::to_string(args.seed) +
                                                      " config_hash=" + hash));
        std::cout << "max one-sided parity violation (test): " << test.max_parity << "\n"
                  << "monotonicity violations on constrained columns: " << test.audit.size()
                  << "\n";
        return 0;
    }

    if (!args.grid_path.empty()) {
        const ScoreTable grid = import_prediction_grid(args.grid_path);
        const Direction dir = descending ? Direction::Decreasing : Direction::Increasing;
        const auto violations = audit_grid(grid, dir);
        ojson doc;
        doc["seed"] = args.seed;
        doc["config_hash"] = hash;
        doc["direction"] = args.direction;
        ojson arr = ojson::array();
        for (const auto& v : violations) {
            arr.push_back({{"x", v.column}, {"z", v.at}, {"delta", v.delta}, {"drop", v.drop}});
        }
        doc["monotonicity_violations"] = std::move(arr);
        doc["monotonicity_violation_count"] = violations.size();
        if (!args.conditional_path.empty()) {
            const ScoreTable cond_grid = read_score_table_csv(args.conditional_path);
            const auto conditional = conditional_from_grid(cond_grid);
            std::vector<PairViolation> pairs;
            const ScoreTable decisions = decisions_from_scores(grid, args.threshold);
            doc["max_one_sided_parity_violation"] =
                max_one_sided_parity_scores(decisions, conditional, &pairs);
            doc["average_violation"] = average_violation_rf(grid, conditional);
        }
        write_json_file((out / "grid_audit.json").string(), doc);
        std::cout << "grid monotonicity violations: " << violations.size() << "\n";
        return 0;
    }

    if (!args.case_path.empty()) {
        const DiscreteCase c = read_case_json(args.case_path);
        ojson doc;
        doc["seed"] = args.seed;
        doc["config_hash"] = hash;
        std::vector<PairViolation> pairs;
        const double score_parity =
            max_one_sided_parity_scores(c.score_table(), c.conditional, &pairs);
        doc["max_one_sided_parity_violation_scores"] = score_parity;
        ojson pair_arr = ojson::array();
        for (const auto& p : pairs) {
            pair_arr.push_back({{"z_j", c.z_support[p.j]},
                                {"z_k", c.z_support[p.k]},
                                {"violation", p.value}});
        }
        doc["parity_pairs"] = std::move(pair_arr);
        doc["average_violation"] = average_violation_rf(c.score_table(), c.conditional);
        if (c.has_decision()) {
            std::vector<PairViolation> dpairs;
            doc["max_one_sided_parity_violation_decisions"] =
                max_one_sided_parity_scores(c.decision_table(), c.conditional, &dpairs);
            doc["decision_monotonicity_violations_increasing"] =
                audit_grid(c.decision_table(), Direction::Increasing).size();
            doc["decision_monotonicity_violations_decreasing"] =
                audit_grid(c.decision_table(), Direction::Decreasing).size();
        }
        doc["score_monotonicity_violations_increasing"] =
            audit_grid(c.score_table(), Direction::Increasing).size();
        write_json_file((out / "case_audit.json").string(), doc);
        std::cout << "max one-sided parity violation (scores): " << score_parity << "\n";
        return 0;
    }

    throw_schema("audit: pass --model with --data/--schema, or --grid, or --case");
}

// --------------------------------------------------------------- bounds ----

struct BoundsArgs {
    std::string case_path;
    std::string fixture;
    DataArgs data;
    int random_cases = 0;
    std::uint64_t seed = 0;
    int group_j = 0;
    int group_k = 1;
    int bins = 10;
    double epsilon = 0.5;
    std::string lemma = "all";
    std::string out = default_out();
};

ojson run_lemmas(const DiscreteCase& c, std::size_t j, std::size_t k, const std::string& which,
                 bool* all_satisfied) {
    ojson reports = ojson::array();
    auto push = [&](const BoundReport& r) {
        reports.push_back(to_json(r));
        if (!r.satisfied && all_satisfied) *all_satisfied = false;
    };
    if (which == "1" || which == "all") push(verify_lemma1(c, j, k));
    if ((which == "3" || which == "all") && c.has_decision()) push(lemma3_bound(c, j, k));
    if ((which == "4" || which == "all") && c.has_decision() && c.has_label()) {
        push(lemma4_bound(c, j, k));
    }
    return reports;
}

int cmd_bounds(const BoundsArgs& args) {
    ConfigTrace trace("bounds");
    trace.add("case", args.case_path);
    trace.add("fixture", args.fixture);
    trace.add("random", args.random_cases);
    trace.add("seed", args.seed);
    trace.add("j", args.group_j);
    trace.add("k", args.group_k);
    trace.add("lemma", args.lemma);
    const std::string hash = trace.hash();
    const fs::path out = ensure_dir(args.out);
    bool all_satisfied = true;

    if (!args.fixture.empty()) {
        ojson doc;
        doc["seed"] = args.seed;
        doc["config_hash"] = hash;
        ojson items = ojson::array();
        for (const auto& fixture : all_fixtures()) {
            if (args.fixture != "all" && args.fixture != fixture.name) continue;
            ojson item;
            item["name"] = fixture.name;
            item["note"] = fixture.note;
            const DiscreteCase& c = fixture.data;
            std::vector<PairViolation> pairs;
            item["max_one_sided_parity_violation_scores"] =
                max_one_sided_parity_scores(c.score_table(), c.conditional, &pairs);
            item["average_violation"] = average_violation_rf(c.score_table(), c.conditional);
            if (fixture.name == "b1") {
                item["lemma1_z1_z2"] = to_json(verify_lemma1(c, 1, 2));
                if (!verify_lemma1(c, 1, 2).satisfied) all_satisfied = false;
            }
            if (fixture.name == "b2") {
                std::vector<PairViolation> dpairs;
                item["max_one_sided_parity_violation_decisions"] =
                    max_one_sided_parity_scores(c.decision_table(), c.conditional, &dpairs);
                item["monotonicity_violations_increasing"] =
                    audit_grid(c.decision_table(), Direction::Increasing).size();
                item["monotonicity_violations_decreasing"] =
                    audit_grid(c.decision_table(), Direction::Decreasing).size();
            }
            if (fixture.name == "b3") {
                const ScoreTable projected = project_table(c.score_table(), Direction::Increasing);
                item["projected_max_one_sided_parity_violation"] =
                    max_one_sided_parity_scores(projected, c.conditional, nullptr);
                item["projected_average_violation"] =
                    average_violation_rf(projected, c.conditional);
            }
            ojson expected;
            for (const auto& [k, v] : fixture.expected) expected[k] = v;
            item["expected"] = std::move(expected);
            items.push_back(std::move(item));
        }
        if (items.empty()) throw_schema("unknown fixture '" + args.fixture + "'");
        doc["fixtures"] = std::move(items);
        write_json_file((out / "fixture_report.json").string(), doc);
        std::cout << "fixture report: " << (out / "fixture_report.json").string() << "\n";
        if (!all_satisfied) throw_theorem("a fixture lemma check failed");
        return 0;
    }

    if (args.random_cases > 0) {
        rng::Engine g(args.seed);
        std::size_t checks = 0;
        ojson failures = ojson::array();
        for (int i = 0; i < args.random_cases; ++i) {
            CaseGenOptions options;
            options.with_decision = true;
            options.with_label = true;
            const DiscreteCase c = random_monotone_case(g, options);
            for (std::size_t j = 0; j < c.z_size(); ++j) {
                for (std::size_t k = j + 1; k < c.z_size(); ++k) {
                    for (const auto& rep :
                         {verify_lemma1(c, j, k), lemma3_bound(c, j, k), lemma4_bound(c, j, k)}) {
                        ++checks;
                        if (!rep.satisfied) {
                            all_satisfied = false;
                            ojson f = to_json(rep);
                            f["case_index"] = i;
                            failures.push_back(std::move(f));
                        }
                    }
                }
            }
        }
        ojson doc;
        doc["seed"] = args.seed;
        doc["config_hash"] = hash;
        doc["cases"] = args.random_cases;
        doc["checks"] = checks;
        doc["all_satisfied"] = all_satisfied;
        doc["failures"] = std::move(failures);
        write_json_file((out / "random_bounds_report.json").string(), doc);
        std::cout << checks << " lemma checks on " << args.random_cases
                  << " random cases: " << (all_satisfied ? "all satisfied" : "FAILURES") << "\n";
        if (!all_satisfied) throw_theorem("random-case lemma check failed (build defect)");
        return 0;
    }

    if (!args.case_path.empty()) {
        const DiscreteCase c = read_case_json(args.case_path);
        const auto j = static_cast<std::size_t>(args.group_j);
        const auto k = static_cast<std::size_t>(args.group_k);
        ojson doc;
        doc["seed"] = args.seed;
        doc["config_hash"] = hash;
        doc["reports"] = run_lemmas(c, j, k, args.lemma, &all_satisfied);
        write_json_file((out / "bound_report.json").string(), doc);
        std::cout << "bound report: " << (out / "bound_report.json").string() << "\n";
        if (!all_satisfied) throw_theorem("a lemma check failed on the supplied case");
        return 0;
    }

    if (!args.data.data_path.empty()) {
        const Dataset ds = args.data.load();
        if (!ds.protected_column) throw_schema("bounds --data requires a protected column");
        const auto& zvals = ds.values[*ds.protected_column];
        std::set<double> groups(zvals.begin(), zvals.end());
        std::vector<double> ordered(groups.begin(), groups.end());
        if (args.group_j >= static_cast<int>(ordered.size()) ||
            args.group_k >= static_cast<int>(ordered.size())) {
            throw_schema("bounds: group index out of range for the protected column");
        }
        const EmpiricalC est = estimate_c_empirical(ds, args.bins, ordered[args.group_j],
                                                    ordered[args.group_k], args.epsilon);
        ojson doc = to_json(est);
        doc["seed"] = args.seed;
        doc["config_hash"] = hash;
        doc["group_j"] = ordered[args.group_j];
        doc["group_k"] = ordered[args.group_k];
        write_json_file((out / "empirical_c.json").string(), doc);
        std::cout << "empirical C estimate: " << (est.infinite ? std::string("infinity")
                                                               : std::to_string(est.c))
                  << "\n";
        return 0;
    }

    throw_schema("bounds: pass --fixture, --random, --case, or --data");
}

// -------------------------------------------------------------- project ----

struct ProjectArgs {
    std::string grid_path;
    std::string conditional_path;
    std::string direction = "increasing";
    std::string out = default_out();
};

int cmd_project(const ProjectArgs& args) {
    ConfigTrace trace("project");
    trace.add("grid", args.grid_path);
    trace.add("conditional", args.conditional_path);
    trace.add("direction", args.direction);
    const std::string hash = trace.hash();
    const fs::path out = ensure_dir(args.out);

    const ScoreTable grid = read_score_table_csv(args.grid_path);
    const Direction dir =
        args.direction == "decreasing" ? Direction::Decreasing : Direction::Increasing;
    const ScoreTable projected = project_table(grid, dir);
    {
        std::ostringstream os;
        os << "# config_hash=" << hash << '\n';
        write_score_table_csv(projected, os);
        write_text_file((out / "projected_grid.csv").string(), os.str());
    }

    ojson doc;
    doc["config_hash"] = hash;
    doc["direction"] = args.direction;
    if (!args.conditional_path.empty()) {
        const auto conditional = read_score_table_csv(args.conditional_path).scores;
        doc["max_one_sided_parity_violation_before"] =
            max_one_sided_parity_scores(grid, conditional, nullptr);
        doc["max_one_sided_parity_violation_after"] =
            max_one_sided_parity_scores(projected, conditional, nullptr);
        doc["average_violation_before"] = average_violation_rf(grid, conditional);
        doc["average_violation_after"] = average_violation_rf(projected, conditional);
    }
    write_json_file((out / "projection_report.json").string(), doc);
    std::cout << "projected grid: " << (out / "projected_grid.csv").string() << "\n";
    return 0;
}

// ---------------------------------------------------------- export-plots ----

struct ExportArgs {
    DataArgs data;
    std::string model_path;
    std::string pair;       // "feature_a,feature_b" for the 2-d grid
    int bins = 10;
    std::uint64_t seed = 0;
    std::string out = default_out();
};

int cmd_export_plots(const ExportArgs& args) {
    ConfigTrace trace("export-plots");
    trace.add("model", args.model_path);
    trace.add("data", args.data.data_path);
    trace.add("pair", args.pair);
    trace.add("bins", args.bins);
    trace.add("seed", args.seed);
    const std::string hash = trace.hash();
    const fs::path out = ensure_dir(args.out);

    const GamModel model = load_model(args.model_path);
    const std::string stamp = "seed=" + std::to_string(args.seed) + " config_hash=" + hash;

    // (a) calibrator curves sampled at their keypoints.
    {
        std::ostringstream os;
        os.precision(17);
        os << "# " << stamp << "\nfeature,key,value\n";
        for (std::size_t d = 0; d < model.calibrators.size(); ++d) {
            const auto& c = model.calibrators[d];
            for (std::size_t i = 0; i < c.size(); ++i) {
                os << model.feature_names[d] << ',' << c.keys[i] << ',' << c.values[i] << '\n';
            }
        }
        write_text_file((out / "calibrators.csv").string(), os.str());
    }

    if (args.data.data_path.empty()) {
        std::cout << "calibrator curves written (no --data: skipping grid and label means)\n";
        return 0;
    }
    const Dataset ds = args.data.load();
    const auto mapping = feature_mapping(model, ds);

    // (b) 2-d prediction grid over two features' keypoints, other features
    // held at their dataset median.
    {
        std::size_t fa = 0;
        std::size_t fb = model.calibrators.size() > 1 ? 1 : 0;
        if (!args.pair.empty()) {
            const auto comma = args.pair.find(',');
            if (comma == std::string::npos) throw_schema("--pair wants 'featureA,featureB'");
            fa = model.feature_index(args.pair.substr(0, comma));
            fb = model.feature_index(args.pair.substr(comma + 1));
        }
        std::vector<double> base(model.calibrators.size());
        for (std::size_t d = 0; d < base.size(); ++d) {
            std::vector<double> col = ds.values[mapping[d]];
            std::nth_element(col.begin(), col.begin() + col.size() / 2, col.end());
            base[d] = col[col.size() / 2];
        }
        ScoreTable grid;
        grid.z_values = model.calibrators[fb].keys;
        for (double ka : model.calibrators[fa].keys) {
            std::ostringstream id;
            id.precision(17);
            id << ka;
            grid.x_cells.push_back(id.str());
            std::vector<double> row;
            std::vector<double> probe = base;
            probe[fa] = ka;
            for (double kb : model.calibrators[fb].keys) {
                probe[fb] = kb;
                row.push_back(predict_score(model, probe));
            }
            grid.scores.push_back(std::move(row));
        }
        std::ostringstream os;
        os << "# " << stamp << " rows=" << model.feature_names[fa]
           << " cols=" << model.feature_names[fb] << '\n';
        write_score_table_csv(grid, os);
        write_text_file((out / "prediction_grid.csv").string(), os.str());
    }

    // (c) per-bin label means with standard errors, per feature.
    {
        std::ostringstream os;
        os.precision(17);
        os << "# " << stamp << "\nfeature,bin_lo,bin_hi,mean_label,stderr,count\n";
        for (std::size_t d = 0; d < model.calibrators.size(); ++d) {
            const auto& col = ds.values[mapping[d]];
            const auto [mn_it, mx_it] = std::minmax_element(col.begin(), col.end());
            const double mn = *mn_it;
            const double mx = *mx_it;
            const int nbins = std::max(1, args.bins);
            const double width = mx > mn ? (mx - mn) / nbins : 1.0;
            std::vector<double> sum(nbins, 0.0);
            std::vector<std::size_t> count(nbins, 0);
            for (std::size_t r = 0; r < ds.rows(); ++r) {
                auto b = static_cast<int>((col[r] - mn) / width);
                b = std::clamp(b, 0, nbins - 1);
                sum[b] += ds.labels[r];
                count[b] += 1;
            }
            for (int b = 0; b < nbins; ++b) {
                if (count[b] == 0) continue;
                const double mean = sum[b] / static_cast<double>(count[b]);
                const double se = count[b] > 1
                    ? std::sqrt(mean * (1.0 - mean) / static_cast<double>(count[b] - 1))
                    : 0.0;
                os << model.feature_names[d] << ',' << mn + b * width << ','
                   << mn + (b + 1) * width << ',' << mean << ',' << se << ',' << count[b] << '\n';
            }
        }
        write_text_file((out / "label_means.csv").string(), os.str());
    }

    std::cout << "plot data written to " << out.string() << "\n";
    return 0;
}

// ------------------------------------------------------------- fixtures ----

int cmd_fixtures(const std::string& out_dir) {
    // The case files are canonical data (also shipped under data/fixtures/),
    // so only the expectations file carries the config hash.
    const fs::path out = ensure_dir(out_dir);
    ojson expected;
    expected["config_hash"] = ConfigTrace("fixtures").hash();
    for (const auto& fixture : all_fixtures()) {
        write_case_json(fixture.data, (out / (fixture.name + ".json")).string());
        ojson item;
        item["note"] = fixture.note;
        for (const auto& [k, v] : fixture.expected) item[k] = v;
        expected[fixture.name] = std::move(item);
    }
    write_json_file((out / "fixtures_expected.json").string(), expected);
    std::cout << "fixtures written to " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"monotone shape-constrained GAM training and fairness analysis"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train a GAM under monotonicity constraints");
    train_cmd->add_option("--data", train_args.data.data_path, "CSV data file")->required();
    train_cmd->add_option("--schema", train_args.data.schema_path, "JSON schema file")->required();
    train_cmd->add_option("--protected", train_args.data.protected_override,
                          "protected column (overrides schema)");
    train_cmd->add_option("--seed", train_args.seed, "split/shuffle seed");
    train_cmd->add_option("--epochs", train_args.epochs, "training epochs");
    train_cmd->add_option("--batch", train_args.batch, "minibatch size");
    train_cmd->add_option("--threshold", train_args.threshold, "decision threshold");
    train_cmd->add_option("--lr-grid", train_args.lr_grid, "comma-separated learning rates");
    train_cmd->add_flag("--track-loss", train_args.track_loss, "record per-epoch training loss");
    train_cmd->add_option("--out", train_args.out, "output directory");

    AuditArgs audit_args;
    auto* audit_cmd = app.add_subcommand("audit", "fairness metrics and monotonicity audit");
    audit_cmd->add_option("--model", audit_args.model_path, "trained model file");
    audit_cmd->add_option("--grid", audit_args.grid_path, "imported prediction grid CSV");
    audit_cmd->add_option("--case", audit_args.case_path, "discrete case JSON");
    audit_cmd->add_option("--conditional", audit_args.conditional_path,
                          "P(X=x|Z=z) grid CSV for grid metrics");
    audit_cmd->add_option("--data", audit_args.data.data_path, "CSV data file");
    audit_cmd->add_option("--schema", audit_args.data.schema_path, "JSON schema file");
    audit_cmd->add_option("--protected", audit_args.data.protected_override,
                          "protected column (overrides schema)");
    audit_cmd->add_option("--seed", audit_args.seed, "split seed used at training time");
    audit_cmd->add_option("--threshold", audit_args.threshold, "decision threshold");
    audit_cmd->add_option("--direction", audit_args.direction, "ascending|descending group order")
        ->check(CLI::IsMember({"ascending", "descending"}));
    audit_cmd->add_option("--out", audit_args.out, "output directory");

    BoundsArgs bounds_args;
    auto* bounds_cmd = app.add_subcommand("bounds", "lemma verification and density-ratio bounds");
    bounds_cmd->add_option("--case", bounds_args.case_path, "discrete case JSON");
    bounds_cmd->add_option("--fixture", bounds_args.fixture, "b1|b2|b3|all");
    bounds_cmd->add_option("--random", bounds_args.random_cases, "number of random cases");
    bounds_cmd->add_option("--seed", bounds_args.seed, "random-case seed");
    bounds_cmd->add_option("--j", bounds_args.group_j, "group index j");
    bounds_cmd->add_option("--k", bounds_args.group_k, "group index k");
    bounds_cmd->add_option("--lemma", bounds_args.lemma, "1|3|4|all")
        ->check(CLI::IsMember({"1", "3", "4", "all"}));
    bounds_cmd->add_option("--data", bounds_args.data.data_path, "CSV data for empirical C");
    bounds_cmd->add_option("--schema", bounds_args.data.schema_path, "JSON schema file");
    bounds_cmd->add_option("--protected", bounds_args.data.protected_override,
                           "protected column (overrides schema)");
    bounds_cmd->add_option("--bins", bounds_args.bins, "feature bins for empirical C");
    bounds_cmd->add_option("--eps", bounds_args.epsilon, "additive smoothing for empirical C");
    bounds_cmd->add_option("--out", bounds_args.out, "output directory");

    ProjectArgs project_args;
    auto* project_cmd = app.add_subcommand("project", "monotone projection of a score grid");
    project_cmd->add_option("--grid", project_args.grid_path, "score grid CSV")->required();
    project_cmd->add_option("--conditional", project_args.conditional_path,
                            "P(X=x|Z=z) grid CSV for before/after metrics");
    project_cmd->add_option("--direction", project_args.direction, "increasing|decreasing")
        ->check(CLI::IsMember({"increasing", "decreasing"}));
    project_cmd->add_option("--out", project_args.out, "output directory");

    ExportArgs export_args;
    auto* export_cmd = app.add_subcommand("export-plots", "plot-data CSV export");
    export_cmd->add_option("--model", export_args.model_path, "trained model file")->required();
    export_cmd->add_option("--data", export_args.data.data_path, "CSV data file");
    export_cmd->add_option("--schema", export_args.data.schema_path, "JSON schema file");
    export_cmd->add_option("--protected", export_args.data.protected_override,
                           "protected column (overrides schema)");
    export_cmd->add_option("--pair", export_args.pair, "two features for the 2-d grid: a,b");
    export_cmd->add_option("--bins", export_args.bins, "bins for label means");
    export_cmd->add_option("--seed", export_args.seed, "stamped into outputs");
    export_cmd->add_option("--out", export_args.out, "output directory");

    std::string fixtures_out = default_out();
    auto* fixtures_cmd = app.add_subcommand("fixtures", "write bundled counterexample cases");
    fixtures_cmd->add_option("--out", fixtures_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return cmd_train(train_args);
        if (audit_cmd->parsed()) return cmd_audit(audit_args);
        if (bounds_cmd->parsed()) return cmd_bounds(bounds_args);
        if (project_cmd->parsed()) return cmd_project(project_args);
        if (export_cmd->parsed()) return cmd_export_plots(export_args);
        if (fixtures_cmd->parsed()) return cmd_fixtures(fixtures_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
