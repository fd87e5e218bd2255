#include "monogam/report.hpp"

#include <fstream>
#include <sstream>

#include "monogam/error.hpp"

namespace monogam {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& s) {
    std::ostringstream os;
    os << std::hex << fnv1a64(s);
    return os.str();
}

ojson to_json(const TrainReport& report) {
    ojson doc;
    ojson rates = ojson::array();
    for (const auto& r : report.rates) {
        rates.push_back({{"learning_rate", r.learning_rate},
                         {"validation_accuracy", r.validation_accuracy}});
    }
    doc["rates"] = std::move(rates);
    doc["chosen_rate"] = report.chosen_rate;
    doc["validation_accuracy"] = report.validation_accuracy;
    doc["grid_edge_warning"] = report.grid_edge_warning;
    if (!report.epoch_losses.empty()) doc["epoch_losses"] = report.epoch_losses;
    return doc;
}

ojson to_json(const BoundReport& report) {
    ojson doc;
    doc["lemma"] = report.lemma;
    doc["observed"] = report.observed_value;
    doc["bound"] = report.bound_value;
    doc["satisfied"] = report.satisfied;
    doc["witness_x"] = report.witness;
    ojson details;
    for (const auto& [k, v] : report.details) details[k] = v;
    doc["details"] = std::move(details);
    return doc;
}

namespace {

ojson pairs_to_json(const std::vector<PairViolation>& pairs, const std::vector<double>& groups) {
    ojson arr = ojson::array();
    for (const auto& p : pairs) {
        arr.push_back({{"z_j", groups[p.j]}, {"z_k", groups[p.k]}, {"violation", p.value}});
    }
    return arr;
}

}  // namespace

ojson to_json(const FairnessReport& report) {
    ojson doc;
    doc["groups"] = report.group_values;
    doc["group_sizes"] = report.group_sizes;
    doc["positive_rates"] = report.positive_rates;
    doc["score_means"] = report.score_means;
    doc["max_one_sided_parity_violation"] = report.max_parity;
    doc["parity_pairs"] = pairs_to_json(report.parity_pairs, report.group_values);
    if (report.eqopp_valid) {
        doc["max_one_sided_equal_opportunity_violation"] = report.max_eqopp;
        doc["equal_opportunity_pairs"] = pairs_to_json(report.eqopp_pairs, report.group_values);
    } else {
        doc["equal_opportunity_note"] = report.eqopp_note;
    }
    doc["average_violation"] = report.average_violation;
    doc["audited_columns"] = report.audited_columns;
    ojson audit = ojson::array();
    for (const auto& v : report.audit) {
        audit.push_back({{"column", v.column},
                         {"probe", v.probe},
                         {"at", v.at},
                         {"delta", v.delta},
                         {"drop", v.drop}});
    }
    doc["monotonicity_violations"] = std::move(audit);
    doc["monotonicity_violation_count"] = report.audit.size();
    return doc;
}

ojson to_json(const EmpiricalC& est) {
    ojson doc;
    if (est.infinite) {
        doc["C"] = "infinity";
        doc["absolute_continuity_warning"] = true;
    } else {
        doc["C"] = est.c;
        doc["absolute_continuity_warning"] = false;
    }
    doc["epsilon"] = est.epsilon;
    doc["bins_used"] = est.bins_used;
    doc["bin_ratios"] = est.bin_ratios;
    return doc;
}

std::string fairness_report_csv(const FairnessReport& report,
                                const std::string& header_comment) {
    std::ostringstream os;
    os.precision(17);
    if (!header_comment.empty()) os << "# " << header_comment << '\n';
    os << "pair,metric,value\n";
    auto z = [&](std::size_t i) { return report.group_values[i]; };
    for (const auto& p : report.parity_pairs) {
        os << z(p.j) << '<' << z(p.k) << ",one_sided_parity_violation," << p.value << '\n';
    }
    for (const auto& p : report.eqopp_pairs) {
        os << z(p.j) << '<' << z(p.k) << ",one_sided_equal_opportunity_violation," << p.value
           << '\n';
    }
    os << ",max_one_sided_parity_violation," << report.max_parity << '\n';
    if (report.eqopp_valid) {
        os << ",max_one_sided_equal_opportunity_violation," << report.max_eqopp << '\n';
    }
    os << ",average_violation," << report.average_violation << '\n';
    os << ",monotonicity_violation_count," << report.audit.size() << '\n';
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw_io("cannot write file: " + path);
    out << content;
    if (!out) throw_io("write failed: " + path);
}

void write_json_file(const std::string& path, const ojson& doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace monogam
