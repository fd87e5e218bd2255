#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "monogam/bounds.hpp"
#include "monogam/fairness.hpp"
#include "monogam/gam.hpp"

namespace monogam {

using ojson = nlohmann::ordered_json;

// FNV-1a, used for config hashes embedded in output artifacts.
std::uint64_t fnv1a64(const std::string& s);
std::string fnv1a64_hex(const std::string& s);

ojson to_json(const TrainReport& report);
ojson to_json(const BoundReport& report);
ojson to_json(const FairnessReport& report);
ojson to_json(const EmpiricalC& est);

// Flat (pair, metric, value) rows for plotting.
std::string fairness_report_csv(const FairnessReport& report,
                                const std::string& header_comment);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const ojson& doc);

}  // namespace monogam
