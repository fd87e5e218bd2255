#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "monogam/dataset.hpp"
#include "monogam/rng.hpp"

namespace testutil {

// Scratch directory wiped per construction, unique per tag.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("monogam_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
    return path.string();
}

// label = 1 iff the single feature exceeds the median of its uniform range,
// with optional label noise.
inline monogam::Dataset threshold_dataset(std::size_t rows, std::uint64_t seed,
                                          double noise = 0.0,
                                          monogam::Monotonicity tag = monogam::Monotonicity::Increasing) {
    monogam::Dataset ds;
    monogam::ColumnSpec col;
    col.name = "x";
    col.kind = monogam::ColumnKind::Numeric;
    col.monotonicity = tag;
    col.keypoint_count = 10;
    ds.columns.push_back(col);
    ds.values.emplace_back();
    monogam::rng::Engine g(seed);
    for (std::size_t r = 0; r < rows; ++r) {
        const double x = monogam::rng::unit(g);
        int y = x > 0.5 ? 1 : 0;
        if (noise > 0.0 && monogam::rng::unit(g) < noise) y = 1 - y;
        ds.values[0].push_back(x);
        ds.labels.push_back(y);
    }
    return ds;
}

}  // namespace testutil
