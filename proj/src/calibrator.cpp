#include "monogam/calibrator.hpp"

#include <algorithm>
#include <cmath>

#include "monogam/error.hpp"
#include "monogam/isotonic.hpp"

namespace monogam {

std::string to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::None: return "none";
        case Monotonicity::Increasing: return "increasing";
        case Monotonicity::Decreasing: return "decreasing";
    }
    return "none";
}

Monotonicity monotonicity_from_string(const std::string& s) {
    if (s == "none") return Monotonicity::None;
    if (s == "increasing") return Monotonicity::Increasing;
    if (s == "decreasing") return Monotonicity::Decreasing;
    throw_schema("unknown monotonicity '" + s + "' (expected none/increasing/decreasing)");
}

void CalibratorCurve::validate() const {
    if (keys.empty() || keys.size() != values.size()) {
        throw_numeric("calibrator: keys/values size mismatch");
    }
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if (!(keys[i - 1] < keys[i])) {
            throw_numeric("calibrator: keys must be strictly increasing");
        }
    }
}

namespace {

// Index of the bracket [keys[i], keys[i+1]) containing x, assuming
// keys.front() <= x <= keys.back().
std::size_t bracket(const std::vector<double>& keys, double x) {
    auto it = std::upper_bound(keys.begin(), keys.end(), x);
    std::size_t i = static_cast<std::size_t>(it - keys.begin());
    if (i == 0) return 0;
    return std::min(i - 1, keys.size() - 2);
}

}  // namespace

double eval(const CalibratorCurve& curve, double x) {
    if (std::isnan(x)) throw_numeric("calibrator eval: NaN input");
    const auto& k = curve.keys;
    const auto& v = curve.values;
    if (x <= k.front()) return v.front();
    if (x >= k.back()) return v.back();
    const std::size_t i = bracket(k, x);
    if (x == k[i]) return v[i];
    // v_lo + t * (v_hi - v_lo) keeps interpolation monotone in floating
    // point whenever the values are ordered.
    const double t = (x - k[i]) / (k[i + 1] - k[i]);
    return v[i] + t * (v[i + 1] - v[i]);
}

InterpWeights grad_values(const CalibratorCurve& curve, double x) {
    if (std::isnan(x)) throw_numeric("calibrator grad: NaN input");
    const auto& k = curve.keys;
    if (x <= k.front()) return {0, 0, 1.0, 0.0};
    if (x >= k.back()) {
        const std::size_t last = k.size() - 1;
        return {last, last, 1.0, 0.0};
    }
    const std::size_t i = bracket(k, x);
    if (x == k[i]) return {i, i, 1.0, 0.0};
    const double t = (x - k[i]) / (k[i + 1] - k[i]);
    return {i, i + 1, 1.0 - t, t};
}

double check_monotone(const CalibratorCurve& curve) {
    if (curve.monotonicity == Monotonicity::None) return 0.0;
    double worst = 0.0;
    const auto& v = curve.values;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double step = curve.monotonicity == Monotonicity::Increasing
                                ? v[i] - v[i + 1]
                                : v[i + 1] - v[i];
        worst = std::max(worst, step);
    }
    return worst;
}

void project_monotone(CalibratorCurve& curve) {
    if (curve.monotonicity == Monotonicity::None) return;
    if (curve.monotonicity == Monotonicity::Increasing) {
        curve.values = pav(curve.values);
    } else {
        std::reverse(curve.values.begin(), curve.values.end());
        curve.values = pav(curve.values);
        std::reverse(curve.values.begin(), curve.values.end());
    }
}

}  // namespace monogam
