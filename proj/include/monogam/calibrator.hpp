#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace monogam {

enum class Monotonicity { None, Increasing, Decreasing };

std::string to_string(Monotonicity m);
Monotonicity monotonicity_from_string(const std::string& s);

// One-dimensional piecewise-linear curve through strictly increasing keys.
// Evaluation clamps to the boundary values outside the key range, so a curve
// whose values satisfy the monotonicity tag is monotone on all of R.
struct CalibratorCurve {
    std::vector<double> keys;     // strictly increasing
    std::vector<double> values;   // same length
    Monotonicity monotonicity = Monotonicity::None;

    std::size_t size() const { return keys.size(); }
    void validate() const;
};

// Linear interpolation between the bracketing keys; evaluation at a stored
// key returns its stored value exactly. NaN input is rejected.
double eval(const CalibratorCurve& curve, double x);

// d eval / d values[j]: non-zero only for the bracketing pair (or one
// boundary key when clamped / on a key). w_lo + w_hi == 1.
struct InterpWeights {
    std::size_t lo = 0;
    std::size_t hi = 0;
    double w_lo = 0.0;
    double w_hi = 0.0;
};
InterpWeights grad_values(const CalibratorCurve& curve, double x);

// Max directed decrease across adjacent keypoints; 0 iff the tag is
// satisfied (always 0 for Monotonicity::None).
double check_monotone(const CalibratorCurve& curve);

// Replace values with their PAV projection in the tagged direction.
// No-op for Monotonicity::None.
void project_monotone(CalibratorCurve& curve);

}  // namespace monogam
