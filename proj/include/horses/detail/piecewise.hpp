#pragma once

#include <vector>

namespace horses::detail {

/// Exact minimizer of the one-dimensional convex function
///
///   q(b) = 0.5 * quad * b^2 - lin * b + weight_zero * |b|
///          + wall_weight * sum_i |b - walls[i]|
///
/// with quad >= 0 and nonnegative penalty weights. The derivative is
/// piecewise linear with breaks at 0 and the wall positions; the minimizer is
/// either an interior stationary point of one interval or one of the breaks.
struct PiecewiseMin {
    double argmin = 0.0;
    double value = 0.0;
    bool interior = false; // found as a stationary point strictly inside an interval
};

PiecewiseMin minimize_piecewise(double quad, double lin, double weight_zero,
                                const std::vector<double>& walls, double wall_weight);

/// q evaluated at b (same function as minimize_piecewise optimizes).
double piecewise_value(double quad, double lin, double weight_zero,
                       const std::vector<double>& walls, double wall_weight, double b);

} // namespace horses::detail
