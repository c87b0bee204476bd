#include "horses/detail/piecewise.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace horses::detail {

namespace {

// Value of wall_weight * sum_i |b - sorted_walls[i]| using prefix sums:
// with m walls at or below b, the sum is
// b*(m - (W-m)) - (prefix[m] - (total - prefix[m])).
double wall_term(const std::vector<double>& sorted_walls, const std::vector<double>& prefix,
                 double wall_weight, double b) {
    if (sorted_walls.empty() || wall_weight == 0.0) return 0.0;
    const auto it = std::upper_bound(sorted_walls.begin(), sorted_walls.end(), b);
    const auto m = static_cast<size_t>(it - sorted_walls.begin());
    const double total = prefix.back();
    const double below = m > 0 ? prefix[m - 1] : 0.0;
    const double w = static_cast<double>(sorted_walls.size());
    const double sum = b * (2.0 * static_cast<double>(m) - w) - (2.0 * below - total);
    return wall_weight * sum;
}

} // namespace

double piecewise_value(double quad, double lin, double weight_zero,
                       const std::vector<double>& walls, double wall_weight, double b) {
    double v = 0.5 * quad * b * b - lin * b + weight_zero * std::abs(b);
    for (double w : walls) v += wall_weight * std::abs(b - w);
    return v;
}

PiecewiseMin minimize_piecewise(double quad, double lin, double weight_zero,
                                const std::vector<double>& walls, double wall_weight) {
    std::vector<double> sorted_walls = walls;
    std::sort(sorted_walls.begin(), sorted_walls.end());
    std::vector<double> prefix(sorted_walls.size());
    double acc = 0.0;
    for (size_t i = 0; i < sorted_walls.size(); ++i) {
        acc += sorted_walls[i];
        prefix[i] = acc;
    }

    // Breakpoints: {0} plus the walls. Exact deduplication keeps every
    // interval's sign pattern constant and rules out zero-width intervals.
    std::vector<double> breaks;
    breaks.reserve(sorted_walls.size() + 1);
    {
        std::vector<double> merged = sorted_walls;
        merged.insert(std::lower_bound(merged.begin(), merged.end(), 0.0), 0.0);
        for (double b : merged)
            if (breaks.empty() || b != breaks.back()) breaks.push_back(b);
    }

    const auto eval = [&](double b) {
        return 0.5 * quad * b * b - lin * b + weight_zero * std::abs(b) +
               wall_term(sorted_walls, prefix, wall_weight, b);
    };

    // Walk intervals in ascending order looking for an interior stationary
    // point; convexity of q admits at most one.
    if (quad > 0.0) {
        const auto w_count = sorted_walls.size();
        size_t walls_at_or_below = 0;
        for (size_t i = 0; i <= breaks.size(); ++i) {
            const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : breaks[i - 1];
            const double hi =
                i == breaks.size() ? std::numeric_limits<double>::infinity() : breaks[i];
            if (i > 0)
                while (walls_at_or_below < w_count && sorted_walls[walls_at_or_below] <= lo)
                    ++walls_at_or_below;

            // Sign pattern on the interval interior: walls at or below lo lie
            // below, all others above; likewise for the |b| kink at 0.
            double sign_zero;
            double wall_sign_sum;
            if (i == 0) {
                sign_zero = -1.0;
                wall_sign_sum = -static_cast<double>(w_count);
            } else {
                sign_zero = lo >= 0.0 ? 1.0 : -1.0;
                wall_sign_sum = 2.0 * static_cast<double>(walls_at_or_below) -
                                static_cast<double>(w_count);
            }

            const double cand =
                (lin - weight_zero * sign_zero - wall_weight * wall_sign_sum) / quad;
            if (cand > lo && cand < hi) return PiecewiseMin{cand, eval(cand), true};
        }
    }

    // No interior stationary point: the minimum sits on a breakpoint.
    // Ties break toward 0, then toward smaller magnitude, then smaller value.
    double best_b = breaks.front();
    double best_v = eval(best_b);
    for (size_t i = 1; i < breaks.size(); ++i) {
        const double b = breaks[i];
        const double v = eval(b);
        if (v < best_v) {
            best_v = v;
            best_b = b;
        } else if (v == best_v) {
            const bool prefer = (b == 0.0 && best_b != 0.0) ||
                                (best_b != 0.0 && std::abs(b) < std::abs(best_b)) ||
                                (best_b != 0.0 && std::abs(b) == std::abs(best_b) && b < best_b);
            if (prefer) best_b = b;
        }
    }
    return PiecewiseMin{best_b, best_v, false};
}

} // namespace horses::detail
