#pragma once

#include "tcage/curves.hpp"

#include <span>
#include <vector>

namespace tcage {

enum class SmoothKernel { Tricube, Uniform };

struct SmoothConfig {
    double span = 0.15;        ///< fraction of points in each local window, (0, 1]
    int degree = 1;            ///< local polynomial degree, 1 or 2
    double confidence = 0.95;  ///< pointwise band level, (0, 1)
    SmoothKernel kernel = SmoothKernel::Tricube;
};

struct SmoothedPoint {
    double age_days = 0.0;
    double fitted = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct SmoothedCurve {
    std::vector<SmoothedPoint> points;
    double sigma = 0.0;       ///< sqrt of the mean squared residual
    std::size_t window = 0;   ///< points per local fit
    double z = 0.0;           ///< normal quantile used for the band
};

/// max(degree + 2, ceil(span * n)), capped at n.
std::size_t loess_window_size(std::size_t n, const SmoothConfig& config);

/// Local polynomial regression evaluated at every input x. `x` must be sorted
/// ascending. Each fit uses the `window` nearest points (ties resolved toward
/// smaller x), tricube weights scaled by the largest distance in the window,
/// and a rank-revealing least-squares solve so that degenerate windows fall
/// back to the minimum-norm local fit. The band is
/// fitted +- z * sigma * ||l(x0)||, with l the equivalent-kernel weights.
SmoothedCurve loess(std::span<const double> x, std::span<const double> y, const SmoothConfig& config = {});

/// Smooths the supported points of a rate series (x = age, y = rate).
SmoothedCurve smooth(const RateSeries& series, const SmoothConfig& config = {});

}  // namespace tcage
