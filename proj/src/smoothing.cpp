#include "tcage/smoothing.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace tcage {

namespace {

void check_config(const SmoothConfig& config) {
    if (!(config.span > 0.0 && config.span <= 1.0)) throw ModelError("smoothing span must lie in (0, 1]");
    if (config.degree != 1 && config.degree != 2) throw ModelError("local polynomial degree must be 1 or 2");
    if (!(config.confidence > 0.0 && config.confidence < 1.0)) throw ModelError("confidence must lie in (0, 1)");
}

/// Equivalent-kernel weights of the local fit at x[query] over [lo, hi].
Eigen::VectorXd local_weights(std::span<const double> x, std::size_t query, std::size_t lo, std::size_t hi,
                              const SmoothConfig& config) {
    const double x0 = x[query];
    const auto k = static_cast<Eigen::Index>(hi - lo + 1);
    double reach = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) reach = std::max(reach, std::abs(x[i] - x0));

    Eigen::VectorXd w(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        if (config.kernel == SmoothKernel::Uniform || reach == 0.0) {
            w(i) = 1.0;
        } else {
            const double u = std::abs(x[lo + static_cast<std::size_t>(i)] - x0) / reach;
            const double c = 1.0 - u * u * u;
            w(i) = c * c * c;
        }
    }

    if (reach == 0.0) return w / w.sum();

    const int p = config.degree + 1;
    Eigen::MatrixXd design(k, p);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double u = (x[lo + static_cast<std::size_t>(i)] - x0) / reach;
        const double sw = std::sqrt(w(i));
        double power = 1.0;
        for (int j = 0; j < p; ++j) {
            design(i, j) = sw * power;
            power *= u;
        }
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    const Eigen::MatrixXd pinv = cod.pseudoInverse();
    Eigen::VectorXd ell(k);
    for (Eigen::Index i = 0; i < k; ++i) ell(i) = pinv(0, i) * std::sqrt(w(i));
    return ell;
}

}  // namespace

std::size_t loess_window_size(std::size_t n, const SmoothConfig& config) {
    const auto by_span = static_cast<std::size_t>(std::ceil(config.span * static_cast<double>(n) - 1e-12));
    return std::min(n, std::max(static_cast<std::size_t>(config.degree) + 2, by_span));
}

SmoothedCurve loess(std::span<const double> x, std::span<const double> y, const SmoothConfig& config) {
    check_config(config);
    if (x.size() != y.size()) throw ModelError("x and y differ in length");
    const std::size_t n = x.size();
    const auto needed = static_cast<std::size_t>(config.degree) + 2;
    if (n < needed) throw ModelError(fmt::format("smoothing needs at least {} points, got {}", needed, n));
    if (!std::is_sorted(x.begin(), x.end())) throw ModelError("smoothing input must be sorted by x");

    SmoothedCurve curve;
    curve.window = loess_window_size(n, config);
    const boost::math::normal standard;
    curve.z = boost::math::quantile(standard, 1.0 - (1.0 - config.confidence) / 2.0);

    std::vector<double> fitted(n);
    std::vector<double> spread(n);
    for (std::size_t q = 0; q < n; ++q) {
        std::size_t lo = q;
        std::size_t hi = q;
        while (hi - lo + 1 < curve.window) {
            if (lo == 0) {
                ++hi;
            } else if (hi + 1 == n) {
                --lo;
            } else if (x[q] - x[lo - 1] <= x[hi + 1] - x[q]) {
                --lo;
            } else {
                ++hi;
            }
        }
        const Eigen::VectorXd ell = local_weights(x, q, lo, hi, config);
        double value = 0.0;
        for (Eigen::Index i = 0; i < ell.size(); ++i) value += ell(i) * y[lo + static_cast<std::size_t>(i)];
        fitted[q] = value;
        spread[q] = ell.norm();
    }

    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) rss += (y[i] - fitted[i]) * (y[i] - fitted[i]);
    curve.sigma = std::sqrt(rss / static_cast<double>(n));

    curve.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double half = curve.z * curve.sigma * spread[i];
        curve.points.push_back({x[i], fitted[i], fitted[i] - half, fitted[i] + half});
    }
    return curve;
}

SmoothedCurve smooth(const RateSeries& series, const SmoothConfig& config) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& p : series.points) {
        if (p.low_support) continue;
        x.push_back(static_cast<double>(p.age_days));
        y.push_back(p.rate);
    }
    return loess(x, y, config);
}

}  // namespace tcage
