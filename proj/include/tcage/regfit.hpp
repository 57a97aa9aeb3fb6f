#pragma once

#include "tcage/curves.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tcage {

enum class ModelFamily { Polynomial, Exponential };

struct CoefficientStat {
    double estimate = 0.0;
    double std_error = 0.0;
    double t_value = 0.0;
    double p_value = 1.0;  ///< two-sided, t distribution with n - p df
};

/// Fitted failure-rate model. Polynomial coefficients are in the raw age basis,
/// constant term first (rate as a fraction per day^k). Exponential models
/// f(t) = a * exp(b * t) store {a, b}; their statistics and residual error
/// refer to the log-linear fit of ln(rate) = ln(a) + b * t.
struct FitModel {
    ModelFamily family = ModelFamily::Polynomial;
    int degree = 1;
    std::vector<double> coefficients;
    std::size_t n = 0;
    double rss = 0.0;
    double residual_std_error = 0.0;
    bool log_scale_residuals = false;
    std::vector<CoefficientStat> coefficient_stats;
    std::size_t excluded_points = 0;  ///< non-positive rates skipped by the exponential fit

    std::string name() const;
};

/// Ordinary least squares on a centred and scaled age axis using a
/// column-pivoted Householder QR; coefficients and their covariance are mapped
/// back to the raw basis. Throws ModelError for n <= degree + 1 or a
/// rank-deficient design.
FitModel fit_polynomial(std::span<const double> x, std::span<const double> y, int degree);
FitModel fit_polynomial(const RateSeries& series, int degree);

/// Log-linear least squares on the strictly positive points.
FitModel fit_exponential(std::span<const double> x, std::span<const double> y);
FitModel fit_exponential(const RateSeries& series);

double predict(const FitModel& model, double t);

/// Two-sided p-value of a t statistic with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

struct HalfLife {
    int days = 0;
    double months = 0.0;  ///< days / 30
    double initial_rate = 0.0;
    int grid_max = 0;
};

/// Smallest whole day d in [0, grid_max] whose prediction (clamped at zero)
/// is at most half the day-0 prediction. nullopt when the grid never gets
/// there. Throws ModelError when the day-0 prediction is not positive.
std::optional<HalfLife> half_life(const FitModel& model, int grid_max);

struct FitFamilies {
    std::vector<int> degrees{1, 2};
    bool exponential = false;
};

struct ModelReport {
    FitModel model;
    std::optional<HalfLife> half_life;
    std::vector<std::size_t> insignificant;  ///< coefficient indices with p >= threshold
};

std::vector<ModelReport> fit_report(const RateSeries& series, const FitFamilies& families, int grid_max = 3650,
                                    double p_threshold = 1e-10);

}  // namespace tcage
