#include "tcage/regfit.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tcage {

namespace {

constexpr double kMonthDays = 30.0;

double binomial(int n, int k) {
    double result = 1.0;
    for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
    return result;
}

void supported_xy(const RateSeries& series, std::vector<double>& x, std::vector<double>& y) {
    for (const auto& p : series.points) {
        if (p.low_support) continue;
        x.push_back(static_cast<double>(p.age_days));
        y.push_back(p.rate);
    }
}

}  // namespace

std::string FitModel::name() const {
    if (family == ModelFamily::Exponential) return "exponential";
    switch (degree) {
    case 1: return "linear";
    case 2: return "quadratic";
    case 3: return "cubic";
    default: return fmt::format("polynomial{}", degree);
    }
}

double student_t_two_sided_p(double t, double dof) {
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    const double x = dof / (dof + t * t);
    return boost::math::ibeta(dof / 2.0, 0.5, x);
}

FitModel fit_polynomial(std::span<const double> x, std::span<const double> y, int degree) {
    if (degree < 1 || degree > 3) throw ModelError("polynomial degree must be 1, 2 or 3");
    if (x.size() != y.size()) throw ModelError("x and y differ in length");
    const auto n = static_cast<Eigen::Index>(x.size());
    const int p = degree + 1;
    if (n <= p) throw ModelError(fmt::format("{} points are too few for a degree-{} fit", n, degree));

    double lo = *std::min_element(x.begin(), x.end());
    double hi = *std::max_element(x.begin(), x.end());
    const double centre = 0.5 * (lo + hi);
    const double scale = 0.5 * (hi - lo);
    if (!(scale > 0.0)) throw ModelError("rank-deficient design: all x values are equal");

    Eigen::MatrixXd design(n, p);
    Eigen::VectorXd response(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = (x[static_cast<std::size_t>(i)] - centre) / scale;
        double power = 1.0;
        for (int j = 0; j < p; ++j) {
            design(i, j) = power;
            power *= u;
        }
        response(i) = y[static_cast<std::size_t>(i)];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < p) throw ModelError(fmt::format("rank-deficient design (rank {} < {})", qr.rank(), p));
    const Eigen::VectorXd scaled_coef = qr.solve(response);
    const Eigen::VectorXd residuals = response - design * scaled_coef;
    const double rss = residuals.squaredNorm();
    const double dof = static_cast<double>(n - p);
    const double sigma2 = rss / dof;

    // (X'X)^-1 = P R^-1 R^-T P'
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd perm = qr.colsPermutation();
    const Eigen::MatrixXd scaled_cov = perm * (r_inv * r_inv.transpose()) * perm.transpose();

    // raw_m = sum_j b_j * C(j, m) * (-centre)^(j-m) / scale^j
    Eigen::MatrixXd to_raw = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) {
        for (int m = 0; m <= j; ++m) {
            to_raw(m, j) = binomial(j, m) * std::pow(-centre, j - m) / std::pow(scale, j);
        }
    }
    const Eigen::VectorXd raw_coef = to_raw * scaled_coef;
    const Eigen::MatrixXd raw_cov = sigma2 * to_raw * scaled_cov * to_raw.transpose();

    FitModel model;
    model.family = ModelFamily::Polynomial;
    model.degree = degree;
    model.n = static_cast<std::size_t>(n);
    model.rss = rss;
    model.residual_std_error = std::sqrt(sigma2);
    for (int j = 0; j < p; ++j) {
        CoefficientStat stat;
        stat.estimate = raw_coef(j);
        stat.std_error = std::sqrt(std::max(0.0, raw_cov(j, j)));
        if (stat.std_error > 0.0) {
            stat.t_value = stat.estimate / stat.std_error;
        } else {
            stat.t_value = stat.estimate == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), stat.estimate);
        }
        stat.p_value = stat.t_value == 0.0 && stat.std_error == 0.0 ? 1.0 : student_t_two_sided_p(stat.t_value, dof);
        model.coefficients.push_back(stat.estimate);
        model.coefficient_stats.push_back(stat);
    }
    return model;
}

FitModel fit_polynomial(const RateSeries& series, int degree) {
    std::vector<double> x, y;
    supported_xy(series, x, y);
    return fit_polynomial(x, y, degree);
}

FitModel fit_exponential(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ModelError("x and y differ in length");
    std::vector<double> px, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] > 0.0) {
            px.push_back(x[i]);
            ly.push_back(std::log(y[i]));
        }
    }
    if (px.size() < 3) {
        throw ModelError(fmt::format("exponential fit needs at least 3 positive rates, got {}", px.size()));
    }
    FitModel model = fit_polynomial(px, ly, 1);
    model.family = ModelFamily::Exponential;
    model.log_scale_residuals = true;
    model.excluded_points = x.size() - px.size();
    model.coefficients = {std::exp(model.coefficient_stats[0].estimate), model.coefficient_stats[1].estimate};
    return model;
}

FitModel fit_exponential(const RateSeries& series) {
    std::vector<double> x, y;
    supported_xy(series, x, y);
    return fit_exponential(x, y);
}

double predict(const FitModel& model, double t) {
    if (model.family == ModelFamily::Exponential) return model.coefficients[0] * std::exp(model.coefficients[1] * t);
    double value = 0.0;
    for (auto it = model.coefficients.rbegin(); it != model.coefficients.rend(); ++it) value = value * t + *it;
    return value;
}

std::optional<HalfLife> half_life(const FitModel& model, int grid_max) {
    const double initial = predict(model, 0.0);
    if (!(initial > 0.0)) throw ModelError("half-life needs a positive day-0 prediction");
    const double threshold = initial / 2.0;
    for (int d = 0; d <= grid_max; ++d) {
        const double value = std::max(0.0, predict(model, static_cast<double>(d)));
        if (value <= threshold) return HalfLife{d, d / kMonthDays, initial, grid_max};
    }
    return std::nullopt;
}

std::vector<ModelReport> fit_report(const RateSeries& series, const FitFamilies& families, int grid_max,
                                    double p_threshold) {
    std::vector<ModelReport> reports;
    auto add = [&](FitModel model) {
        ModelReport report;
        for (std::size_t j = 0; j < model.coefficient_stats.size(); ++j) {
            if (!(model.coefficient_stats[j].p_value < p_threshold)) report.insignificant.push_back(j);
        }
        if (predict(model, 0.0) > 0.0) report.half_life = half_life(model, grid_max);
        report.model = std::move(model);
        reports.push_back(std::move(report));
    };
    std::vector<int> degrees = families.degrees;
    std::sort(degrees.begin(), degrees.end());
    degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
    for (int degree : degrees) add(fit_polynomial(series, degree));
    if (families.exponential) add(fit_exponential(series));
    return reports;
}

}  // namespace tcage
