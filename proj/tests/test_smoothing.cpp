#include "tcage/smoothing.hpp"

#include "tcage/regfit.hpp"

#include "support/property.hpp"

#include <doctest.h>

#include <cmath>

using namespace tcage;
using tcage::testing::require;

namespace {

std::vector<double> fitted(const SmoothedCurve& c) {
    std::vector<double> out;
    for (const auto& p : c.points) out.push_back(p.fitted);
    return out;
}

std::vector<double> random_ages(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> step(1, 4);
    std::vector<double> x;
    double v = std::uniform_int_distribution<int>(0, 5)(rng);
    for (std::size_t i = 0; i < n; ++i) {
        x.push_back(v);
        v += step(rng);
    }
    return x;
}

}  // namespace

TEST_CASE("window size") {
    SmoothConfig c;
    CHECK(loess_window_size(100, c) == 15);
    CHECK(loess_window_size(10, c) == 3);
    c.degree = 2;
    CHECK(loess_window_size(10, c) == 4);
    c.span = 1.0;
    CHECK(loess_window_size(10, c) == 10);
}

TEST_CASE("a straight line is reproduced") {
    std::vector<double> x, y;
    for (int i = 0; i < 60; ++i) {
        x.push_back(i * 2.0);
        y.push_back(0.3 - 0.002 * i * 2.0);
    }
    for (double span : {0.1, 0.3, 1.0}) {
        SmoothConfig c;
        c.span = span;
        const auto curve = loess(x, y, c);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(curve.points[i].fitted - y[i]) < 1e-9);
    }
}

TEST_CASE("a constant series has a zero-width band") {
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) {
        x.push_back(i);
        y.push_back(0.25);
    }
    const auto curve = loess(x, y);
    CHECK(curve.sigma < 1e-12);
    for (const auto& p : curve.points) {
        CHECK(p.fitted == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(p.ci_high - p.ci_low < 1e-12);
    }
}

TEST_CASE("hand-solved local fits") {
    SmoothConfig c;
    c.span = 1.0;
    c.degree = 1;

    SUBCASE("three points: the end points sit at the window radius and get zero weight") {
        // Weights (0, 1, 0): the weighted normal equations [[1, 0], [0, 0]] (x centred at 1)
        // have the minimum-norm solution intercept = 1, slope = 0.
        const std::vector<double> x{0, 1, 2};
        const std::vector<double> y{0, 1, 0};
        const auto curve = loess(x, y, c);
        CHECK(curve.points[1].fitted == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("four points: 2x2 weighted normal equations") {
        const std::vector<double> x{0, 1, 2, 3};
        const std::vector<double> y{0, 1, 0, 3};
        // query x0 = 1: distances 1, 0, 1, 2; radius 2; tricube weights
        const double side = std::pow(1.0 - std::pow(0.5, 3), 3);
        const double w[] = {side, 1.0, side, 0.0};
        double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
        for (int i = 0; i < 4; ++i) {
            s0 += w[i];
            s1 += w[i] * x[i];
            s2 += w[i] * x[i] * x[i];
            t0 += w[i] * y[i];
            t1 += w[i] * x[i] * y[i];
        }
        const double det = s0 * s2 - s1 * s1;
        const double intercept = (s2 * t0 - s1 * t1) / det;
        const double slope = (s0 * t1 - s1 * t0) / det;
        const auto curve = loess(x, y, c);
        CHECK(curve.points[1].fitted == doctest::Approx(intercept + slope * 1.0).epsilon(1e-12));
    }
}

TEST_CASE("nearest-neighbour ties prefer the smaller age") {
    // Window of 3 around x = 2 in {0, 1, 2, 3, 4}: distances tie at 1 and 1, then 2 vs 2.
    // With degree 1 and span 0.6 (k = 3), the window is {1, 2, 3}; with k = 4 it is {0, 1, 2, 3}.
    const std::vector<double> x{0, 1, 2, 3, 4};
    const std::vector<double> y{10, 0, 0, 0, -10};
    SmoothConfig c;
    c.kernel = SmoothKernel::Uniform;
    c.span = 0.8;  // k = 4
    const auto curve = loess(x, y, c);
    // uniform OLS line through (0,10),(1,0),(2,0),(3,0) evaluated at 2
    const double mean_x = 1.5, mean_y = 2.5;
    const double sxy = (0 - 1.5) * (10 - 2.5) + (1 - 1.5) * (0 - 2.5) + (2 - 1.5) * (0 - 2.5) + (3 - 1.5) * (0 - 2.5);
    const double sxx = 2.25 + 0.25 + 0.25 + 2.25;
    const double expected = mean_y + sxy / sxx * (2.0 - mean_x);
    CHECK(curve.points[2].fitted == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("smoothing errors") {
    const std::vector<double> x{0, 1};
    const std::vector<double> y{0, 1};
    CHECK_THROWS_AS(loess(x, y), ModelError);
    SmoothConfig bad;
    bad.span = 0.0;
    const std::vector<double> x5{0, 1, 2, 3, 4}, y5{0, 1, 2, 3, 4};
    CHECK_THROWS_AS(loess(x5, y5, bad), ModelError);
    bad = {};
    bad.degree = 3;
    CHECK_THROWS_AS(loess(x5, y5, bad), ModelError);
    const std::vector<double> unsorted{0, 2, 1, 3, 4};
    CHECK_THROWS_AS(loess(unsorted, y5), ModelError);
}

TEST_CASE("smooth uses supported points only") {
    RateSeries s;
    for (int i = 0; i < 20; ++i) s.points.push_back({i, 1, 20, 0.05, i % 5 == 0});
    const auto curve = smooth(s);
    CHECK(curve.points.size() == 16);
}

TEST_CASE("smoother is linear, affine-equivariant and reproduces OLS with a uniform full window") {
    auto result = tcage::testing::check_property(100, 41, [](std::mt19937_64& rng) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(8, 60)(rng);
        const auto x = random_ages(rng, n);
        std::normal_distribution<double> noise(0.0, 0.1);
        std::vector<double> y1(n), y2(n), sum(n), affine(n), line(n);
        const double a = std::uniform_real_distribution<double>(-3, 3)(rng);
        const double b = std::uniform_real_distribution<double>(-1, 1)(rng);
        const double slope = std::uniform_real_distribution<double>(-0.01, 0.01)(rng);
        for (std::size_t i = 0; i < n; ++i) {
            y1[i] = 0.2 + noise(rng);
            y2[i] = noise(rng);
            sum[i] = y1[i] + y2[i];
            affine[i] = a * y1[i] + b;
            line[i] = b + slope * x[i];
        }
        SmoothConfig c;
        c.span = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
        c.degree = std::uniform_int_distribution<int>(1, 2)(rng);

        const auto f1 = fitted(loess(x, y1, c));
        const auto f2 = fitted(loess(x, y2, c));
        const auto fs = fitted(loess(x, sum, c));
        const auto fa = fitted(loess(x, affine, c));
        const auto fl = fitted(loess(x, line, c));
        for (std::size_t i = 0; i < n; ++i) {
            require(std::abs(fs[i] - (f1[i] + f2[i])) < 1e-9, "not additive");
            require(std::abs(fa[i] - (a * f1[i] + b)) < 1e-9, "not affine-equivariant");
            require(std::abs(fl[i] - line[i]) < 1e-9, "line not reproduced");
        }

        SmoothConfig global;
        global.span = 1.0;
        global.degree = 1;
        global.kernel = SmoothKernel::Uniform;
        const auto fg = fitted(loess(x, y1, global));
        const auto ols = fit_polynomial(x, y1, 1);
        for (std::size_t i = 0; i < n; ++i) require(std::abs(fg[i] - predict(ols, x[i])) < 1e-9, "not the OLS line");

        const auto band = loess(x, y1, c);
        for (const auto& p : band.points) require(p.ci_low <= p.fitted && p.fitted <= p.ci_high, "band order");
    });
    INFO(result.message);
    CHECK(result.ok);
}
