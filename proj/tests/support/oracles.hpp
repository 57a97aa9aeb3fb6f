#pragma once

// Independent reference computations. Nothing here calls into the lifespan,
// curves or regfit modules; ages are derived straight from timestamps.

#include "tcage/ceo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace tcage::testing {

struct CountPair {
    std::size_t numerator = 0;
    std::size_t denominator = 0;
    friend bool operator==(const CountPair&, const CountPair&) = default;
};

struct BruteCurves {
    std::map<std::int64_t, CountPair> activation;  // every age 0..max terminal age
    std::map<std::int64_t, CountPair> hazard;      // ages with at least one execution
};

inline std::int64_t epoch_day(Timestamp t) {
    return static_cast<std::int64_t>(std::floor(static_cast<double>(t.time_since_epoch().count()) / 86400.0));
}

/// Enumerates (test case, age-day, outcome) triples and counts the set-builder
/// definitions directly.
inline BruteCurves brute_force_curves(const CeoDataset& dataset) {
    struct Triple {
        std::string test_case;
        std::int64_t age;
        Outcome outcome;
    };
    std::map<std::string, std::int64_t> t0;
    for (const auto& c : dataset.creations()) t0[c.test_case] = epoch_day(c.creation_time);

    std::vector<Triple> triples;
    std::map<std::string, std::int64_t> terminal;
    for (const auto& e : dataset.executions()) {
        const auto age = epoch_day(e.execution_time) - t0.at(e.test_case);
        triples.push_back({e.test_case, age, e.outcome});
        auto [it, inserted] = terminal.emplace(e.test_case, age);
        if (!inserted) it->second = std::max(it->second, age);
    }

    BruteCurves out;
    std::int64_t max_age = 0;
    for (const auto& [name, age] : terminal) max_age = std::max(max_age, age);
    for (std::int64_t t = 0; t <= max_age; ++t) {
        std::set<std::string> executing, failing, old_enough;
        for (const auto& tr : triples) {
            if (tr.age != t) continue;
            executing.insert(tr.test_case);
            if (tr.outcome == Outcome::Fail) failing.insert(tr.test_case);
        }
        for (const auto& [name, age] : terminal) {
            if (t <= age) old_enough.insert(name);
        }
        out.activation[t] = {executing.size(), old_enough.size()};
        if (!executing.empty()) out.hazard[t] = {failing.size(), executing.size()};
    }
    return out;
}

/// Solves A x = b by Gaussian elimination with partial pivoting in long double.
inline std::vector<long double> gauss_solve(std::vector<std::vector<long double>> a, std::vector<long double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const long double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<long double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        long double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

/// Polynomial least squares through the normal equations on x / x_scale.
/// Returns coefficients in that scaled basis.
inline std::vector<long double> normal_equation_fit(const std::vector<double>& x, const std::vector<double>& y,
                                                    int degree, double x_scale) {
    const std::size_t p = static_cast<std::size_t>(degree) + 1;
    std::vector<std::vector<long double>> xtx(p, std::vector<long double>(p, 0.0L));
    std::vector<long double> xty(p, 0.0L);
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<long double> row(p);
        long double power = 1.0L;
        for (std::size_t j = 0; j < p; ++j) {
            row[j] = power;
            power *= static_cast<long double>(x[i]) / x_scale;
        }
        for (std::size_t r = 0; r < p; ++r) {
            xty[r] += row[r] * y[i];
            for (std::size_t c = 0; c < p; ++c) xtx[r][c] += row[r] * row[c];
        }
    }
    return gauss_solve(xtx, xty);
}

}  // namespace tcage::testing
