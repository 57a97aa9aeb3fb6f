#include "tcage/curves.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace tcage {

namespace {

struct DayTally {
    std::size_t executed = 0;
    std::size_t failed = 0;
};

/// Test-case-level (executed, failed) counts per day key. Executions are
/// sorted by (test_case, time), so one test case's runs on a day are adjacent.
template <class KeyFn>
std::map<std::int64_t, DayTally> tally_days(const CeoDataset& dataset, KeyFn key_of) {
    std::map<std::int64_t, DayTally> days;
    const auto& executions = dataset.executions();
    std::size_t i = 0;
    while (i < executions.size()) {
        const auto& first = executions[i];
        const auto key = key_of(first);
        bool failed = false;
        std::size_t j = i;
        while (j < executions.size() && executions[j].test_case == first.test_case && key_of(executions[j]) == key) {
            failed = failed || executions[j].outcome == Outcome::Fail;
            ++j;
        }
        auto& t = days[key];
        ++t.executed;
        if (failed) ++t.failed;
        i = j;
    }
    return days;
}

std::unordered_map<std::string, const LifeSpan*> index_spans(const LifeTable& table) {
    std::unordered_map<std::string, const LifeSpan*> index;
    index.reserve(table.spans.size());
    for (const auto& span : table.spans) index.emplace(span.test_case, &span);
    return index;
}

RatePoint make_point(std::int64_t day, std::size_t numerator, std::size_t denominator) {
    RatePoint p;
    p.age_days = day;
    p.numerator = numerator;
    p.denominator = denominator;
    p.rate = denominator > 0 ? static_cast<double>(numerator) / static_cast<double>(denominator) : 0.0;
    return p;
}

std::map<std::int64_t, DayTally> tally_by_age(const CeoDataset& dataset, const LifeTable& table) {
    const auto spans = index_spans(table);
    return tally_days(dataset, [&](const ExecutionRecord& e) {
        return dataset.day_of(e.execution_time) - spans.at(e.test_case)->t0;
    });
}

}  // namespace

std::string_view to_string(RateKind kind) { return kind == RateKind::Activation ? "activation" : "hazard"; }

std::vector<RatePoint> RateSeries::supported() const {
    std::vector<RatePoint> out;
    std::copy_if(points.begin(), points.end(), std::back_inserter(out), [](const RatePoint& p) { return !p.low_support; });
    return out;
}

RateSeries activation_series(const CeoDataset& dataset, const LifeTable& table) {
    RateSeries series;
    series.kind = RateKind::Activation;
    if (table.spans.empty()) return series;

    std::int64_t max_age = 0;
    for (const auto& span : table.spans) max_age = std::max(max_age, span.terminal_age_days());
    // at_least[t] = #{terminal age >= t}, via a suffix sum of terminal-age counts.
    std::vector<std::size_t> at_least(static_cast<std::size_t>(max_age) + 2, 0);
    for (const auto& span : table.spans) ++at_least[static_cast<std::size_t>(span.terminal_age_days())];
    for (std::int64_t t = max_age - 1; t >= 0; --t) {
        at_least[static_cast<std::size_t>(t)] += at_least[static_cast<std::size_t>(t + 1)];
    }

    const auto days = tally_by_age(dataset, table);
    series.points.reserve(static_cast<std::size_t>(max_age) + 1);
    for (std::int64_t t = 0; t <= max_age; ++t) {
        auto it = days.find(t);
        const std::size_t executed = it == days.end() ? 0 : it->second.executed;
        series.points.push_back(make_point(t, executed, at_least[static_cast<std::size_t>(t)]));
    }
    return series;
}

RateSeries hazard_series(const CeoDataset& dataset, const LifeTable& table) {
    RateSeries series;
    series.kind = RateKind::Hazard;
    for (const auto& [age, tally] : tally_by_age(dataset, table)) {
        series.points.push_back(make_point(age, tally.failed, tally.executed));
    }
    return series;
}

RateSeries apply_min_support(RateSeries series, std::size_t min_support) {
    if (min_support < 1) min_support = 1;
    series.min_support = min_support;
    for (auto& p : series.points) p.low_support = p.denominator < min_support;
    return series;
}

std::optional<YearlyMode> parse_yearly_mode(std::string_view text) {
    if (text == "pooled") return YearlyMode::Pooled;
    if (text == "mean_of_daily" || text == "mean-of-daily") return YearlyMode::MeanOfDaily;
    return std::nullopt;
}

std::string_view to_string(YearlyMode mode) { return mode == YearlyMode::Pooled ? "pooled" : "mean_of_daily"; }

std::vector<YearlyRate> yearly_failure_rates(const RateSeries& hazard, YearlyMode mode) {
    constexpr std::int64_t kYear = 365;
    std::vector<YearlyRate> years;
    if (hazard.points.empty()) return years;
    const auto last_year = static_cast<int>(hazard.points.back().age_days / kYear);
    years.resize(static_cast<std::size_t>(last_year) + 1);

    std::vector<double> daily_sum(years.size(), 0.0);
    std::vector<std::size_t> daily_count(years.size(), 0);
    for (std::size_t k = 0; k < years.size(); ++k) years[k].year_index = static_cast<int>(k);
    for (const auto& p : hazard.points) {
        if (p.age_days < 0) continue;
        const auto k = static_cast<std::size_t>(p.age_days / kYear);
        years[k].fail_days += p.numerator;
        years[k].execution_days += p.denominator;
        if (!p.low_support && p.denominator > 0) {
            daily_sum[k] += p.rate;
            ++daily_count[k];
        }
    }
    for (std::size_t k = 0; k < years.size(); ++k) {
        auto& y = years[k];
        if (mode == YearlyMode::Pooled) {
            if (y.execution_days > 0) {
                y.rate = static_cast<double>(y.fail_days) / static_cast<double>(y.execution_days);
            }
        } else if (daily_count[k] > 0) {
            y.rate = daily_sum[k] / static_cast<double>(daily_count[k]);
        }
    }
    return years;
}

std::vector<YearlyRate> yearly_failure_rates(const CeoDataset& dataset, const LifeTable& table, YearlyMode mode,
                                             std::size_t min_support) {
    return yearly_failure_rates(apply_min_support(hazard_series(dataset, table), min_support), mode);
}

RateSeries wallclock_series(const CeoDataset& dataset, const LifeTable& table, RateKind kind) {
    RateSeries series;
    series.kind = kind;
    const auto days = tally_days(dataset, [&](const ExecutionRecord& e) { return dataset.day_of(e.execution_time); });

    if (kind == RateKind::Hazard) {
        for (const auto& [day, tally] : days) series.points.push_back(make_point(day, tally.failed, tally.executed));
        return series;
    }

    if (table.spans.empty()) return series;
    std::int64_t first = table.spans.front().t0;
    std::int64_t last = table.spans.front().t_omega;
    for (const auto& span : table.spans) {
        first = std::min(first, span.t0);
        last = std::max(last, span.t_omega);
    }
    const auto length = static_cast<std::size_t>(last - first + 1);
    std::vector<std::int64_t> delta(length + 1, 0);
    for (const auto& span : table.spans) {
        delta[static_cast<std::size_t>(span.t0 - first)] += 1;
        delta[static_cast<std::size_t>(span.t_omega - first + 1)] -= 1;
    }
    std::int64_t alive = 0;
    for (std::size_t i = 0; i < length; ++i) {
        alive += delta[i];
        if (alive <= 0) continue;
        const auto day = first + static_cast<std::int64_t>(i);
        auto it = days.find(day);
        const std::size_t executed = it == days.end() ? 0 : it->second.executed;
        series.points.push_back(make_point(day, executed, static_cast<std::size_t>(alive)));
    }
    return series;
}

}  // namespace tcage
