#include "tcage/lifespan.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace tcage {

LifeTable determine_death(const CeoDataset& dataset, GracePeriod grace, Diagnostics* diagnostics) {
    if (grace.days < 0) throw Error("grace period must be non-negative");

    LifeTable table;
    table.tm_day = dataset.tM_day();
    table.grace_days = grace.days;

    // Executions are sorted by (test_case, time): the last row of each run is t_omega.
    const auto& executions = dataset.executions();
    std::unordered_set<std::string> executed;
    for (std::size_t i = 0; i < executions.size(); ++i) {
        const auto& e = executions[i];
        if (i + 1 < executions.size() && executions[i + 1].test_case == e.test_case) continue;
        const auto created = dataset.creation_of(e.test_case);
        LifeSpan span;
        span.test_case = e.test_case;
        span.t0 = dataset.day_of(*created);
        span.t_omega = dataset.day_of(e.execution_time);
        span.dead = table.tm_day - span.t_omega > grace.days;
        table.spans.push_back(std::move(span));
        executed.insert(e.test_case);
    }

    if (diagnostics) {
        std::size_t unexecuted = 0;
        for (const auto& c : dataset.creations()) {
            if (!executed.contains(c.test_case)) ++unexecuted;
        }
        if (unexecuted > 0) {
            diagnostics->unexecuted_test_cases += unexecuted;
            diagnostics->warn(fmt::format("{} test case(s) have no executions and are excluded from life spans",
                                          unexecuted));
        }
    }
    return table;
}

std::int64_t age_at(const LifeSpan& span, std::int64_t t) {
    return std::max<std::int64_t>(0, std::min(t, span.t_omega) - span.t0);
}

AlivenessSummary aliveness_summary(std::span<const LifeSpan> spans) {
    if (spans.empty()) throw Error("aliveness summary needs at least one life span");
    AlivenessSummary s;
    s.total = spans.size();
    double sum = 0.0;
    for (const auto& span : spans) {
        if (span.dead) ++s.dead;
        sum += static_cast<double>(span.terminal_age_days());
    }
    s.dead_fraction = static_cast<double>(s.dead) / static_cast<double>(s.total);
    s.mean_terminal_age_days = sum / static_cast<double>(s.total);
    if (s.total > 1) {
        double ss = 0.0;
        for (const auto& span : spans) {
            const double d = static_cast<double>(span.terminal_age_days()) - s.mean_terminal_age_days;
            ss += d * d;
        }
        s.sd_terminal_age_days = std::sqrt(ss / static_cast<double>(s.total - 1));
    }
    return s;
}

std::vector<HistogramBin> age_distribution(std::span<const LifeSpan> spans, int bin_width_days) {
    if (bin_width_days < 1) throw Error("histogram bin width must be at least one day");
    std::vector<HistogramBin> bins;
    if (spans.empty()) return bins;
    std::int64_t max_age = 0;
    for (const auto& span : spans) max_age = std::max(max_age, span.terminal_age_days());
    const auto nbins = static_cast<std::size_t>(max_age / bin_width_days + 1);
    bins.resize(nbins);
    for (std::size_t b = 0; b < nbins; ++b) bins[b].start_day = static_cast<std::int64_t>(b) * bin_width_days;
    for (const auto& span : spans) ++bins[static_cast<std::size_t>(span.terminal_age_days() / bin_width_days)].count;
    return bins;
}

std::vector<GrowthPoint> growth_curve(const LifeTable& table) {
    std::vector<GrowthPoint> curve;
    if (table.spans.empty()) return curve;
    std::int64_t first = table.spans.front().t0;
    for (const auto& span : table.spans) first = std::min(first, span.t0);
    if (first > table.tm_day) return curve;

    // Difference array over [first, tm_day + 1].
    const auto length = static_cast<std::size_t>(table.tm_day - first + 1);
    std::vector<std::int64_t> delta(length + 1, 0);
    for (const auto& span : table.spans) {
        const std::int64_t last = span.dead ? span.t_omega : table.tm_day;
        if (last < span.t0) continue;
        delta[static_cast<std::size_t>(span.t0 - first)] += 1;
        delta[static_cast<std::size_t>(last - first + 1)] -= 1;
    }
    curve.reserve(length);
    std::int64_t running = 0;
    for (std::size_t i = 0; i < length; ++i) {
        running += delta[i];
        curve.push_back({first + static_cast<std::int64_t>(i), static_cast<std::size_t>(running)});
    }
    return curve;
}

}  // namespace tcage
