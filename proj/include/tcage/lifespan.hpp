#pragma once

#include "tcage/ceo.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tcage {

/// Allowance in whole days after a test case's last execution before it is
/// considered dead.
struct GracePeriod {
    int days = 90;
};

struct LifeSpan {
    std::string test_case;
    std::int64_t t0 = 0;       ///< creation day
    std::int64_t t_omega = 0;  ///< last-execution day
    bool dead = false;

    std::int64_t terminal_age_days() const { return t_omega - t0; }

    friend bool operator==(const LifeSpan&, const LifeSpan&) = default;
};

/// Life spans of all executed test cases, sorted by test case name, together
/// with the reference day tM the death verdicts were made against.
struct LifeTable {
    std::vector<LifeSpan> spans;
    std::int64_t tm_day = 0;
    int grace_days = 0;
};

/// Last-execution-with-grace: t_omega is the day of the latest execution and a
/// test case is dead iff tM_day - t_omega > grace. Test cases without any
/// execution are skipped and counted in the diagnostics.
LifeTable determine_death(const CeoDataset& dataset, GracePeriod grace, Diagnostics* diagnostics = nullptr);

/// max(0, min(t, t_omega) - t0)
std::int64_t age_at(const LifeSpan& span, std::int64_t t);

struct AlivenessSummary {
    std::size_t total = 0;
    std::size_t dead = 0;
    double dead_fraction = 0.0;
    double mean_terminal_age_days = 0.0;
    double sd_terminal_age_days = 0.0;  ///< sample sd; 0 when total == 1
};

AlivenessSummary aliveness_summary(std::span<const LifeSpan> spans);

struct HistogramBin {
    std::int64_t start_day = 0;
    std::size_t count = 0;
};

/// Terminal-age histogram; bin b covers [b*w, (b+1)*w) and the bins span
/// [0, max terminal age].
std::vector<HistogramBin> age_distribution(std::span<const LifeSpan> spans, int bin_width_days);

struct GrowthPoint {
    std::int64_t day = 0;
    std::size_t alive = 0;
};

/// Alive count for each day from the earliest creation to tM_day. A dead test
/// case counts on [t0, t_omega], a live one on [t0, tM_day].
std::vector<GrowthPoint> growth_curve(const LifeTable& table);

}  // namespace tcage
