#pragma once

#include "tcage/ceo.hpp"
#include "tcage/lifespan.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace tcage {

enum class RateKind { Activation, Hazard };

std::string_view to_string(RateKind kind);

struct RatePoint {
    std::int64_t age_days = 0;
    std::size_t numerator = 0;
    std::size_t denominator = 0;
    double rate = 0.0;
    bool low_support = false;

    friend bool operator==(const RatePoint&, const RatePoint&) = default;
};

/// Per-day rates ordered by strictly increasing day. `age_days` holds the
/// test-case age for age-relative series and the wall-clock day index for
/// wall-clock series.
struct RateSeries {
    RateKind kind = RateKind::Hazard;
    std::vector<RatePoint> points;
    std::size_t min_support = 1;

    /// Points that may be smoothed or fitted (low_support == false).
    std::vector<RatePoint> supported() const;
};

/// Activation rate per age: test cases executing at age t over test cases
/// whose terminal age is at least t, for t = 0..max terminal age.
RateSeries activation_series(const CeoDataset& dataset, const LifeTable& table);

/// Failure rate per age: test cases with a FAIL at age t over test cases
/// executing at age t. Ages without executions are omitted. Test cases are
/// counted once per age-day however often they ran.
RateSeries hazard_series(const CeoDataset& dataset, const LifeTable& table);

/// Flags points whose denominator is below `min_support`; no point is removed.
RateSeries apply_min_support(RateSeries series, std::size_t min_support);

enum class YearlyMode { Pooled, MeanOfDaily };

std::optional<YearlyMode> parse_yearly_mode(std::string_view text);
std::string_view to_string(YearlyMode mode);

struct YearlyRate {
    int year_index = 0;  ///< year k covers ages [365k, 365(k+1))
    std::optional<double> rate;
    std::size_t fail_days = 0;
    std::size_t execution_days = 0;
};

/// Aggregate failure rate per 365-day age window of a hazard series. Pooled:
/// summed numerators over summed denominators. MeanOfDaily: unweighted mean of
/// the supported daily rates.
std::vector<YearlyRate> yearly_failure_rates(const RateSeries& hazard, YearlyMode mode = YearlyMode::Pooled);

std::vector<YearlyRate> yearly_failure_rates(const CeoDataset& dataset, const LifeTable& table,
                                             YearlyMode mode = YearlyMode::Pooled, std::size_t min_support = 1);

/// Same counting rules on the wall-clock day axis. The activation denominator
/// is the number of test cases with t0 <= day <= t_omega.
RateSeries wallclock_series(const CeoDataset& dataset, const LifeTable& table, RateKind kind);

}  // namespace tcage
