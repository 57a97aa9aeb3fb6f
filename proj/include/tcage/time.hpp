#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tcage {

using Timestamp = std::chrono::sys_seconds;

/// Parses `YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)`; a space may replace the
/// `T`. The zone designator is mandatory. Fractional seconds are truncated.
/// Returns nullopt for anything that is not a valid calendar instant.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_timestamp(Timestamp t);

/// Whole days since 1970-01-01 (floor), i.e. the UTC calendar date.
std::int64_t utc_day_number(Timestamp t);

Timestamp timestamp_from_day(std::int64_t day_number, std::chrono::seconds time_of_day = {});

}  // namespace tcage
