#pragma once

#include "tcage/ceo.hpp"

#include <chrono>
#include <random>
#include <string>
#include <vector>

namespace tcage::testing {

/// 2007-08-25 as days since the epoch.
inline constexpr std::int64_t kD1Base = 13750;

inline Timestamp at(std::int64_t day, int hour, int minute = 0) {
    using namespace std::chrono;
    return timestamp_from_day(kD1Base + day, hours{hour} + minutes{minute});
}

/// c1 created day 0, runs day0 P, day1 F, day2 P; c2 created day 1, runs
/// day1 F, day3 F; tM_day = 3.
inline CeoDataset make_d1() {
    std::vector<CreationRecord> creations{{"c1", at(0, 10)}, {"c2", at(1, 8)}};
    std::vector<ExecutionRecord> executions{
        {"c1", at(0, 12), Outcome::Pass, std::nullopt}, {"c1", at(1, 12), Outcome::Fail, std::nullopt},
        {"c1", at(2, 12), Outcome::Pass, std::nullopt}, {"c2", at(1, 12), Outcome::Fail, std::nullopt},
        {"c2", at(3, 12), Outcome::Fail, std::nullopt},
    };
    return validate_dataset(std::move(creations), std::move(executions));
}

/// Random dataset with up to `max_tests` test cases over up to `max_days`
/// days; runs happen at random hours, several per day allowed.
inline CeoDataset random_tiny_dataset(std::mt19937_64& rng, int max_tests = 10, int max_days = 30,
                                      double fail_probability = 0.5) {
    std::uniform_int_distribution<int> n_dist(1, max_tests);
    std::uniform_int_distribution<int> days_dist(1, max_days);
    std::uniform_int_distribution<int> hour_dist(0, 23);
    std::uniform_int_distribution<int> runs_dist(0, 2);
    std::bernoulli_distribution fail(fail_probability);
    std::bernoulli_distribution session_flag(0.7);

    const int n = n_dist(rng);
    const int days = days_dist(rng);
    std::vector<CreationRecord> creations;
    std::vector<ExecutionRecord> executions;
    for (int i = 0; i < n; ++i) {
        const std::string name = "t" + std::to_string(i);
        std::uniform_int_distribution<int> created_dist(0, days - 1);
        const int created = created_dist(rng);
        creations.push_back({name, at(created, 0)});
        bool any = false;
        for (int d = created; d < days; ++d) {
            int runs = runs_dist(rng);
            if (!any && d == days - 1) runs = std::max(runs, 1);
            for (int r = 0; r < runs; ++r) {
                const int hour = hour_dist(rng);
                std::optional<Timestamp> session;
                if (session_flag(rng)) session = at(d, 0, 30);
                executions.push_back({name, at(d, hour, r + 1), fail(rng) ? Outcome::Fail : Outcome::Pass, session});
                any = true;
            }
        }
    }
    return validate_dataset(std::move(creations), std::move(executions));
}

}  // namespace tcage::testing
