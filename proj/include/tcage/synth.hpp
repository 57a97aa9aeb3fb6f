#pragma once

#include "tcage/ceo.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

namespace tcage {

struct ConstantRate {
    double value = 0.0;
};
/// Linear from `from` at age 0 to `to` at `over_days`, constant afterwards.
struct RampRate {
    double from = 0.0;
    double to = 0.0;
    double over_days = 1.0;
};
/// `before` for ages below `at_day`, `after` from then on.
struct StepRate {
    double before = 0.0;
    double after = 0.0;
    double at_day = 0.0;
};
/// initial * (1 - t / zero_at), clamped at zero.
struct LinearDecayRate {
    double initial = 0.0;
    double zero_at = 1.0;
};
/// c0 + c1 t + c2 t^2
struct QuadraticRate {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};
/// initial * exp(-rate * t)
struct ExponentialDecayRate {
    double initial = 0.0;
    double rate = 0.0;
};
/// Exponential decay until `plateau_start`, flat until `growth_start`, then
/// exponential growth at `growth_rate`.
struct BathtubRate {
    double initial = 0.0;
    double decay_rate = 0.0;
    double plateau_start = 0.0;
    double growth_start = 0.0;
    double growth_rate = 0.0;
};

using RateFunction = std::variant<ConstantRate, RampRate, StepRate, LinearDecayRate, QuadraticRate,
                                  ExponentialDecayRate, BathtubRate>;

double evaluate(const RateFunction& f, double age);

/// Smallest whole day d >= 0 with f(d) <= f(0) / 2, from the family's closed
/// form. nullopt when f never halves or f(0) <= 0.
std::optional<int> analytic_half_life(const RateFunction& f);

struct UniformCreation {};
/// Test case i is created on days[i % days.size()].
struct BatchCreation {
    std::vector<int> days;
};
using CreationSchedule = std::variant<UniformCreation, BatchCreation>;

enum class SessionMode { Nightly, None };

struct SynthProfile {
    std::size_t n_test_cases = 100;
    int horizon_days = 365;
    CreationSchedule creation = UniformCreation{};
    RateFunction activation = ConstantRate{1.0};
    RateFunction hazard = ConstantRate{0.0};
    SessionMode sessions = SessionMode::Nightly;
    std::uint64_t seed = 1;
    std::int64_t start_day = 18262;  ///< days since 1970-01-01; 2020-01-01
};

/// Throws ProfileError when a field is out of range or a probability function
/// leaves [0, 1] on any whole day of [0, horizon_days].
void validate_profile(const SynthProfile& profile);

SynthProfile profile_from_json(const nlohmann::json& j);
nlohmann::ordered_json profile_to_json(const SynthProfile& profile);

struct GroundTruth {
    SynthProfile profile;
    std::optional<int> analytic_half_life_days;
};

nlohmann::ordered_json ground_truth_json(const GroundTruth& truth, std::size_t executions);

struct SynthResult {
    CeoDataset dataset;
    GroundTruth truth;
};

/// Deterministic for a fixed profile. Test cases are visited in index order;
/// each takes one draw for its creation day (uniform schedule only), then for
/// every day from creation to horizon_days - 1 one activation draw and, when
/// executed, one outcome draw. Creations are stamped 09:00:00Z, executions
/// 20:00:00Z plus (index mod 3600) seconds, nightly sessions 20:00:00Z.
SynthResult generate(const SynthProfile& profile);

/// Writes creations.csv, executions.csv and ground_truth.json into `dir`.
void write_synth(const SynthResult& result, const std::filesystem::path& dir);

}  // namespace tcage
