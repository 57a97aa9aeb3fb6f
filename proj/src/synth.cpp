#include "tcage/synth.hpp"

#include "tcage/prng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace tcage {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Earliest whole day at or after `estimate` (a real-valued crossing) where f
/// is at most half of f(0); the closed form only needs to land near the answer.
std::optional<int> settle_on_grid(const RateFunction& f, double estimate) {
    if (!std::isfinite(estimate) || estimate < 0.0) return std::nullopt;
    const double half = evaluate(f, 0.0) / 2.0;
    auto d = static_cast<long long>(std::ceil(estimate));
    while (d > 0 && evaluate(f, static_cast<double>(d - 1)) <= half) --d;
    for (int guard = 0; guard < 4 && evaluate(f, static_cast<double>(d)) > half; ++guard) ++d;
    if (evaluate(f, static_cast<double>(d)) > half) return std::nullopt;
    return static_cast<int>(d);
}

double number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ProfileError(fmt::format("rate function field '{}' missing or not a number", key));
    }
    return j.at(key).get<double>();
}

RateFunction rate_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family")) throw ProfileError("rate function needs a 'family'");
    const auto family = j.at("family").get<std::string>();
    if (family == "constant") return ConstantRate{number(j, "value")};
    if (family == "ramp") return RampRate{number(j, "from"), number(j, "to"), number(j, "over_days")};
    if (family == "step") return StepRate{number(j, "before"), number(j, "after"), number(j, "at_day")};
    if (family == "linear_decay") return LinearDecayRate{number(j, "initial"), number(j, "zero_at")};
    if (family == "quadratic") return QuadraticRate{number(j, "c0"), number(j, "c1"), number(j, "c2")};
    if (family == "exponential_decay") return ExponentialDecayRate{number(j, "initial"), number(j, "rate")};
    if (family == "bathtub") {
        return BathtubRate{number(j, "initial"), number(j, "decay_rate"), number(j, "plateau_start"),
                           number(j, "growth_start"), number(j, "growth_rate")};
    }
    throw ProfileError(fmt::format("unknown rate family '{}'", family));
}

nlohmann::ordered_json rate_to_json(const RateFunction& f) {
    return std::visit(
        overloaded{
            [](const ConstantRate& r) { return nlohmann::ordered_json{{"family", "constant"}, {"value", r.value}}; },
            [](const RampRate& r) {
                return nlohmann::ordered_json{{"family", "ramp"}, {"from", r.from}, {"to", r.to}, {"over_days", r.over_days}};
            },
            [](const StepRate& r) {
                return nlohmann::ordered_json{
                    {"family", "step"}, {"before", r.before}, {"after", r.after}, {"at_day", r.at_day}};
            },
            [](const LinearDecayRate& r) {
                return nlohmann::ordered_json{{"family", "linear_decay"}, {"initial", r.initial}, {"zero_at", r.zero_at}};
            },
            [](const QuadraticRate& r) {
                return nlohmann::ordered_json{{"family", "quadratic"}, {"c0", r.c0}, {"c1", r.c1}, {"c2", r.c2}};
            },
            [](const ExponentialDecayRate& r) {
                return nlohmann::ordered_json{{"family", "exponential_decay"}, {"initial", r.initial}, {"rate", r.rate}};
            },
            [](const BathtubRate& r) {
                return nlohmann::ordered_json{{"family", "bathtub"},
                                              {"initial", r.initial},
                                              {"decay_rate", r.decay_rate},
                                              {"plateau_start", r.plateau_start},
                                              {"growth_start", r.growth_start},
                                              {"growth_rate", r.growth_rate}};
            },
        },
        f);
}

void check_unit_interval(const RateFunction& f, int horizon, const char* role) {
    for (int t = 0; t <= horizon; ++t) {
        const double v = evaluate(f, t);
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ProfileError(fmt::format("{} probability {} at age {} is outside [0, 1]", role, v, t));
        }
    }
}

}  // namespace

double evaluate(const RateFunction& f, double t) {
    return std::visit(
        overloaded{
            [](const ConstantRate& r) { return r.value; },
            [t](const RampRate& r) {
                if (t >= r.over_days) return r.to;
                return r.from + (r.to - r.from) * t / r.over_days;
            },
            [t](const StepRate& r) { return t < r.at_day ? r.before : r.after; },
            [t](const LinearDecayRate& r) { return std::max(0.0, r.initial * (1.0 - t / r.zero_at)); },
            [t](const QuadraticRate& r) { return r.c0 + r.c1 * t + r.c2 * t * t; },
            [t](const ExponentialDecayRate& r) { return r.initial * std::exp(-r.rate * t); },
            [t](const BathtubRate& r) {
                const double floor_level = r.initial * std::exp(-r.decay_rate * r.plateau_start);
                if (t < r.plateau_start) return r.initial * std::exp(-r.decay_rate * t);
                if (t < r.growth_start) return floor_level;
                return floor_level * std::exp(r.growth_rate * (t - r.growth_start));
            },
        },
        f);
}

std::optional<int> analytic_half_life(const RateFunction& f) {
    const double initial = evaluate(f, 0.0);
    if (!(initial > 0.0)) return std::nullopt;
    const double half = initial / 2.0;
    return std::visit(
        overloaded{
            [](const ConstantRate&) -> std::optional<int> { return std::nullopt; },
            [&](const RampRate& r) -> std::optional<int> {
                if (!(r.to <= half)) return std::nullopt;
                return settle_on_grid(f, r.over_days * (half - r.from) / (r.to - r.from));
            },
            [&](const StepRate& r) -> std::optional<int> {
                if (!(r.after <= half)) return std::nullopt;
                return settle_on_grid(f, r.at_day);
            },
            [&](const LinearDecayRate& r) { return settle_on_grid(f, r.zero_at / 2.0); },
            [&](const QuadraticRate& r) -> std::optional<int> {
                // first non-negative root of c2 t^2 + c1 t + c0/2
                if (r.c2 == 0.0) {
                    if (!(r.c1 < 0.0)) return std::nullopt;
                    return settle_on_grid(f, -half / r.c1);
                }
                const double disc = r.c1 * r.c1 - 4.0 * r.c2 * half;
                if (disc < 0.0) return std::nullopt;
                const double sq = std::sqrt(disc);
                const double q = -0.5 * (r.c1 + std::copysign(sq, r.c1));
                double a = q / r.c2;
                double b = q != 0.0 ? half / q : a;
                if (a > b) std::swap(a, b);
                if (a >= 0.0) return settle_on_grid(f, a);
                if (b >= 0.0) return settle_on_grid(f, b);
                return std::nullopt;
            },
            [&](const ExponentialDecayRate& r) -> std::optional<int> {
                if (!(r.rate > 0.0)) return std::nullopt;
                return settle_on_grid(f, std::log(2.0) / r.rate);
            },
            [&](const BathtubRate& r) -> std::optional<int> {
                if (!(r.decay_rate > 0.0)) return std::nullopt;
                const double crossing = std::log(2.0) / r.decay_rate;
                if (crossing > r.plateau_start) return std::nullopt;
                return settle_on_grid(f, crossing);
            },
        },
        f);
}

void validate_profile(const SynthProfile& profile) {
    if (profile.n_test_cases == 0) throw ProfileError("n_test_cases must be positive");
    if (profile.horizon_days < 1) throw ProfileError("horizon_days must be positive");
    if (const auto* batches = std::get_if<BatchCreation>(&profile.creation)) {
        if (batches->days.empty()) throw ProfileError("batch creation needs at least one day");
        for (int d : batches->days) {
            if (d < 0 || d >= profile.horizon_days) {
                throw ProfileError(fmt::format("batch day {} outside [0, horizon_days)", d));
            }
        }
    }
    if (const auto* ramp = std::get_if<RampRate>(&profile.activation); ramp && !(ramp->over_days > 0.0)) {
        throw ProfileError("ramp over_days must be positive");
    }
    if (const auto* ramp = std::get_if<RampRate>(&profile.hazard); ramp && !(ramp->over_days > 0.0)) {
        throw ProfileError("ramp over_days must be positive");
    }
    for (const auto* f : {&profile.activation, &profile.hazard}) {
        if (const auto* decay = std::get_if<LinearDecayRate>(f); decay && !(decay->zero_at > 0.0)) {
            throw ProfileError("linear_decay zero_at must be positive");
        }
    }
    check_unit_interval(profile.activation, profile.horizon_days, "activation");
    check_unit_interval(profile.hazard, profile.horizon_days, "hazard");
}

SynthProfile profile_from_json(const nlohmann::json& j) {
    try {
        SynthProfile p;
        p.n_test_cases = j.at("n_test_cases").get<std::size_t>();
        p.horizon_days = j.at("horizon_days").get<int>();
        p.activation = rate_from_json(j.at("activation"));
        p.hazard = rate_from_json(j.at("hazard"));
        if (j.contains("creation")) {
            const auto& c = j.at("creation");
            const auto type = c.at("type").get<std::string>();
            if (type == "uniform") {
                p.creation = UniformCreation{};
            } else if (type == "batches") {
                p.creation = BatchCreation{c.at("days").get<std::vector<int>>()};
            } else {
                throw ProfileError(fmt::format("unknown creation schedule '{}'", type));
            }
        }
        if (j.contains("sessions")) {
            const auto s = j.at("sessions").get<std::string>();
            if (s == "nightly") {
                p.sessions = SessionMode::Nightly;
            } else if (s == "none") {
                p.sessions = SessionMode::None;
            } else {
                throw ProfileError(fmt::format("unknown session mode '{}'", s));
            }
        }
        if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("start_date")) {
            const auto text = j.at("start_date").get<std::string>();
            auto ts = parse_timestamp(text + "T00:00:00Z");
            if (!ts) throw ProfileError(fmt::format("start_date '{}' is not YYYY-MM-DD", text));
            p.start_day = utc_day_number(*ts);
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ProfileError(fmt::format("invalid profile: {}", e.what()));
    }
}

nlohmann::ordered_json profile_to_json(const SynthProfile& p) {
    nlohmann::ordered_json j;
    j["n_test_cases"] = p.n_test_cases;
    j["horizon_days"] = p.horizon_days;
    if (const auto* batches = std::get_if<BatchCreation>(&p.creation)) {
        j["creation"] = {{"type", "batches"}, {"days", batches->days}};
    } else {
        j["creation"] = {{"type", "uniform"}};
    }
    j["activation"] = rate_to_json(p.activation);
    j["hazard"] = rate_to_json(p.hazard);
    j["sessions"] = p.sessions == SessionMode::Nightly ? "nightly" : "none";
    j["seed"] = p.seed;
    j["start_date"] = format_timestamp(timestamp_from_day(p.start_day)).substr(0, 10);
    return j;
}

nlohmann::ordered_json ground_truth_json(const GroundTruth& truth, std::size_t executions) {
    nlohmann::ordered_json j;
    j["profile"] = profile_to_json(truth.profile);
    if (truth.analytic_half_life_days) {
        j["analytic_half_life_days"] = *truth.analytic_half_life_days;
    } else {
        j["analytic_half_life_days"] = nullptr;
    }
    j["executions"] = executions;
    j["prng"] = "xoshiro256** seeded with four successive splitmix64 outputs of the seed";
    return j;
}

SynthResult generate(const SynthProfile& profile) {
    using namespace std::chrono;
    validate_profile(profile);

    Xoshiro256 rng(profile.seed);
    const auto width = static_cast<int>(fmt::format("{}", profile.n_test_cases - 1).size());
    std::vector<CreationRecord> creations;
    std::vector<ExecutionRecord> executions;
    creations.reserve(profile.n_test_cases);

    for (std::size_t i = 0; i < profile.n_test_cases; ++i) {
        std::string name = fmt::format("T-{:0{}d}", i, width);
        std::int64_t created = 0;
        if (const auto* batches = std::get_if<BatchCreation>(&profile.creation)) {
            created = batches->days[i % batches->days.size()];
        } else {
            created = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(profile.horizon_days)));
        }
        creations.push_back({name, timestamp_from_day(profile.start_day + created, hours{9})});

        const seconds run_offset = hours{20} + seconds{static_cast<long long>(i % 3600)};
        for (std::int64_t day = created; day < profile.horizon_days; ++day) {
            const auto age = static_cast<double>(day - created);
            if (!(rng.uniform() < evaluate(profile.activation, age))) continue;
            const Outcome outcome = rng.uniform() < evaluate(profile.hazard, age) ? Outcome::Fail : Outcome::Pass;
            ExecutionRecord e{name, timestamp_from_day(profile.start_day + day, run_offset), outcome, std::nullopt};
            if (profile.sessions == SessionMode::Nightly) e.session_start = timestamp_from_day(profile.start_day + day, hours{20});
            executions.push_back(std::move(e));
        }
    }

    GroundTruth truth{profile, analytic_half_life(profile.hazard)};
    return SynthResult{validate_dataset(std::move(creations), std::move(executions)), std::move(truth)};
}

void write_synth(const SynthResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error(fmt::format("cannot write {}", (dir / name).string()));
        return out;
    };
    {
        auto out = open("creations.csv");
        write_creations(out, result.dataset.creations());
    }
    {
        auto out = open("executions.csv");
        write_executions(out, result.dataset.executions());
    }
    auto out = open("ground_truth.json");
    out << ground_truth_json(result.truth, result.dataset.executions().size()).dump(2) << '\n';
}

}  // namespace tcage
