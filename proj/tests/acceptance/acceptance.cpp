// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: tcage_acceptance [work_dir]

#include "tcage/cli.hpp"
#include "tcage/curves.hpp"
#include "tcage/lifespan.hpp"
#include "tcage/prng.hpp"
#include "tcage/regfit.hpp"
#include "tcage/smoothing.hpp"
#include "tcage/synth.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/property.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace tcage;
using tcage::testing::check_property;
using tcage::testing::require;

namespace {

struct Outcome_ {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tcage");
    std::ostringstream out, err;
    return run_cli(args, out, err);
}

// 1 -------------------------------------------------------------------------
Outcome_ oracle_equivalence() {
    const auto start = Clock::now();
    auto r = check_property(200, 1001, [](std::mt19937_64& rng) {
        const auto d = tcage::testing::random_tiny_dataset(rng, 10, 30);
        const auto table = determine_death(d, GracePeriod{std::uniform_int_distribution<int>(0, 40)(rng)});
        const auto brute = tcage::testing::brute_force_curves(d);
        const auto act = activation_series(d, table);
        const auto hz = hazard_series(d, table);
        require(act.points.size() == brute.activation.size(), "activation length differs");
        for (const auto& p : act.points) {
            require(brute.activation.at(p.age_days) == tcage::testing::CountPair{p.numerator, p.denominator},
                    fmt::format("activation counts differ at age {}", p.age_days));
        }
        require(hz.points.size() == brute.hazard.size(), "hazard length differs");
        for (const auto& p : hz.points) {
            require(brute.hazard.at(p.age_days) == tcage::testing::CountPair{p.numerator, p.denominator},
                    fmt::format("hazard counts differ at age {}", p.age_days));
        }
    });
    const double secs = seconds_since(start);
    if (!r.ok) return {false, r.message};
    return {secs < 5.0, fmt::format("{} datasets identical to enumeration in {:.2f} s (limit 5 s)", r.cases_run, secs)};
}

// 2 -------------------------------------------------------------------------
Outcome_ d1_values() {
    const auto d1 = tcage::testing::make_d1();
    std::vector<std::string> bad;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) bad.emplace_back(what);
    };
    const auto strict = determine_death(d1, GracePeriod{0});
    expect(strict.tm_day == 3, "tM_day = 3");
    expect(strict.spans.size() == 2 && strict.spans[0].dead && !strict.spans[1].dead, "c1 dead, c2 alive");
    expect(strict.spans[0].terminal_age_days() == 2 && strict.spans[1].terminal_age_days() == 2, "terminal ages 2, 2");
    const auto s = aliveness_summary(strict.spans);
    expect(s.total == 2 && s.dead == 1 && s.mean_terminal_age_days == 2.0, "summary total 2, dead 1, mean 2");
    const auto hist = age_distribution(strict.spans, 1);
    expect(std::any_of(hist.begin(), hist.end(), [](const HistogramBin& b) { return b.start_day == 2 && b.count == 2; }),
           "histogram bin[2] = 2");
    const auto growth = growth_curve(strict);
    std::vector<std::size_t> counts;
    for (const auto& g : growth) counts.push_back(g.alive);
    expect(counts == std::vector<std::size_t>{1, 2, 2, 1}, "growth curve [1,2,2,1]");

    const auto act = activation_series(d1, strict);
    expect(act.points.size() >= 2 && act.points[0].numerator == 2 && act.points[0].denominator == 2 &&
               act.points[0].rate == 1.0,
           "activation(0) = 2/2");
    expect(act.points.size() >= 2 && act.points[1].numerator == 1 && act.points[1].denominator == 2 &&
               act.points[1].rate == 0.5,
           "activation(1) = 1/2");
    const auto hz = hazard_series(d1, strict);
    expect(hz.points.size() >= 2 && hz.points[0].rate == 0.5, "hazard(0) = 0.5");
    expect(hz.points.size() >= 2 && hz.points[1].rate == 1.0 && hz.points[1].denominator == 1, "hazard(1) = 1/1");
    const auto flagged = apply_min_support(hz, 10);
    expect(std::all_of(flagged.points.begin(), flagged.points.end(), [](const RatePoint& p) { return p.low_support; }),
           "min support 10 flags every point");
    const auto wall = wallclock_series(d1, strict, RateKind::Hazard);
    expect(wall.points.size() >= 2 && wall.points[1].age_days == 1 && wall.points[1].rate == 1.0,
           "wall-clock hazard(day 1) = 1.0");

    if (!bad.empty()) {
        std::string msg = "mismatch:";
        for (const auto& b : bad) msg += " [" + b + "]";
        return {false, msg};
    }
    return {true, "life spans, summary, histogram, growth, activation and hazard match hand enumeration"};
}

// 3 -------------------------------------------------------------------------
Outcome_ least_squares_exactness() {
    const std::vector<std::vector<double>> truths{
        {0.145, -0.0002},
        {0.145, -0.0002, 9e-8},
        {0.12, -0.0003, 4e-7, -3e-10},
    };
    double worst_coef = 0.0, worst_rse = 0.0;
    for (const auto& truth : truths) {
        std::vector<double> x, y;
        for (int t = 0; t <= 500; ++t) {
            double v = 0.0;
            for (std::size_t k = truth.size(); k-- > 0;) v = v * t + truth[k];
            x.push_back(t);
            y.push_back(v);
        }
        const auto m = fit_polynomial(x, y, static_cast<int>(truth.size()) - 1);
        for (std::size_t k = 0; k < truth.size(); ++k) worst_coef = std::max(worst_coef, std::abs(m.coefficients[k] - truth[k]));
        worst_rse = std::max(worst_rse, m.residual_std_error);
    }
    return {worst_coef < 1e-9 && worst_rse < 1e-9,
            fmt::format("k = 1..3: max coefficient error {:.3g}, max residual std error {:.3g} (limit 1e-9)", worst_coef,
                        worst_rse)};
}

// 4 -------------------------------------------------------------------------
Outcome_ half_life_closed_forms() {
    FitModel lin;
    lin.coefficients = {11.4, -0.01};
    const auto h = half_life(lin, 3650);
    if (!h || h->days != 570) return {false, fmt::format("linear 11.4 - 0.01t gave {}", h ? h->days : -1)};

    Xoshiro256 rng(4);
    int matched = 0;
    std::string miss;
    for (int i = 0; i < 20; ++i) {
        const double b = 0.001 + 0.099 * rng.uniform();
        FitModel e;
        e.family = ModelFamily::Exponential;
        e.coefficients = {0.1 + rng.uniform(), -b};
        const auto he = half_life(e, 100000);
        const int expected = static_cast<int>(std::ceil(std::log(2.0) / b));
        if (he && he->days == expected) {
            ++matched;
        } else if (miss.empty()) {
            miss = fmt::format(" (b = {} gave {}, expected {})", b, he ? he->days : -1, expected);
        }
    }
    return {matched == 20, fmt::format("linear -> 570 days; exponential {}/20 equal ceil(ln2/b){}", matched, miss)};
}

// 5 -------------------------------------------------------------------------
Outcome_ estimator_recovery() {
    const auto start = Clock::now();
    const QuadraticRate q{0.12, -0.0003, 1.875e-7};  // 0.12 (1 - t/800)^2
    const int truth = analytic_half_life(q).value_or(-1);
    double mean_q = 0.0;
    for (int t = 0; t <= 364; ++t) mean_q += evaluate(q, t);
    mean_q /= 365.0;

    bool ok = truth == 235;
    std::string detail = fmt::format("analytic {} d, mean q(year 0) {:.4f};", truth, mean_q);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthProfile p;
        p.n_test_cases = 1000;
        p.horizon_days = 500;
        p.creation = BatchCreation{{0}};
        p.activation = ConstantRate{0.8};
        p.hazard = q;
        p.seed = seed;
        const auto r = generate(p);
        const auto table = determine_death(r.dataset, GracePeriod{90});
        const auto hz = apply_min_support(hazard_series(r.dataset, table), 10);
        const auto model = fit_polynomial(hz, 2);
        const auto h = half_life(model, 3650);
        const auto years = yearly_failure_rates(hz, YearlyMode::Pooled);
        const double y0 = !years.empty() && years[0].rate ? *years[0].rate : -1.0;
        const bool h_ok = h && std::abs(h->days - truth) <= 0.10 * truth;
        const bool y_ok = std::abs(y0 - mean_q) <= 0.01;
        ok = ok && h_ok && y_ok;
        detail += fmt::format("{}seed {}: {} d, {:.4f}{}", seed == 1 ? " " : ", ", seed, h ? h->days : -1, y0, h_ok && y_ok ? "" : " (out)");
    }
    const double secs = seconds_since(start);
    ok = ok && secs < 60.0;
    detail += fmt::format("; {:.1f} s", secs);
    return {ok, detail};
}

// 6 -------------------------------------------------------------------------
Outcome_ property_suites() {
    struct Suite {
        const char* name;
        std::function<void(std::mt19937_64&)> body;
    };
    const std::vector<Suite> suites{
        {"grace monotonicity",
         [](std::mt19937_64& rng) {
             const auto d = tcage::testing::random_tiny_dataset(rng);
             const int g1 = std::uniform_int_distribution<int>(0, 30)(rng);
             const int g2 = g1 + std::uniform_int_distribution<int>(0, 30)(rng);
             const auto a = determine_death(d, GracePeriod{g1});
             const auto b = determine_death(d, GracePeriod{g2});
             for (std::size_t i = 0; i < a.spans.size(); ++i) {
                 require(!b.spans[i].dead || a.spans[i].dead, "dead at the larger grace only");
             }
         }},
        {"activation denominator non-increasing",
         [](std::mt19937_64& rng) {
             const auto d = tcage::testing::random_tiny_dataset(rng);
             const auto s = activation_series(d, determine_death(d, GracePeriod{7}));
             for (std::size_t i = 1; i < s.points.size(); ++i) {
                 require(s.points[i].denominator <= s.points[i - 1].denominator, "denominator increased");
             }
         }},
        {"rates within [0,1]",
         [](std::mt19937_64& rng) {
             const auto d = tcage::testing::random_tiny_dataset(rng);
             const auto t = determine_death(d, GracePeriod{3});
             for (const auto& s : {activation_series(d, t), hazard_series(d, t),
                                   wallclock_series(d, t, RateKind::Activation), wallclock_series(d, t, RateKind::Hazard)}) {
                 for (const auto& p : s.points) require(p.rate >= 0.0 && p.rate <= 1.0, "rate outside [0,1]");
             }
         }},
        {"life spans invariant under outcome permutation",
         [](std::mt19937_64& rng) {
             const auto d = tcage::testing::random_tiny_dataset(rng);
             auto runs = d.executions();
             std::vector<tcage::Outcome> outcomes;
             for (const auto& e : runs) outcomes.push_back(e.outcome);
             std::shuffle(outcomes.begin(), outcomes.end(), rng);
             for (std::size_t i = 0; i < runs.size(); ++i) runs[i].outcome = outcomes[i];
             const auto shuffled = validate_dataset(d.creations(), runs);
             require(determine_death(d, GracePeriod{4}).spans == determine_death(shuffled, GracePeriod{4}).spans,
                     "life spans changed");
         }},
        {"smoother linearity and line reproduction",
         [](std::mt19937_64& rng) {
             const std::size_t n = std::uniform_int_distribution<std::size_t>(8, 80)(rng);
             std::uniform_real_distribution<double> u(0.0, 1.0);
             std::vector<double> x, y1, y2, sum, line;
             const double a = u(rng), b = u(rng) - 0.5, c = 0.01 * (u(rng) - 0.5);
             for (std::size_t i = 0; i < n; ++i) {
                 x.push_back(static_cast<double>(i * 2 + (i % 3)));
                 y1.push_back(u(rng));
                 y2.push_back(u(rng));
                 sum.push_back(a * y1.back() + b * y2.back());
                 line.push_back(0.3 + c * x.back());
             }
             SmoothConfig cfg;
             cfg.span = 0.1 + 0.9 * u(rng);
             cfg.degree = 1 + static_cast<int>(u(rng) * 2);
             const auto f1 = loess(x, y1, cfg), f2 = loess(x, y2, cfg), fs = loess(x, sum, cfg), fl = loess(x, line, cfg);
             for (std::size_t i = 0; i < n; ++i) {
                 require(std::abs(fs.points[i].fitted - (a * f1.points[i].fitted + b * f2.points[i].fitted)) <= 1e-9,
                         "not linear");
                 require(std::abs(fl.points[i].fitted - line[i]) <= 1e-9, "line not reproduced");
             }
         }},
        {"nested-model RSS monotone",
         [](std::mt19937_64& rng) {
             const std::size_t n = std::uniform_int_distribution<std::size_t>(6, 300)(rng);
             std::uniform_real_distribution<double> u(0.0, 1.0);
             std::vector<double> x, y;
             double age = 0.0;
             for (std::size_t i = 0; i < n; ++i) {
                 x.push_back(age);
                 y.push_back(0.2 * u(rng));
                 age += 1.0 + std::floor(3 * u(rng));
             }
             double prev = std::numeric_limits<double>::infinity();
             for (int k = 1; k <= 3; ++k) {
                 const double rss = fit_polynomial(x, y, k).rss;
                 require(rss <= prev * (1 + 1e-12) + 1e-15, fmt::format("degree {} fits worse", k));
                 prev = rss;
             }
         }},
    };
    std::string detail;
    bool ok = true;
    std::uint64_t seed = 600;
    for (const auto& s : suites) {
        const auto r = check_property(150, seed++, s.body);
        ok = ok && r.ok && r.cases_run >= 100;
        detail += fmt::format("{}{} {}/150", detail.empty() ? "" : "; ", s.name, r.cases_run);
        if (!r.ok) detail += " FAILED " + r.message;
    }
    return {ok, detail};
}

// 7 -------------------------------------------------------------------------
Outcome_ determinism(const fs::path& work) {
    const auto a = work / "det_a", b = work / "det_b";
    fs::remove_all(a);
    fs::remove_all(b);
    SynthProfile p;
    p.n_test_cases = 150;
    p.horizon_days = 300;
    p.activation = RampRate{0.4, 0.9, 60};
    p.hazard = ExponentialDecayRate{0.15, 0.006};
    p.seed = 2024;
    fs::create_directories(work);
    const auto profile = work / "det_profile.json";
    std::ofstream(profile) << profile_to_json(p).dump(2);
    for (const auto& dir : {a, b}) {
        if (cli({"synth", "--profile", profile.string(), "--out-dir", dir.string()}) != 0) return {false, "synth failed"};
    }
    std::vector<std::string> differ;
    for (const char* f : {"creations.csv", "executions.csv", "ground_truth.json"}) {
        if (slurp(a / f) != slurp(b / f)) differ.emplace_back(f);
    }
    for (const auto& [dir, out] : {std::pair{a, a / "report"}, std::pair{a, b / "report"}}) {
        if (cli({"analyze", "--creations", (dir / "creations.csv").string(), "--executions",
                 (dir / "executions.csv").string(), "--out-dir", out.string(), "--exponential"}) != 0) {
            return {false, "analyze failed"};
        }
    }
    for (const char* f : {"report.json", "activation.svg", "hazard.svg"}) {
        if (slurp(a / "report" / f) != slurp(b / "report" / f) || slurp(a / "report" / f).empty()) differ.emplace_back(f);
    }
    if (!differ.empty()) {
        std::string msg = "differs:";
        for (const auto& d : differ) msg += " " + d;
        return {false, msg};
    }
    return {true, "synth CSVs, report.json and SVGs byte-identical across two runs"};
}

// 8 -------------------------------------------------------------------------
Outcome_ grace_insensitivity(const fs::path& work) {
    // Every test case runs daily, so no alive test case has a gap near 30 days;
    // the first half of the cohort is retired at day 150.
    SynthProfile p;
    p.n_test_cases = 200;
    p.horizon_days = 400;
    p.creation = UniformCreation{};
    p.activation = ConstantRate{1.0};
    p.hazard = ExponentialDecayRate{0.1, 0.004};
    p.seed = 8;
    auto r = generate(p);
    auto runs = r.dataset.executions();
    std::set<std::string> retired;
    for (std::size_t i = 0; i < r.dataset.creations().size(); i += 2) retired.insert(r.dataset.creations()[i].test_case);
    const auto cutoff = r.dataset.t1() + std::chrono::days{150};
    std::erase_if(runs, [&](const ExecutionRecord& e) { return retired.count(e.test_case) && e.execution_time > cutoff; });
    auto creations = r.dataset.creations();
    const auto dataset = validate_dataset(creations, runs);
    SynthResult edited{dataset, r.truth};
    const auto dir = work / "grace";
    fs::remove_all(dir);
    write_synth(edited, dir);

    auto run = [&](const char* grace) {
        std::vector<std::string> args{"tcage", "lifespan", "--creations", (dir / "creations.csv").string(),
                                      "--executions", (dir / "executions.csv").string(), "--grace-days", grace};
        std::ostringstream out, err;
        const int status = run_cli(args, out, err);
        auto j = status == 0 ? nlohmann::json::parse(out.str()) : nlohmann::json{};
        j.erase("grace_days");
        return j;
    };
    const auto g30 = run("30");
    const auto g90 = run("90");
    if (g30.is_null() || g30.empty()) return {false, "lifespan subcommand failed"};
    const bool same = g30 == g90;
    return {same && g30["dead"].get<int>() > 0,
            fmt::format("grace 30: {}; grace 90: {}", g30.dump(), g90.dump())};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "tcage_acceptance";
    fs::create_directories(work);

    const std::vector<std::pair<const char*, std::function<Outcome_()>>> criteria{
        {"oracle equivalence on 200 tiny datasets", oracle_equivalence},
        {"hand-enumerated dataset D1", d1_values},
        {"least-squares exactness, degrees 1-3", least_squares_exactness},
        {"half-life closed forms", half_life_closed_forms},
        {"estimator recovery on synthetic data", estimator_recovery},
        {"property suites", property_suites},
        {"determinism of synth and analyze", [&] { return determinism(work); }},
        {"grace 30 vs 90 on a regularly executed dataset", [&] { return grace_insensitivity(work); }},
    };

    int failures = 0;
    int index = 1;
    for (const auto& [name, check] : criteria) {
        Outcome_ result;
        try {
            result = check();
        } catch (const std::exception& e) {
            result = {false, fmt::format("exception: {}", e.what())};
        }
        if (!result.pass) ++failures;
        fmt::print("[{}] {}. {}: {}\n", result.pass ? "PASS" : "FAIL", index++, name, result.detail);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
