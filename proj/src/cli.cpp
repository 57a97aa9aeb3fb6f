#include "tcage/cli.hpp"

#include "tcage/report.hpp"
#include "tcage/synth.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

namespace tcage {

namespace {

struct Options {
    RunConfig config;
    InputPaths paths;
    std::vector<std::string> map_entries;
    std::string map_file;
    std::string infer = "infer-missing";
    std::string yearly_mode = "pooled";
    std::vector<std::string> formats{"csv", "json", "svg"};
    bool no_filter = false;
    std::string creations;
    std::string out_path;
    std::string out_dir;
    bool wallclock = false;
    std::string profile;
    std::optional<std::uint64_t> seed;
};

void add_input_options(CLI::App& cmd, Options& o) {
    cmd.add_option("--creations", o.creations, "creations.csv (test_case,creation_time)");
    cmd.add_option("--executions", o.paths.executions, "executions.csv (test_case,execution_time,outcome,session_start)")
        ->required();
    cmd.add_option("--infer", o.infer, "creation handling: strict | infer-missing | infer-all")
        ->check(CLI::IsMember({"strict", "infer-missing", "infer-all"}));
    cmd.add_option("--map", o.map_entries, "outcome mapping raw_label=PASS|FAIL|DROP (repeatable)");
    cmd.add_option("--map-file", o.map_file, "file with one raw_label=PASS|FAIL|DROP per line");
    cmd.add_flag("--no-filter-allfail", o.no_filter, "keep sessions in which every execution failed");
    cmd.add_option("--min-session-size", o.config.min_session_size, "smallest all-fail session that is removed")
        ->check(CLI::PositiveNumber);
}

void add_grace_option(CLI::App& cmd, Options& o) {
    cmd.add_option("--grace-days", o.config.grace_days, "grace period in days")->check(CLI::NonNegativeNumber);
}

void add_support_option(CLI::App& cmd, Options& o) {
    cmd.add_option("--min-support", o.config.min_support, "minimum test cases per day for smoothing and fitting")
        ->check(CLI::PositiveNumber);
}

void add_fit_options(CLI::App& cmd, Options& o) {
    cmd.add_option("--degrees", o.config.degrees, "polynomial degrees, e.g. 1,2,3")
        ->delimiter(',')
        ->check(CLI::Range(1, 3));
    cmd.add_flag("--exponential", o.config.exponential, "also fit a*exp(b*t)");
    cmd.add_option("--grid-max", o.config.grid_max, "last day scanned for the half-life")->check(CLI::NonNegativeNumber);
    cmd.add_option("--p-threshold", o.config.p_threshold, "significance threshold for coefficient flags");
    cmd.add_flag("--percent", o.config.percent, "present rates in percent");
}

void finish_config(Options& o) {
    if (!o.creations.empty()) o.paths.creations = o.creations;
    o.config.filter_allfail = !o.no_filter;
    o.config.infer = *parse_infer_mode(o.infer);
    o.config.yearly_mode = *parse_yearly_mode(o.yearly_mode);
    if (!o.map_file.empty()) {
        std::ifstream in(o.map_file);
        if (!in) throw Error(fmt::format("cannot open {}", o.map_file));
        o.config.outcome_policy.load(in);
    }
    for (const auto& entry : o.map_entries) o.config.outcome_policy.apply_entry(entry);
    o.config.formats.clear();
    for (const auto& f : o.formats) {
        if (f == "csv") o.config.formats.insert(OutputFormat::Csv);
        if (f == "json") o.config.formats.insert(OutputFormat::Json);
        if (f == "svg") o.config.formats.insert(OutputFormat::Svg);
    }
}

void print_warnings(const Diagnostics& diagnostics, std::ostream& err) {
    for (const auto& w : diagnostics.warnings) err << "warning: " << w << '\n';
}

std::ostream& output_stream(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return fallback;
    file.open(path, std::ios::binary);
    if (!file) throw Error(fmt::format("cannot write {}", path));
    return file;
}

int cmd_validate(Options& o, std::ostream& out, std::ostream& err) {
    auto loaded = load_dataset(o.paths, o.config);
    print_warnings(loaded.diagnostics, err);
    const auto& d = loaded.dataset;
    nlohmann::ordered_json j{{"test_cases", d.creations().size()},
                             {"executions", d.executions().size()},
                             {"t1", format_timestamp(d.t1())},
                             {"tM", format_timestamp(d.tM())},
                             {"tM_day", d.tM_day()},
                             {"dropped_outcomes", loaded.diagnostics.dropped_outcomes},
                             {"rejected_before_creation", loaded.diagnostics.rejected_before_creation},
                             {"duplicates_removed", loaded.diagnostics.duplicates_removed},
                             {"removed_allfail_sessions", loaded.summary.removed_sessions}};
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_lifespan(Options& o, std::ostream& out, std::ostream& err) {
    auto loaded = load_dataset(o.paths, o.config);
    const auto table = determine_death(loaded.dataset, GracePeriod{o.config.grace_days}, &loaded.diagnostics);
    print_warnings(loaded.diagnostics, err);
    auto j = aliveness_json(aliveness_summary(table.spans));
    j["grace_days"] = o.config.grace_days;
    out << j.dump(2) << '\n';
    if (!o.out_dir.empty()) {
        std::filesystem::create_directories(o.out_dir);
        std::ofstream hist(std::filesystem::path(o.out_dir) / "age_histogram.csv", std::ios::binary);
        write_histogram_csv(hist, age_distribution(table.spans, o.config.bin_width_days));
        std::ofstream growth(std::filesystem::path(o.out_dir) / "growth_curve.csv", std::ios::binary);
        write_growth_csv(growth, growth_curve(table));
        std::ofstream spans(std::filesystem::path(o.out_dir) / "lifespans.csv", std::ios::binary);
        write_lifespans_csv(spans, table);
        if (!hist || !growth || !spans) throw Error(fmt::format("cannot write into {}", o.out_dir));
    }
    return 0;
}

int cmd_series(Options& o, RateKind kind, std::ostream& out, std::ostream& err) {
    auto loaded = load_dataset(o.paths, o.config);
    const auto table = determine_death(loaded.dataset, GracePeriod{o.config.grace_days}, &loaded.diagnostics);
    print_warnings(loaded.diagnostics, err);
    RateSeries series;
    if (o.wallclock) {
        series = wallclock_series(loaded.dataset, table, kind);
    } else {
        series = kind == RateKind::Activation ? activation_series(loaded.dataset, table)
                                              : hazard_series(loaded.dataset, table);
    }
    series = apply_min_support(std::move(series), o.config.min_support);
    std::ofstream file;
    write_series_csv(output_stream(o.out_path, file, out), series);
    return 0;
}

int cmd_fit(Options& o, std::ostream& out, std::ostream& err) {
    auto loaded = load_dataset(o.paths, o.config);
    const auto table = determine_death(loaded.dataset, GracePeriod{o.config.grace_days}, &loaded.diagnostics);
    print_warnings(loaded.diagnostics, err);
    const auto hazard = apply_min_support(hazard_series(loaded.dataset, table), o.config.min_support);
    const auto models = fit_report(hazard, FitFamilies{o.config.degrees, o.config.exponential}, o.config.grid_max,
                                   o.config.p_threshold);
    nlohmann::ordered_json j{{"schema_version", "1"},
                             {"rate_scale", o.config.percent ? "percent" : "fraction"},
                             {"min_support", o.config.min_support},
                             {"grid_max", o.config.grid_max},
                             {"models", models_json(models, o.config.percent)}};
    std::ofstream file;
    output_stream(o.out_path, file, out) << j.dump(2) << '\n';
    return 0;
}

int cmd_analyze(Options& o, std::ostream& out, std::ostream& err) {
    auto loaded = load_dataset(o.paths, o.config);
    const auto analysis = analyze(loaded.dataset, o.config, &loaded.diagnostics);
    print_warnings(loaded.diagnostics, err);
    write_bundle(o.out_dir, loaded, analysis, o.config);
    out << fmt::format("report written to {}\n", o.out_dir);
    return 0;
}

int cmd_synth(Options& o, std::ostream& out) {
    std::ifstream in(o.profile);
    if (!in) throw Error(fmt::format("cannot open {}", o.profile));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ProfileError(fmt::format("{}: {}", o.profile, e.what()));
    }
    auto profile = profile_from_json(j);
    if (o.seed) profile.seed = *o.seed;
    const auto result = generate(profile);
    write_synth(result, o.out_dir);
    out << fmt::format("{} test cases, {} executions written to {}\n", result.dataset.creations().size(),
                       result.dataset.executions().size(), o.out_dir);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Test case aging analysis: life spans, activation and failure-rate curves, half-life"};
    app.require_subcommand(1);
    Options o;

    auto* validate = app.add_subcommand("validate", "ingest and validate CEO logs");
    add_input_options(*validate, o);

    auto* lifespan = app.add_subcommand("lifespan", "death determination and aliveness summary");
    add_input_options(*lifespan, o);
    add_grace_option(*lifespan, o);
    lifespan->add_option("--bin-width", o.config.bin_width_days, "age histogram bin width in days")
        ->check(CLI::PositiveNumber);
    lifespan->add_option("--out-dir", o.out_dir, "write age_histogram.csv, growth_curve.csv, lifespans.csv here");

    auto* activation = app.add_subcommand("activation", "activation rate per age (CSV)");
    auto* hazard = app.add_subcommand("hazard", "failure rate per age (CSV)");
    for (auto* cmd : {activation, hazard}) {
        add_input_options(*cmd, o);
        add_grace_option(*cmd, o);
        add_support_option(*cmd, o);
        cmd->add_flag("--wallclock", o.wallclock, "use wall-clock days instead of age");
        cmd->add_option("--out", o.out_path, "output file (default stdout)");
    }

    auto* fit = app.add_subcommand("fit", "fit decay models to the failure-rate curve (JSON)");
    add_input_options(*fit, o);
    add_grace_option(*fit, o);
    add_support_option(*fit, o);
    add_fit_options(*fit, o);
    fit->add_option("--out", o.out_path, "output file (default stdout)");

    auto* analyze_cmd = app.add_subcommand("analyze", "full pipeline; writes report.json, CSV series and SVG plots");
    add_input_options(*analyze_cmd, o);
    add_grace_option(*analyze_cmd, o);
    add_support_option(*analyze_cmd, o);
    add_fit_options(*analyze_cmd, o);
    analyze_cmd->add_option("--span", o.config.span, "smoothing span")->check(CLI::Range(1e-9, 1.0));
    analyze_cmd->add_option("--confidence", o.config.confidence, "confidence level of the smoothed band")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9));
    analyze_cmd->add_option("--smooth-degree", o.config.smooth_degree, "local polynomial degree")
        ->check(CLI::IsMember({1, 2}));
    analyze_cmd->add_option("--yearly-mode", o.yearly_mode, "pooled | mean_of_daily")
        ->check(CLI::IsMember({"pooled", "mean_of_daily"}));
    analyze_cmd->add_option("--bin-width", o.config.bin_width_days, "age histogram bin width in days")
        ->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--formats", o.formats, "csv,json,svg")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    analyze_cmd->add_option("--out-dir", o.out_dir, "output directory")->required();

    auto* synth = app.add_subcommand("synth", "generate a synthetic CEO dataset from a profile");
    synth->add_option("--profile", o.profile, "profile JSON")->required();
    synth->add_option("--out-dir", o.out_dir, "output directory")->required();
    synth->add_option("--seed", o.seed, "override the profile seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (!synth->parsed()) finish_config(o);
        if (validate->parsed()) return cmd_validate(o, out, err);
        if (lifespan->parsed()) return cmd_lifespan(o, out, err);
        if (activation->parsed()) return cmd_series(o, RateKind::Activation, out, err);
        if (hazard->parsed()) return cmd_series(o, RateKind::Hazard, out, err);
        if (fit->parsed()) return cmd_fit(o, out, err);
        if (analyze_cmd->parsed()) return cmd_analyze(o, out, err);
        if (synth->parsed()) return cmd_synth(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace tcage
