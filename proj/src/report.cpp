#include "tcage/report.hpp"

#include "tcage/svg.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

namespace tcage {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open {}", path.string()));
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    return out;
}

nlohmann::ordered_json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

nlohmann::ordered_json series_summary(const RateSeries& series) {
    std::size_t supported = 0;
    for (const auto& p : series.points) supported += p.low_support ? 0 : 1;
    return {{"points", series.points.size()}, {"supported_points", supported}, {"min_support", series.min_support}};
}

}  // namespace

LoadedDataset prepare_dataset(std::vector<CreationRecord> creations, const std::vector<RawExecution>& rows,
                              const RunConfig& config) {
    Diagnostics diagnostics;
    IngestSummary summary;
    summary.creation_rows = creations.size();
    summary.execution_rows = rows.size();

    auto mapped = map_outcomes(rows, config.outcome_policy);
    diagnostics.dropped_outcomes = mapped.drop_count;
    if (mapped.drop_count > 0) {
        diagnostics.warn(fmt::format("{} execution row(s) with unmapped outcome labels dropped", mapped.drop_count));
    }
    auto all_creations = infer_creations(mapped.records, creations, config.infer);
    auto dataset = validate_dataset(std::move(all_creations), std::move(mapped.records), &diagnostics);
    if (config.filter_allfail) {
        auto filtered = filter_allfail_sessions(dataset, config.min_session_size);
        summary.removed_sessions = filtered.removed_sessions;
        summary.removed_session_executions = filtered.removed_executions;
        return LoadedDataset{std::move(filtered.dataset), std::move(diagnostics), summary};
    }
    return LoadedDataset{std::move(dataset), std::move(diagnostics), summary};
}

LoadedDataset load_dataset(const InputPaths& paths, const RunConfig& config) {
    std::vector<CreationRecord> creations;
    if (paths.creations) {
        auto in = open_input(*paths.creations);
        creations = parse_creations(in);
    }
    auto in = open_input(paths.executions);
    const auto rows = parse_executions(in);
    return prepare_dataset(std::move(creations), rows, config);
}

Analysis analyze(const CeoDataset& dataset, const RunConfig& config, Diagnostics* diagnostics) {
    Analysis a;
    a.life = determine_death(dataset, GracePeriod{config.grace_days}, diagnostics);
    a.aliveness = aliveness_summary(a.life.spans);
    a.histogram = age_distribution(a.life.spans, config.bin_width_days);
    a.growth = growth_curve(a.life);
    a.activation = apply_min_support(activation_series(dataset, a.life), config.min_support);
    a.hazard = apply_min_support(hazard_series(dataset, a.life), config.min_support);
    a.activation_smooth = smooth(a.activation, config.smooth_config());
    a.hazard_smooth = smooth(a.hazard, config.smooth_config());
    a.yearly = yearly_failure_rates(a.hazard, config.yearly_mode);
    a.models = fit_report(a.hazard, FitFamilies{config.degrees, config.exponential}, config.grid_max,
                          config.p_threshold);
    return a;
}

nlohmann::ordered_json aliveness_json(const AlivenessSummary& s) {
    return {{"total", s.total},
            {"dead", s.dead},
            {"dead_fraction", s.dead_fraction},
            {"mean_terminal_age_days", s.mean_terminal_age_days},
            {"sd_terminal_age_days", s.sd_terminal_age_days}};
}

std::string model_formula(const FitModel& model, bool percent) {
    const double scale = percent ? 100.0 : 1.0;
    if (model.family == ModelFamily::Exponential) {
        return fmt::format("{:.6g}*exp({:.6g}*t)", model.coefficients[0] * scale, model.coefficients[1]);
    }
    std::string out = fmt::format("{:.6g}", model.coefficients[0] * scale);
    for (std::size_t k = 1; k < model.coefficients.size(); ++k) {
        const double c = model.coefficients[k] * scale;
        out += fmt::format(" {} {:.6g}*t", c < 0 ? '-' : '+', std::abs(c));
        if (k > 1) out += fmt::format("^{}", k);
    }
    return out;
}

nlohmann::ordered_json models_json(const std::vector<ModelReport>& models, bool percent) {
    const double scale = percent ? 100.0 : 1.0;
    auto out = nlohmann::ordered_json::array();
    for (const auto& r : models) {
        const auto& m = r.model;
        nlohmann::ordered_json j;
        j["model"] = m.name();
        j["formula"] = model_formula(m, percent);
        j["family"] = m.family == ModelFamily::Exponential ? "exponential" : "polynomial";
        j["degree"] = m.degree;
        auto coefficients = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < m.coefficients.size(); ++k) {
            const bool rate_valued = m.family == ModelFamily::Polynomial || k == 0;
            coefficients.push_back(number_or_null(m.coefficients[k] * (rate_valued ? scale : 1.0)));
        }
        j["coefficients"] = coefficients;
        j["n"] = m.n;
        j["residual_std_error"] =
            number_or_null(m.residual_std_error * (m.log_scale_residuals ? 1.0 : scale));
        j["residual_scale"] = m.log_scale_residuals ? "log-rate" : (percent ? "percent" : "fraction");
        auto stats = nlohmann::ordered_json::array();
        for (const auto& s : m.coefficient_stats) {
            const double sc = m.family == ModelFamily::Polynomial ? scale : 1.0;
            stats.push_back({{"estimate", number_or_null(s.estimate * sc)},
                             {"std_error", number_or_null(s.std_error * sc)},
                             {"t_value", number_or_null(s.t_value)},
                             {"p_value", number_or_null(s.p_value)}});
        }
        j["coefficient_stats"] = stats;
        if (m.family == ModelFamily::Exponential) j["excluded_nonpositive_points"] = m.excluded_points;
        j["insignificant_coefficients"] = r.insignificant;
        if (r.half_life) {
            j["half_life_days"] = r.half_life->days;
            j["half_life_months"] = r.half_life->months;
        } else {
            j["half_life_days"] = nullptr;
            j["half_life_months"] = nullptr;
        }
        out.push_back(std::move(j));
    }
    return out;
}

nlohmann::ordered_json report_json(const LoadedDataset& loaded, const Analysis& a, const RunConfig& config) {
    const auto& d = loaded.dataset;
    const auto& diag = loaded.diagnostics;
    nlohmann::ordered_json j;
    j["schema_version"] = "1";

    j["config"] = {{"grace_days", config.grace_days},
                   {"min_support", config.min_support},
                   {"filter_allfail", config.filter_allfail},
                   {"min_session_size", config.min_session_size},
                   {"span", config.span},
                   {"smooth_degree", config.smooth_degree},
                   {"confidence", config.confidence},
                   {"degrees", config.degrees},
                   {"exponential", config.exponential},
                   {"grid_max", config.grid_max},
                   {"p_threshold", config.p_threshold},
                   {"rate_scale", config.percent ? "percent" : "fraction"},
                   {"yearly_mode", std::string(to_string(config.yearly_mode))},
                   {"infer", std::string(to_string(config.infer))},
                   {"bin_width_days", config.bin_width_days}};

    j["ingest"] = {{"creation_rows", loaded.summary.creation_rows},
                   {"execution_rows", loaded.summary.execution_rows},
                   {"test_cases", d.creations().size()},
                   {"executions", d.executions().size()},
                   {"dropped_outcomes", diag.dropped_outcomes},
                   {"rejected_before_creation", diag.rejected_before_creation},
                   {"duplicates_removed", diag.duplicates_removed},
                   {"removed_allfail_sessions", loaded.summary.removed_sessions},
                   {"removed_allfail_executions", loaded.summary.removed_session_executions},
                   {"t1", format_timestamp(d.t1())},
                   {"tM", format_timestamp(d.tM())},
                   {"tM_day", d.tM_day()}};

    auto aliveness = aliveness_json(a.aliveness);
    aliveness["grace_days"] = a.life.grace_days;
    aliveness["unexecuted_test_cases"] = diag.unexecuted_test_cases;
    j["aliveness"] = aliveness;

    j["activation"] = series_summary(a.activation);
    j["hazard"] = series_summary(a.hazard);

    const double scale = config.percent ? 100.0 : 1.0;
    auto years = nlohmann::ordered_json::array();
    for (const auto& y : a.yearly) {
        years.push_back({{"year_index", y.year_index},
                         {"age_from", y.year_index * 365},
                         {"age_to", y.year_index * 365 + 364},
                         {"rate", y.rate ? nlohmann::ordered_json(*y.rate * scale) : nlohmann::ordered_json(nullptr)},
                         {"fail_days", y.fail_days},
                         {"execution_days", y.execution_days}});
    }
    j["yearly_failure_rates"] = {{"mode", std::string(to_string(config.yearly_mode))}, {"years", years}};

    j["smoothing"] = {{"method", "local polynomial, tricube weights"},
                      {"band", "normal-approximation pointwise band from equivalent-kernel weights"},
                      {"span", config.span},
                      {"degree", config.smooth_degree},
                      {"confidence", config.confidence},
                      {"z", a.hazard_smooth.z},
                      {"activation_window", a.activation_smooth.window},
                      {"activation_sigma", a.activation_smooth.sigma},
                      {"hazard_window", a.hazard_smooth.window},
                      {"hazard_sigma", a.hazard_smooth.sigma}};

    j["models"] = models_json(a.models, config.percent);
    return j;
}

void write_series_csv(std::ostream& out, const RateSeries& series) {
    out << "age_days,numerator,denominator,rate,low_support\n";
    for (const auto& p : series.points) {
        out << fmt::format("{},{},{},{},{}\n", p.age_days, p.numerator, p.denominator, p.rate, p.low_support ? 1 : 0);
    }
}

void write_smooth_csv(std::ostream& out, const SmoothedCurve& curve) {
    out << "age_days,fitted,ci_low,ci_high\n";
    for (const auto& p : curve.points) out << fmt::format("{},{},{},{}\n", p.age_days, p.fitted, p.ci_low, p.ci_high);
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins) {
    out << "day,count\n";
    for (const auto& b : bins) out << fmt::format("{},{}\n", b.start_day, b.count);
}

void write_growth_csv(std::ostream& out, const std::vector<GrowthPoint>& curve) {
    out << "day,count\n";
    for (const auto& p : curve) out << fmt::format("{},{}\n", p.day, p.alive);
}

void write_lifespans_csv(std::ostream& out, const LifeTable& table) {
    out << "test_case,t0,t_omega,terminal_age_days,dead\n";
    for (const auto& s : table.spans) {
        out << fmt::format("{},{},{},{},{}\n", s.test_case, s.t0, s.t_omega, s.terminal_age_days(), s.dead ? 1 : 0);
    }
}

void write_bundle(const std::filesystem::path& dir, const LoadedDataset& loaded, const Analysis& a,
                  const RunConfig& config) {
    std::filesystem::create_directories(dir);
    if (config.formats.contains(OutputFormat::Json)) {
        auto out = open_output(dir / "report.json");
        out << report_json(loaded, a, config).dump(2) << '\n';
    }
    if (config.formats.contains(OutputFormat::Csv)) {
        auto csv = [&](const char* name, auto&& writer) {
            auto out = open_output(dir / name);
            writer(out);
        };
        csv("activation.csv", [&](std::ostream& o) { write_series_csv(o, a.activation); });
        csv("hazard.csv", [&](std::ostream& o) { write_series_csv(o, a.hazard); });
        csv("activation_smooth.csv", [&](std::ostream& o) { write_smooth_csv(o, a.activation_smooth); });
        csv("hazard_smooth.csv", [&](std::ostream& o) { write_smooth_csv(o, a.hazard_smooth); });
        csv("age_histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, a.histogram); });
        csv("growth_curve.csv", [&](std::ostream& o) { write_growth_csv(o, a.growth); });
        csv("lifespans.csv", [&](std::ostream& o) { write_lifespans_csv(o, a.life); });
    }
    if (config.formats.contains(OutputFormat::Svg)) {
        PlotStyle hazard_style;
        hazard_style.title = "Failure rate by test case age";
        hazard_style.y_label = "failure rate";
        auto hazard_out = open_output(dir / "hazard.svg");
        hazard_out << emit_svg(a.hazard, &a.hazard_smooth, hazard_style);

        PlotStyle activation_style;
        activation_style.title = "Activation rate by test case age";
        activation_style.y_label = "activation rate";
        activation_style.point_color = "#1f77b4";
        auto activation_out = open_output(dir / "activation.svg");
        activation_out << emit_svg(a.activation, &a.activation_smooth, activation_style);
    }
}

}  // namespace tcage
