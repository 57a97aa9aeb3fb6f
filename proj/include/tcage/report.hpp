#pragma once

#include "tcage/ceo.hpp"
#include "tcage/curves.hpp"
#include "tcage/lifespan.hpp"
#include "tcage/regfit.hpp"
#include "tcage/smoothing.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <vector>

namespace tcage {

enum class OutputFormat { Csv, Json, Svg };

/// Knobs of a full analysis run; every field has a CLI flag.
struct RunConfig {
    int grace_days = 90;
    std::size_t min_support = 10;
    bool filter_allfail = true;
    std::size_t min_session_size = 2;
    double span = 0.15;
    double confidence = 0.95;
    int smooth_degree = 1;
    std::vector<int> degrees{1, 2};
    bool exponential = false;
    int grid_max = 3650;
    double p_threshold = 1e-10;
    bool percent = false;
    YearlyMode yearly_mode = YearlyMode::Pooled;
    InferMode infer = InferMode::InferMissing;
    int bin_width_days = 30;
    OutcomeMapPolicy outcome_policy;
    std::set<OutputFormat> formats{OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg};

    SmoothConfig smooth_config() const { return {span, smooth_degree, confidence, SmoothKernel::Tricube}; }
};

struct InputPaths {
    std::optional<std::filesystem::path> creations;
    std::filesystem::path executions;
};

struct IngestSummary {
    std::size_t creation_rows = 0;
    std::size_t execution_rows = 0;
    std::size_t removed_sessions = 0;
    std::size_t removed_session_executions = 0;
};

struct LoadedDataset {
    CeoDataset dataset;
    Diagnostics diagnostics;
    IngestSummary summary;
};

/// map outcomes -> infer creations -> validate -> optional all-fail filter
LoadedDataset prepare_dataset(std::vector<CreationRecord> creations, const std::vector<RawExecution>& rows,
                              const RunConfig& config);
LoadedDataset load_dataset(const InputPaths& paths, const RunConfig& config);

struct Analysis {
    LifeTable life;
    AlivenessSummary aliveness;
    std::vector<HistogramBin> histogram;
    std::vector<GrowthPoint> growth;
    RateSeries activation;
    RateSeries hazard;
    SmoothedCurve activation_smooth;
    SmoothedCurve hazard_smooth;
    std::vector<YearlyRate> yearly;
    std::vector<ModelReport> models;
};

Analysis analyze(const CeoDataset& dataset, const RunConfig& config, Diagnostics* diagnostics = nullptr);

nlohmann::ordered_json aliveness_json(const AlivenessSummary& summary);
nlohmann::ordered_json models_json(const std::vector<ModelReport>& models, bool percent);
std::string model_formula(const FitModel& model, bool percent);
nlohmann::ordered_json report_json(const LoadedDataset& loaded, const Analysis& analysis, const RunConfig& config);

void write_series_csv(std::ostream& out, const RateSeries& series);
void write_smooth_csv(std::ostream& out, const SmoothedCurve& curve);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins);
void write_growth_csv(std::ostream& out, const std::vector<GrowthPoint>& curve);
void write_lifespans_csv(std::ostream& out, const LifeTable& table);

/// report.json, series CSVs and SVG plots according to `config.formats`.
void write_bundle(const std::filesystem::path& dir, const LoadedDataset& loaded, const Analysis& analysis,
                  const RunConfig& config);

}  // namespace tcage
