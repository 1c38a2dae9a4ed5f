#pragma once

#include <string>
#include <vector>

#include "nowcast/config.hpp"
#include "nowcast/cv.hpp"
#include "nowcast/evaluate.hpp"
#include "nowcast/frame.hpp"
#include "nowcast/shap.hpp"
#include "nowcast/vintage.hpp"

namespace nowcast {

struct PredictionRow {
    Month month;
    Date info_date;
    double actual = 0.0;
    double prediction = 0.0;
    double benchmark = 0.0;
};

// Everything one run produces, in memory.
struct RunResult {
    GridResult grid;
    ModelSpec chosen;
    std::vector<PredictionRow> predictions;
    std::vector<MetricsRow> metrics;
    std::vector<ShapExplanation> explanations;
    std::vector<ImportanceEntry> importance;
    std::vector<std::string> explained_features;
    std::vector<ColumnScale> explained_scales;  // training-window statistics
};

// Input data for a run: the store plus the names the design needs.
struct RunInputs {
    VintageStore store;
    MergeRuleset rules;
};

RunInputs load_inputs(const RunConfig& config);

// Target, benchmark and payment predictors for the configured horizon.
DesignSpec make_design_spec(const RunConfig& config, const SeriesMap& sample_snapshot);
DesignSpec benchmark_only(const DesignSpec& spec);

// Which stages run_pipeline executes.
struct Stages {
    bool cv = true;
    bool test = true;
    bool explain = true;
};

// Real-time nowcast of one month: trains on every row whose target was
// published by the month's information date and predicts from the vintage of
// that date.
struct RealtimePoint {
    Date info_date;
    double prediction = 0.0;
    std::size_t training_rows = 0;
};
RealtimePoint realtime_nowcast(const SeriesSource& source, const DesignSpec& spec, const ModelSpec& model, Month month);

RunResult run_pipeline(const RunConfig& config, const RunInputs& inputs, Stages stages = {});

// Writes predictions.csv, metrics.csv, gridsearch.csv, shap_values.csv,
// importance.csv, standardization.csv and run_manifest.txt into config.output_dir.
void write_outputs(const RunConfig& config, const RunResult& result, Stages stages = {});

} // namespace nowcast
