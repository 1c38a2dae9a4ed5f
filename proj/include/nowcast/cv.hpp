#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nowcast/calendar.hpp"
#include "nowcast/config.hpp"
#include "nowcast/frame.hpp"
#include "nowcast/models.hpp"

namespace nowcast {

struct CvPlan {
    Month superset_start{2008, 10};
    Month superset_end{2018, 12};
    int n = 24;
    int k = 5;
    std::uint64_t seed = 0;
    SamplingMode mode = SamplingMode::Randomized;
    bool with_replacement = false;

    void validate() const;
};

// Months of the superset, restricted to `available` when it is nonempty.
std::vector<Month> superset_months(const CvPlan& plan, const std::vector<Month>& available = {});

// Randomized: n months drawn uniformly without replacement with seed
// derive_seed(seed, fold). Standard expanding: fold f takes the window of n
// months ending (k - 1 - f) * n months before the superset end, so the last
// fold is the final window. Returned ascending.
std::vector<Month> sample_validation_subset(const CvPlan& plan, int fold, const std::vector<Month>& available = {});

struct EvalPoint {
    Month month;
    double prediction = 0.0;
    double actual = 0.0;
    Month last_training_month;
    std::size_t training_rows = 0;
};

// For each eval month (ascending), fits on rows strictly earlier and predicts
// that month. Throws Error(Data) when a month has no earlier rows or no row.
std::vector<EvalPoint> expanding_window_eval(const ModelSpec& spec, const FeatureFrame& frame,
                                             std::vector<Month> eval_months);

struct GridEntry {
    ParamSet params;
    std::vector<double> fold_rmse;
    double mean_rmse = 0.0;
    bool chosen = false;
};

struct GridResult {
    ModelFamily family = ModelFamily::Ols;
    std::vector<GridEntry> entries;
    std::vector<std::vector<Month>> fold_months;

    const GridEntry& best() const;
    void write_csv(std::ostream& out) const;
};

// k folds x expanding_window_eval per combination; argmin of mean RMSE with
// ties to the first-declared combination. Non-finite RMSEs never win.
GridResult grid_search_cv(ModelFamily family, const ParamGrid& grid, const FeatureFrame& frame, const CvPlan& plan,
                          const ParamSet& fixed = {});

} // namespace nowcast
