#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nowcast/calendar.hpp"

namespace nowcast {

double rmse(const std::vector<double>& pred, const std::vector<double>& actual);

// 100 * (1 - model / baseline). Throws Error(Data) when baseline <= 0.
double rmse_reduction(double baseline, double model);
// Integer-percent display used in summary tables.
std::string display_percent(double percent);

enum class LossType { Squared, Absolute };

struct DmResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool indistinguishable = false;  // loss differential has zero variance
    int T = 0;
    int h = 1;
    std::string variant;
};

// Diebold-Mariano test of equal accuracy. d_t = L(a_t) - L(b_t); long-run
// variance by Newey-West with Bartlett weights and h - 1 lags;
// Harvey-Leybourne-Newbold small-sample correction; two-sided p from Student
// t with T - 1 degrees of freedom. Requires T >= 8.
DmResult dm_test(const std::vector<double>& errors_a, const std::vector<double>& errors_b, int h = 1,
                 LossType loss = LossType::Squared);

struct RegimeRange {
    std::string name;
    Month start;
    Month end;  // inclusive
};

struct RegimeMetrics {
    std::string regime;
    std::size_t count = 0;
    double rmse = 0.0;
    std::optional<double> baseline_rmse;
    std::optional<double> reduction_pct;
    std::optional<DmResult> dm;
};

// Per-regime and overall ("all", listed first) metrics. Regimes must partition
// the evaluation months. With a baseline, reductions and DM tests (when at
// least 8 months) are filled in.
std::vector<RegimeMetrics> split_eval(const std::vector<double>& pred, const std::vector<double>& actual,
                                      const std::vector<Month>& months, const std::vector<RegimeRange>& regimes,
                                      const std::optional<std::vector<double>>& baseline_pred = std::nullopt);

struct MetricsRow {
    std::string target;
    std::string horizon;
    std::string model;
    RegimeMetrics metrics;
};

// metrics.csv: target,horizon,model,regime,rmse,reduction_pct,dm_stat,dm_p
void write_metrics_csv(const std::vector<MetricsRow>& rows, std::ostream& out);

} // namespace nowcast
