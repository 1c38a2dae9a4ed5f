#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nowcast/calendar.hpp"
#include "nowcast/series.hpp"

namespace nowcast {

enum class PredictorGroup { TargetLag, CpiUne, CfsiCbcc, Payments };

// Aligned design matrix. Row i holds predictors for nowcast month months[i],
// every entry of which was knowable on info_dates[i].
struct FeatureFrame {
    std::vector<Month> months;
    std::vector<std::string> feature_names;
    std::vector<PredictorGroup> feature_groups;
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<Date> info_dates;

    std::size_t rows() const { return months.size(); }
    std::size_t cols() const { return feature_names.size(); }

    FeatureFrame subset_rows(const std::vector<std::size_t>& rows) const;
    FeatureFrame rows_before(Month m) const;  // months strictly earlier than m
    FeatureFrame select_columns(const std::vector<int>& cols) const;
    std::optional<std::size_t> row_of(Month m) const;
    std::optional<int> column_of(const std::string& name) const;
    std::vector<int> columns_in_group(PredictorGroup g) const;
};

struct Standardizer {
    Eigen::VectorXd means;
    Eigen::VectorXd sds;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
    Eigen::RowVectorXd apply_row(const Eigen::RowVectorXd& x) const;
    Eigen::MatrixXd invert(const Eigen::MatrixXd& Z) const;
};

// Column statistics (population sd) over the given rows. Throws Error(Data)
// naming the column when it has zero variance over those rows.
Standardizer fit_standardizer(const Eigen::MatrixXd& X, const std::vector<std::size_t>& fit_rows,
                              const std::vector<std::string>& names = {});

struct StandardizedFrame {
    FeatureFrame frame;
    Standardizer stats;
};

// Centres and scales every column with statistics computed over rows
// [fit_begin, fit_end) only.
StandardizedFrame standardize(const FeatureFrame& frame, std::size_t fit_begin, std::size_t fit_end);

bool is_standardized(const Eigen::MatrixXd& X, double tol = 1e-6);

enum class Horizon { T, T1, T2 };

Horizon parse_horizon(const std::string& text);  // "t", "t+1", "t+2"
std::string horizon_str(Horizon h);

// Lag structure of the nowcasting horizons.
struct HorizonSpec {
    Horizon horizon = Horizon::T1;
    int target_lag = 2;
    int cpi_une_lag = 1;
    int cfsi_cbcc_lag = 0;
    int payments_lag = 0;

    static HorizonSpec for_horizon(Horizon h);
    int lag_for(PredictorGroup g) const;
    // T: first day of month t; T1: first day of t+1; T2: first day of t+2.
    Date nowcast_date(Month t) const;
};

enum class Transform { Level, Yoy, SeasonalYoy };

struct PredictorSource {
    std::string series;
    PredictorGroup group;
    Transform transform;
    std::string feature_name;  // defaults to the series name
};

struct DesignSpec {
    std::string target;
    Transform target_transform = Transform::Yoy;
    std::vector<PredictorSource> predictors;
    HorizonSpec horizon;
};

// Supplies level series as they were known on a given date.
class SeriesSource {
public:
    virtual ~SeriesSource() = default;
    virtual SeriesMap snapshot(Date asof) const = 0;
};

// A source with no vintage history: every date sees the same series.
class StaticSource : public SeriesSource {
public:
    explicit StaticSource(SeriesMap series) : series_(std::move(series)) {}
    SeriesMap snapshot(Date) const override { return series_; }

private:
    SeriesMap series_;
};

// Applies a transform to a series; absent when history is insufficient.
std::optional<MonthlySeries> transform_series(const MonthlySeries& s, Transform t);

// Builds the design matrix. Row t uses predictor values as known on
// min(asof, nowcast_date(t)) and the target as known on asof. Rows with any
// unavailable entry are dropped. Throws Error(Data) when nothing survives.
FeatureFrame build_design_matrix(const SeriesSource& source, const DesignSpec& spec, Date asof);

// Predictor row for a single month regardless of target availability.
std::optional<Eigen::RowVectorXd> build_feature_row(const SeriesSource& source, const DesignSpec& spec,
                                                    Month t, Date asof);

// Target value for month t as known on `asof`.
std::optional<double> target_value(const SeriesSource& source, const DesignSpec& spec, Month t, Date asof);

} // namespace nowcast
