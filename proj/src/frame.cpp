#include "nowcast/frame.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "nowcast/error.hpp"

namespace nowcast {

FeatureFrame FeatureFrame::subset_rows(const std::vector<std::size_t>& rows) const {
    FeatureFrame out;
    out.feature_names = feature_names;
    out.feature_groups = feature_groups;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(rows[i]);
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(r);
        out.y(static_cast<Eigen::Index>(i)) = y(r);
        out.months.push_back(months[rows[i]]);
        out.info_dates.push_back(info_dates[rows[i]]);
    }
    return out;
}

FeatureFrame FeatureFrame::rows_before(Month m) const {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < months.size(); ++i)
        if (months[i] < m) keep.push_back(i);
    return subset_rows(keep);
}

FeatureFrame FeatureFrame::select_columns(const std::vector<int>& cols) const {
    FeatureFrame out;
    out.months = months;
    out.info_dates = info_dates;
    out.y = y;
    out.X.resize(X.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.X.col(static_cast<Eigen::Index>(j)) = X.col(cols[j]);
        out.feature_names.push_back(feature_names[static_cast<std::size_t>(cols[j])]);
        out.feature_groups.push_back(feature_groups[static_cast<std::size_t>(cols[j])]);
    }
    return out;
}

std::optional<std::size_t> FeatureFrame::row_of(Month m) const {
    auto it = std::lower_bound(months.begin(), months.end(), m);
    if (it == months.end() || *it != m) return std::nullopt;
    return static_cast<std::size_t>(it - months.begin());
}

std::optional<int> FeatureFrame::column_of(const std::string& name) const {
    for (std::size_t j = 0; j < feature_names.size(); ++j)
        if (feature_names[j] == name) return static_cast<int>(j);
    return std::nullopt;
}

std::vector<int> FeatureFrame::columns_in_group(PredictorGroup g) const {
    std::vector<int> out;
    for (std::size_t j = 0; j < feature_groups.size(); ++j)
        if (feature_groups[j] == g) out.push_back(static_cast<int>(j));
    return out;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
    return (X.rowwise() - means.transpose()).array().rowwise() / sds.transpose().array();
}

Eigen::RowVectorXd Standardizer::apply_row(const Eigen::RowVectorXd& x) const {
    return (x - means.transpose()).array() / sds.transpose().array();
}

Eigen::MatrixXd Standardizer::invert(const Eigen::MatrixXd& Z) const {
    return (Z.array().rowwise() * sds.transpose().array()).matrix().rowwise() + means.transpose();
}

Standardizer fit_standardizer(const Eigen::MatrixXd& X, const std::vector<std::size_t>& fit_rows,
                              const std::vector<std::string>& names) {
    if (fit_rows.empty()) throw data_error("series-core", "standardize: empty fit range");
    const Eigen::Index m = X.cols();
    Standardizer s;
    s.means = Eigen::VectorXd::Zero(m);
    s.sds = Eigen::VectorXd::Zero(m);
    const double n = static_cast<double>(fit_rows.size());
    for (Eigen::Index j = 0; j < m; ++j) {
        double mean = 0.0;
        for (auto r : fit_rows) mean += X(static_cast<Eigen::Index>(r), j);
        mean /= n;
        double ss = 0.0;
        for (auto r : fit_rows) {
            const double d = X(static_cast<Eigen::Index>(r), j) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / n);
        if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
            const std::string name =
                static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)] : "#" + std::to_string(j);
            throw data_error("series-core", "standardize: column '" + name + "' has zero variance");
        }
        s.means(j) = mean;
        s.sds(j) = sd;
    }
    return s;
}

StandardizedFrame standardize(const FeatureFrame& frame, std::size_t fit_begin, std::size_t fit_end) {
    if (fit_begin >= fit_end || fit_end > frame.rows()) throw data_error("series-core", "standardize: bad fit range");
    std::vector<std::size_t> rows(fit_end - fit_begin);
    std::iota(rows.begin(), rows.end(), fit_begin);
    StandardizedFrame out{frame, fit_standardizer(frame.X, rows, frame.feature_names)};
    out.frame.X = out.stats.apply(frame.X);
    return out;
}

bool is_standardized(const Eigen::MatrixXd& X, double tol) {
    const double n = static_cast<double>(X.rows());
    if (X.rows() == 0) return false;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double mean = X.col(j).mean();
        const double var = (X.col(j).array() - mean).square().sum() / n;
        if (std::abs(mean) > tol || std::abs(std::sqrt(var) - 1.0) > tol) return false;
    }
    return true;
}

Horizon parse_horizon(const std::string& text) {
    if (text == "t" || text == "T") return Horizon::T;
    if (text == "t+1" || text == "T1" || text == "t1") return Horizon::T1;
    if (text == "t+2" || text == "T2" || text == "t2") return Horizon::T2;
    throw config_error("series-core", "unknown horizon '" + text + "' (expected t, t+1 or t+2)");
}

std::string horizon_str(Horizon h) {
    switch (h) {
    case Horizon::T: return "t";
    case Horizon::T1: return "t+1";
    case Horizon::T2: return "t+2";
    }
    return "?";
}

HorizonSpec HorizonSpec::for_horizon(Horizon h) {
    switch (h) {
    case Horizon::T: return {h, 3, 2, 1, 1};
    case Horizon::T1: return {h, 2, 1, 0, 0};
    case Horizon::T2: return {h, 1, 0, 0, 0};
    }
    return {};
}

int HorizonSpec::lag_for(PredictorGroup g) const {
    switch (g) {
    case PredictorGroup::TargetLag: return target_lag;
    case PredictorGroup::CpiUne: return cpi_une_lag;
    case PredictorGroup::CfsiCbcc: return cfsi_cbcc_lag;
    case PredictorGroup::Payments: return payments_lag;
    }
    return 0;
}

Date HorizonSpec::nowcast_date(Month t) const {
    switch (horizon) {
    case Horizon::T: return Date::first_of(t);
    case Horizon::T1: return Date::first_of(t + 1);
    case Horizon::T2: return Date::first_of(t + 2);
    }
    return Date::first_of(t);
}

std::optional<MonthlySeries> transform_series(const MonthlySeries& s, Transform t) {
    switch (t) {
    case Transform::Level:
        if (s.empty()) return std::nullopt;
        return s;
    case Transform::Yoy:
        if (s.size() < 13) return std::nullopt;
        return yoy_growth(s);
    case Transform::SeasonalYoy:
        if (s.size() < 36) return std::nullopt;
        return yoy_growth(seasonal_adjust_lite(s, s.last()));
    }
    return std::nullopt;
}

namespace {

std::string feature_name(const PredictorSource& p, int lag) {
    std::string base = p.feature_name.empty() ? p.series : p.feature_name;
    return lag > 0 ? base + "_l" + std::to_string(lag) : base;
}

// Transformed series of one snapshot, computed on demand.
class TransformedSnapshot {
public:
    TransformedSnapshot(SeriesMap levels) : levels_(std::move(levels)) {}

    const MonthlySeries* get(const std::string& series, Transform t) {
        const auto key = std::make_pair(series, static_cast<int>(t));
        if (auto it = cache_.find(key); it != cache_.end()) return it->second ? &*it->second : nullptr;
        std::optional<MonthlySeries> value;
        if (auto it = levels_.find(series); it != levels_.end()) value = transform_series(it->second, t);
        auto [pos, _] = cache_.emplace(key, std::move(value));
        return pos->second ? &*pos->second : nullptr;
    }
    bool has_series(const std::string& series) const { return levels_.count(series) != 0; }

private:
    SeriesMap levels_;
    std::map<std::pair<std::string, int>, std::optional<MonthlySeries>> cache_;
};

std::optional<Eigen::RowVectorXd> row_from(TransformedSnapshot& snap, const DesignSpec& spec, Month t) {
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(spec.predictors.size()));
    for (std::size_t j = 0; j < spec.predictors.size(); ++j) {
        const auto& p = spec.predictors[j];
        const MonthlySeries* s = snap.get(p.series, p.transform);
        if (!s) return std::nullopt;
        auto v = s->at(t - spec.horizon.lag_for(p.group));
        if (!v) return std::nullopt;
        row(static_cast<Eigen::Index>(j)) = *v;
    }
    return row;
}

} // namespace

FeatureFrame build_design_matrix(const SeriesSource& source, const DesignSpec& spec, Date asof) {
    TransformedSnapshot at_asof(source.snapshot(asof));
    if (!at_asof.has_series(spec.target))
        throw data_error("series-core", "design matrix: target series '" + spec.target + "' not found");
    for (const auto& p : spec.predictors)
        if (!at_asof.has_series(p.series))
            throw data_error("series-core", "design matrix: predictor series '" + p.series + "' not found");

    FeatureFrame frame;
    for (const auto& p : spec.predictors) {
        frame.feature_names.push_back(feature_name(p, spec.horizon.lag_for(p.group)));
        frame.feature_groups.push_back(p.group);
    }

    const MonthlySeries* target = at_asof.get(spec.target, spec.target_transform);
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> ys;
    if (target) {
        for (Month t = target->start(); t <= target->last(); ++t) {
            const Date info = std::min(asof, spec.horizon.nowcast_date(t));
            std::optional<Eigen::RowVectorXd> row;
            if (info == asof) {
                row = row_from(at_asof, spec, t);
            } else {
                TransformedSnapshot snap(source.snapshot(info));
                row = row_from(snap, spec, t);
            }
            if (!row) continue;
            frame.months.push_back(t);
            frame.info_dates.push_back(info);
            rows.push_back(std::move(*row));
            ys.push_back((*target)[t]);
        }
    }
    if (rows.empty()) throw data_error("series-core", "design matrix is empty after alignment");

    frame.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(spec.predictors.size()));
    frame.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        frame.X.row(static_cast<Eigen::Index>(i)) = rows[i];
        frame.y(static_cast<Eigen::Index>(i)) = ys[i];
    }
    return frame;
}

std::optional<Eigen::RowVectorXd> build_feature_row(const SeriesSource& source, const DesignSpec& spec, Month t,
                                                    Date asof) {
    TransformedSnapshot snap(source.snapshot(std::min(asof, spec.horizon.nowcast_date(t))));
    return row_from(snap, spec, t);
}

std::optional<double> target_value(const SeriesSource& source, const DesignSpec& spec, Month t, Date asof) {
    TransformedSnapshot snap(source.snapshot(asof));
    const MonthlySeries* s = snap.get(spec.target, spec.target_transform);
    if (!s) return std::nullopt;
    return s->at(t);
}

} // namespace nowcast
