#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nowcast/calendar.hpp"

namespace nowcast {

using BatchPredictor = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

// v(S) = mean over B background draws of f(x with features outside S taken
// from the drawn background row). The same draws serve every coalition and
// instance, so v(full) = f(x) and v(empty) = base value for all instances.
class ValueFunction {
public:
    // draws <= 0 uses every background row once.
    ValueFunction(BatchPredictor model, Eigen::MatrixXd background, int draws, std::uint64_t seed);

    int features() const { return static_cast<int>(background_.cols()); }
    double base_value() const { return base_value_; }
    const Eigen::MatrixXd& draws() const { return drawn_; }

    // Coalitions as bitmasks (bit i set = feature i present); requires M < 64.
    std::vector<double> evaluate(const Eigen::RowVectorXd& x, const std::vector<std::uint64_t>& masks) const;
    double evaluate(const Eigen::RowVectorXd& x, std::uint64_t mask) const;
    double predict(const Eigen::RowVectorXd& x) const;

private:
    BatchPredictor model_;
    Eigen::MatrixXd background_;
    Eigen::MatrixXd drawn_;
    double base_value_ = 0.0;
};

struct ShapExplanation {
    double base_value = 0.0;
    Eigen::VectorXd phi;
    double prediction = 0.0;
    Eigen::RowVectorXd feature_values;
    std::vector<std::string> feature_names;
    std::optional<Month> month;
    int draws = 0;
    std::uint64_t seed = 0;
};

constexpr int kExactShapleyLimit = 15;

// Shapley values by full coalition enumeration (M <= 15).
ShapExplanation exact_shapley(const ValueFunction& vf, const Eigen::RowVectorXd& x, int max_features = kExactShapleyLimit);

// Kernel-weighted least squares over coalitions with the efficiency
// constraint eliminated. When n_coalitions covers all 2^M - 2 proper
// coalitions they are enumerated; otherwise size-stratified paired sampling
// from the Shapley kernel is used.
ShapExplanation kernel_shap(const ValueFunction& vf, const Eigen::RowVectorXd& x, int n_coalitions, std::uint64_t seed);

double shapley_kernel_weight(int M, int s);

struct ImportanceEntry {
    std::string feature;
    double mean_abs_phi = 0.0;
    int rank = 0;
};

// Mean |phi| per feature, descending, ties by name.
std::vector<ImportanceEntry> global_importance(const std::vector<ShapExplanation>& explanations);

struct DependenceRow {
    std::optional<Month> month;
    double feature_value = 0.0;
    double feature_value_std = 0.0;
    double phi = 0.0;
    std::optional<double> color_value;
};

struct ColumnScale {
    double mean = 0.0;
    double sd = 1.0;
};

// One row per explanation. `scale` standardizes feature values (training-window
// statistics by default); when absent the explanations' own sample is used.
std::vector<DependenceRow> dependence_data(const std::vector<ShapExplanation>& explanations, const std::string& feature,
                                           const std::optional<std::string>& color_feature = std::nullopt,
                                           const std::optional<ColumnScale>& scale = std::nullopt);

// shap_values.csv: month,feature,phi,feature_value,prediction,base_value
void write_shap_csv(const std::vector<ShapExplanation>& explanations, std::ostream& out);
// importance.csv: feature,mean_abs_phi,rank
void write_importance_csv(const std::vector<ImportanceEntry>& entries, std::ostream& out);

} // namespace nowcast
