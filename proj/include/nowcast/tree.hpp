#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nowcast {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // mean training target of the node
    int samples = 0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

// CART regression tree. Samples with x[feature] < threshold go left.
class RegressionTree {
public:
    std::vector<TreeNode> nodes;
    int max_depth = -1;  // negative: unlimited
    int min_samples_split = 2;

    double predict_row(const double* x) const;
    double predict_row(const Eigen::RowVectorXd& x) const { return predict_row(x.data()); }
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
    int depth() const;
    int leaf_count() const;

    std::string to_json() const;
    static RegressionTree from_json(const std::string& text);

    bool operator==(const RegressionTree&) const = default;
};

struct TreeOptions {
    int max_depth = -1;
    int min_samples_split = 2;
    std::optional<std::vector<int>> feature_subset;  // per-tree candidate features
    int per_split_features = 0;                      // > 0: sample this many features at every node
    std::uint64_t seed = 0;                          // per-split sampling only
};

// Greedy SSE-reduction splits over midpoints of sorted unique values. Ties go
// to the lowest feature index, then the lowest threshold.
RegressionTree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TreeOptions& options);
// Fits on the given row multiset (bootstrap samples may repeat rows).
RegressionTree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& rows,
                        const TreeOptions& options);

enum class EnsembleMode { Bagging, Boosting };

struct Ensemble {
    EnsembleMode mode = EnsembleMode::Bagging;
    std::vector<RegressionTree> trees;
    double learning_rate = 1.0;
    double base_value = 0.0;  // boosting: mean of y
    std::vector<std::vector<int>> sample_indices;   // bagging: bootstrap rows per tree
    std::vector<std::vector<int>> feature_indices;  // bagging: feature subset per tree
    std::vector<double> training_sse;               // boosting: SSE after stage p (index 0 = H0)
    std::uint64_t seed = 0;
    int n_features = 0;

    std::string to_json() const;
};

struct RfrOptions {
    int n_estimators = 400;
    int max_depth = 4;
    int min_samples_split = 2;
    int m_features = 0;  // 0: ceil(M / 3)
    bool per_split = false;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct GbrOptions {
    int n_estimators = 1000;
    double learning_rate = 0.1;
    int max_depth = 1;
    int min_samples_split = 2;
    std::uint64_t seed = 0;
};

Ensemble fit_rfr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const RfrOptions& options);
Ensemble fit_gbr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GbrOptions& options);

// Bagging: mean of tree outputs. Boosting: H0 + learning_rate * sum of tree outputs.
Eigen::VectorXd predict_ensemble(const Ensemble& e, const Eigen::MatrixXd& X);
double predict_ensemble_row(const Ensemble& e, const double* x);

} // namespace nowcast
