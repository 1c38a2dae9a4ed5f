#include "nowcast/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "nowcast/error.hpp"
#include "nowcast/random.hpp"

namespace nowcast {

using json = nlohmann::json;

double RegressionTree::predict_row(const double* x) const {
    int k = 0;
    while (!nodes[static_cast<std::size_t>(k)].is_leaf()) {
        const auto& nd = nodes[static_cast<std::size_t>(k)];
        k = x[nd.feature] < nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(k)].value;
}

Eigen::VectorXd RegressionTree::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    Eigen::RowVectorXd row(X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        row = X.row(i);
        out(i) = predict_row(row.data());
    }
    return out;
}

int RegressionTree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<int> d(nodes.size(), 0);
    int best = 0;
    // Children always follow their parent in the node array.
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        best = std::max(best, d[k]);
        if (!nodes[k].is_leaf()) {
            d[static_cast<std::size_t>(nodes[k].left)] = d[k] + 1;
            d[static_cast<std::size_t>(nodes[k].right)] = d[k] + 1;
        }
    }
    return best;
}

int RegressionTree::leaf_count() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace {

json tree_to_json(const RegressionTree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes)
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left},
                         {"right", n.right}, {"value", n.value}, {"samples", n.samples}});
    return {{"max_depth", t.max_depth}, {"min_samples_split", t.min_samples_split}, {"nodes", nodes}};
}

// Presorted split search. Every node owns the same contiguous segment
// [begin, end) of each feature's position array.
class Builder {
public:
    Builder(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& rows, const TreeOptions& opt,
            std::vector<int> features)
        : X_(X), rows_(rows), opt_(opt), features_(std::move(features)), rng_(opt.seed) {
        const std::size_t n = rows.size();
        target_.resize(n);
        for (std::size_t p = 0; p < n; ++p) target_[p] = y(rows[p]);
        order_.assign(static_cast<std::size_t>(X.cols()), {});
        for (int f : features_) {
            auto& ord = order_[static_cast<std::size_t>(f)];
            ord.resize(n);
            std::iota(ord.begin(), ord.end(), 0);
            std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return value(a, f) < value(b, f); });
        }
        left_.assign(n, 0);
        scratch_.resize(n);
    }

    // Reuses a presort computed for the same rows (boosting refits every stage).
    Builder(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& rows, const TreeOptions& opt,
            std::vector<int> features, const std::vector<std::vector<int>>& presorted)
        : X_(X), rows_(rows), opt_(opt), features_(std::move(features)), rng_(opt.seed), order_(presorted) {
        const std::size_t n = rows.size();
        target_.resize(n);
        for (std::size_t p = 0; p < n; ++p) target_[p] = y(rows[p]);
        left_.assign(n, 0);
        scratch_.resize(n);
    }

    const std::vector<std::vector<int>>& order() const { return order_; }

    RegressionTree build() {
        RegressionTree tree;
        tree.max_depth = opt_.max_depth;
        tree.min_samples_split = opt_.min_samples_split;
        nodes_ = &tree.nodes;
        grow(0, static_cast<int>(rows_.size()), 0);
        return tree;
    }

private:
    double value(int pos, int f) const { return X_(rows_[static_cast<std::size_t>(pos)], f); }

    int grow(int begin, int end, int depth) {
        const int id = static_cast<int>(nodes_->size());
        nodes_->push_back({});
        const int n = end - begin;
        const auto& any = order_[static_cast<std::size_t>(features_.front())];
        double sum = 0.0;
        for (int k = begin; k < end; ++k) sum += target_[static_cast<std::size_t>(any[static_cast<std::size_t>(k)])];
        const double mean = sum / n;
        double sse = 0.0;
        for (int k = begin; k < end; ++k) {
            const double d = target_[static_cast<std::size_t>(any[static_cast<std::size_t>(k)])] - mean;
            sse += d * d;
        }
        (*nodes_)[static_cast<std::size_t>(id)].value = mean;
        (*nodes_)[static_cast<std::size_t>(id)].samples = n;

        const bool depth_ok = opt_.max_depth < 0 || depth < opt_.max_depth;
        if (!depth_ok || n < std::max(2, opt_.min_samples_split) || !(sse > 0.0)) return id;

        std::vector<int> cands = features_;
        if (opt_.per_split_features > 0 && opt_.per_split_features < static_cast<int>(cands.size())) {
            auto pick = rng_.sample_without_replacement(cands.size(), static_cast<std::size_t>(opt_.per_split_features));
            std::vector<int> chosen;
            for (auto p : pick) chosen.push_back(cands[p]);
            std::sort(chosen.begin(), chosen.end());
            cands = std::move(chosen);
        }

        // Gain on centred targets: S_L^2 (1/n_L + 1/n_R).
        double best_gain = 0.0;
        int best_f = -1;
        double best_thr = 0.0;
        for (int f : cands) {
            const auto& ord = order_[static_cast<std::size_t>(f)];
            double cum = 0.0;
            for (int k = begin; k < end - 1; ++k) {
                const int pos = ord[static_cast<std::size_t>(k)];
                cum += target_[static_cast<std::size_t>(pos)] - mean;
                const double v = value(pos, f);
                const double next = value(ord[static_cast<std::size_t>(k + 1)], f);
                if (!(v < next)) continue;
                const double nl = k - begin + 1;
                const double gain = cum * cum * (1.0 / nl + 1.0 / (n - nl));
                if (gain > best_gain) {
                    best_gain = gain;
                    best_f = f;
                    double mid = v + (next - v) / 2.0;
                    if (!(mid > v)) mid = next;
                    best_thr = mid;
                }
            }
        }
        if (best_f < 0 || !(best_gain > 1e-12 * sse)) return id;

        for (int k = begin; k < end; ++k) {
            const int pos = any[static_cast<std::size_t>(k)];
            left_[static_cast<std::size_t>(pos)] = value(pos, best_f) < best_thr;
        }
        int mid = begin;
        for (int f : features_) {
            auto& ord = order_[static_cast<std::size_t>(f)];
            int l = begin, r = 0;
            for (int k = begin; k < end; ++k) {
                const int pos = ord[static_cast<std::size_t>(k)];
                if (left_[static_cast<std::size_t>(pos)]) ord[static_cast<std::size_t>(l++)] = pos;
                else scratch_[static_cast<std::size_t>(r++)] = pos;
            }
            std::copy(scratch_.begin(), scratch_.begin() + r, ord.begin() + l);
            mid = l;
        }
        (*nodes_)[static_cast<std::size_t>(id)].feature = best_f;
        (*nodes_)[static_cast<std::size_t>(id)].threshold = best_thr;
        const int l = grow(begin, mid, depth + 1);
        const int r = grow(mid, end, depth + 1);
        (*nodes_)[static_cast<std::size_t>(id)].left = l;
        (*nodes_)[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    const Eigen::MatrixXd& X_;
    const std::vector<int>& rows_;
    const TreeOptions& opt_;
    std::vector<int> features_;
    Rng rng_;
    std::vector<double> target_;
    std::vector<std::vector<int>> order_;
    std::vector<char> left_;
    std::vector<int> scratch_;
    std::vector<TreeNode>* nodes_ = nullptr;
};

std::vector<int> candidate_features(const Eigen::MatrixXd& X, const TreeOptions& opt) {
    std::vector<int> f;
    if (opt.feature_subset) {
        f = *opt.feature_subset;
        std::sort(f.begin(), f.end());
        f.erase(std::unique(f.begin(), f.end()), f.end());
        for (int j : f)
            if (j < 0 || j >= X.cols()) throw data_error("tree-models", "feature subset index out of range");
    } else {
        f.resize(static_cast<std::size_t>(X.cols()));
        std::iota(f.begin(), f.end(), 0);
    }
    if (f.empty()) throw data_error("tree-models", "tree needs at least one candidate feature");
    return f;
}

} // namespace

RegressionTree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& rows,
                        const TreeOptions& opt) {
    if (rows.empty() || X.rows() == 0) throw data_error("tree-models", "cannot fit a tree on an empty frame");
    if (y.size() != X.rows()) throw data_error("tree-models", "X and y row counts differ");
    for (int r : rows)
        if (r < 0 || r >= X.rows()) throw data_error("tree-models", "row index out of range");
    Builder b(X, y, rows, opt, candidate_features(X, opt));
    return b.build();
}

RegressionTree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TreeOptions& opt) {
    std::vector<int> rows(static_cast<std::size_t>(X.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    return fit_tree(X, y, rows, opt);
}

Ensemble fit_rfr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const RfrOptions& opt) {
    if (opt.n_estimators < 1) throw config_error("tree-models", "n_estimators must be >= 1");
    const int n = static_cast<int>(X.rows());
    const int m = static_cast<int>(X.cols());
    if (n == 0 || m == 0) throw data_error("tree-models", "cannot fit a forest on an empty frame");
    const int k = opt.m_features > 0 ? std::min(opt.m_features, m) : (m + 2) / 3;

    Ensemble e;
    e.mode = EnsembleMode::Bagging;
    e.seed = opt.seed;
    e.n_features = m;
    for (int t = 0; t < opt.n_estimators; ++t) {
        const std::uint64_t tree_seed = derive_seed(opt.seed, static_cast<std::uint64_t>(t));
        Rng rng(tree_seed);
        std::vector<int> rows(static_cast<std::size_t>(n));
        if (opt.bootstrap)
            for (auto& r : rows) r = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
        else
            std::iota(rows.begin(), rows.end(), 0);

        TreeOptions to;
        to.max_depth = opt.max_depth;
        to.min_samples_split = opt.min_samples_split;
        to.seed = derive_seed(tree_seed, 1);
        std::vector<int> feats;
        if (opt.per_split) {
            to.per_split_features = k;
            feats.resize(static_cast<std::size_t>(m));
            std::iota(feats.begin(), feats.end(), 0);
        } else {
            for (auto f : rng.sample_without_replacement(static_cast<std::size_t>(m), static_cast<std::size_t>(k)))
                feats.push_back(static_cast<int>(f));
            std::sort(feats.begin(), feats.end());
            to.feature_subset = feats;
        }
        e.trees.push_back(fit_tree(X, y, rows, to));
        e.sample_indices.push_back(std::move(rows));
        e.feature_indices.push_back(std::move(feats));
    }
    return e;
}

Ensemble fit_gbr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GbrOptions& opt) {
    if (opt.n_estimators < 0) throw config_error("tree-models", "n_estimators must be >= 0");
    if (!(opt.learning_rate > 0.0) || !std::isfinite(opt.learning_rate))
        throw config_error("tree-models", "learning_rate must be > 0");
    if (opt.learning_rate > 2.0)
        warn("tree-models", "learning_rate > 2 makes boosting divergent; training SSE will grow");
    const Eigen::Index n = X.rows();
    if (n == 0 || y.size() != n) throw data_error("tree-models", "cannot fit boosting on an empty frame");

    Ensemble e;
    e.mode = EnsembleMode::Boosting;
    e.learning_rate = opt.learning_rate;
    e.base_value = y.mean();
    e.seed = opt.seed;
    e.n_features = static_cast<int>(X.cols());

    TreeOptions to;
    to.max_depth = opt.max_depth;
    to.min_samples_split = opt.min_samples_split;
    std::vector<int> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), 0);

    Eigen::VectorXd H = Eigen::VectorXd::Constant(n, e.base_value);
    Eigen::VectorXd resid = y - H;
    e.training_sse.push_back(resid.squaredNorm());
    const std::vector<int> feats = candidate_features(X, to);
    const std::vector<std::vector<int>> presorted = Builder(X, y, rows, to, feats).order();
    Eigen::RowVectorXd row(X.cols());
    for (int s = 0; s < opt.n_estimators; ++s) {
        RegressionTree tree = Builder(X, resid, rows, to, feats, presorted).build();
        for (Eigen::Index i = 0; i < n; ++i) {
            row = X.row(i);
            H(i) += opt.learning_rate * tree.predict_row(row.data());
        }
        resid = y - H;
        e.training_sse.push_back(resid.squaredNorm());
        e.trees.push_back(std::move(tree));
    }
    return e;
}

double predict_ensemble_row(const Ensemble& e, const double* x) {
    if (e.mode == EnsembleMode::Boosting) {
        double s = 0.0;
        for (const auto& t : e.trees) s += t.predict_row(x);
        return e.base_value + e.learning_rate * s;
    }
    if (e.trees.empty()) throw data_error("tree-models", "empty bagging ensemble");
    double s = 0.0;
    for (const auto& t : e.trees) s += t.predict_row(x);
    return s / static_cast<double>(e.trees.size());
}

Eigen::VectorXd predict_ensemble(const Ensemble& e, const Eigen::MatrixXd& X) {
    if (X.cols() != e.n_features)
        throw data_error("tree-models", "predict: expected " + std::to_string(e.n_features) + " columns, got " +
                                            std::to_string(X.cols()));
    Eigen::VectorXd out(X.rows());
    Eigen::RowVectorXd row(X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        row = X.row(i);
        out(i) = predict_ensemble_row(e, row.data());
    }
    return out;
}

std::string RegressionTree::to_json() const { return tree_to_json(*this).dump(); }

RegressionTree RegressionTree::from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        RegressionTree t;
        t.max_depth = j.at("max_depth").get<int>();
        t.min_samples_split = j.at("min_samples_split").get<int>();
        for (const auto& n : j.at("nodes")) {
            TreeNode nd;
            nd.feature = n.at("feature").get<int>();
            nd.threshold = n.at("threshold").get<double>();
            nd.left = n.at("left").get<int>();
            nd.right = n.at("right").get<int>();
            nd.value = n.at("value").get<double>();
            nd.samples = n.at("samples").get<int>();
            t.nodes.push_back(nd);
        }
        const int count = static_cast<int>(t.nodes.size());
        for (int k = 0; k < count; ++k) {
            const auto& nd = t.nodes[static_cast<std::size_t>(k)];
            if (!nd.is_leaf() && (nd.left <= k || nd.right <= k || nd.left >= count || nd.right >= count))
                throw data_error("tree-models", "tree json has an invalid child index");
        }
        return t;
    } catch (const json::exception& e) {
        throw data_error("tree-models", std::string("malformed tree json: ") + e.what());
    }
}

std::string Ensemble::to_json() const {
    json trees_j = json::array();
    for (const auto& t : trees) trees_j.push_back(tree_to_json(t));
    return json{{"mode", mode == EnsembleMode::Boosting ? "boosting" : "bagging"},
                {"learning_rate", learning_rate},
                {"base_value", base_value},
                {"seed", seed},
                {"n_features", n_features},
                {"sample_indices", sample_indices},
                {"feature_indices", feature_indices},
                {"trees", trees_j}}
        .dump();
}

} // namespace nowcast
