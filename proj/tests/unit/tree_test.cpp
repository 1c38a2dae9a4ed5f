#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "nowcast/error.hpp"
#include "nowcast/random.hpp"
#include "nowcast/tree.hpp"
#include "oracles.hpp"

using namespace nowcast;
using namespace nowcast::oracle;

namespace {

Eigen::MatrixXd uniform(int n, int m, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd X(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) X(i, j) = rng.uniform(-2.0, 2.0);
    return X;
}

Eigen::VectorXd nonlinear_target(const Eigen::MatrixXd& X, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXd y(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        y(i) = std::sin(1.5 * X(i, 0)) + (X.cols() > 1 ? 0.5 * X(i, 1) * X(i, 1) : 0.0) + 0.2 * rng.normal();
    return y;
}

double reference_tree(const RegressionTree& t, const Eigen::RowVectorXd& x) {
    const TreeNode* n = &t.nodes[0];
    while (n->feature >= 0) n = &t.nodes[static_cast<std::size_t>(x(n->feature) < n->threshold ? n->left : n->right)];
    return n->value;
}

} // namespace

TEST(Tree, SeparatedGroups) {
    Eigen::MatrixXd X(8, 1);
    X << -3, -2, -1.5, -0.5, 0, 0.5, 1, 4;
    Eigen::VectorXd y(8);
    y << 1, 1.2, 0.8, 1, 5, 5.5, 4.5, 5;
    TreeOptions o;
    o.max_depth = 1;
    const auto t = fit_tree(X, y, o);
    ASSERT_EQ(t.nodes.size(), 3u);
    EXPECT_EQ(t.nodes[0].feature, 0);
    EXPECT_DOUBLE_EQ(t.nodes[0].threshold, -0.25);
    EXPECT_DOUBLE_EQ(t.nodes[static_cast<std::size_t>(t.nodes[0].left)].value, 1.0);
    EXPECT_DOUBLE_EQ(t.nodes[static_cast<std::size_t>(t.nodes[0].right)].value, 5.0);
}

TEST(Tree, DepthZeroIsMean) {
    const auto X = uniform(20, 2, 1);
    const auto y = nonlinear_target(X, 2);
    TreeOptions o;
    o.max_depth = 0;
    const auto t = fit_tree(X, y, o);
    ASSERT_EQ(t.nodes.size(), 1u);
    EXPECT_NEAR(t.nodes[0].value, y.mean(), 1e-12);
}

TEST(Tree, RootMatchesExhaustiveOracle) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto X = uniform(30, 3, seed);
        const auto y = nonlinear_target(X, seed + 100);
        TreeOptions o;
        o.max_depth = 3;
        const auto t = fit_tree(X, y, o);
        const auto oracle = exhaustive_root(X, y);
        EXPECT_EQ(t.nodes[0].feature, oracle.feature) << seed;
        EXPECT_DOUBLE_EQ(t.nodes[0].threshold, oracle.threshold) << seed;
    }
}

TEST(Tree, LeavesAreMeansAndDepthBounded) {
    const auto X = uniform(120, 3, 3);
    const auto y = nonlinear_target(X, 4);
    TreeOptions o;
    o.max_depth = 4;
    o.min_samples_split = 5;
    const auto t = fit_tree(X, y, o);
    EXPECT_LE(t.depth(), 4);
    std::vector<double> sum(t.nodes.size(), 0.0);
    std::vector<int> cnt(t.nodes.size(), 0);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        int k = 0;
        while (!t.nodes[static_cast<std::size_t>(k)].is_leaf()) {
            const auto& nd = t.nodes[static_cast<std::size_t>(k)];
            k = X(i, nd.feature) < nd.threshold ? nd.left : nd.right;
        }
        sum[static_cast<std::size_t>(k)] += y(i);
        ++cnt[static_cast<std::size_t>(k)];
    }
    for (std::size_t k = 0; k < t.nodes.size(); ++k)
        if (t.nodes[k].is_leaf()) {
            ASSERT_GT(cnt[k], 0);
            EXPECT_NEAR(t.nodes[k].value, sum[k] / cnt[k], 1e-12);
            EXPECT_EQ(t.nodes[k].samples, cnt[k]);
        }
}

TEST(Tree, InvariantToMonotoneFeatureTransform) {
    const auto X = uniform(60, 2, 5);
    const auto y = nonlinear_target(X, 6);
    TreeOptions o;
    o.max_depth = 3;
    const auto a = fit_tree(X, y, o);
    Eigen::MatrixXd Z = X;
    Z.col(0) = X.col(0).array().exp();
    Z.col(1) = X.col(1).array().pow(3) * 2.0 + 1.0;
    const auto b = fit_tree(Z, y, o);
    ASSERT_EQ(a.nodes.size(), b.nodes.size());
    for (std::size_t k = 0; k < a.nodes.size(); ++k) EXPECT_EQ(a.nodes[k].feature, b.nodes[k].feature);
    EXPECT_EQ(a.predict(X), b.predict(Z));
}

TEST(Tree, JsonRoundTrip) {
    const auto X = uniform(40, 3, 7);
    TreeOptions o;
    o.max_depth = 3;
    const auto t = fit_tree(X, nonlinear_target(X, 8), o);
    EXPECT_TRUE(RegressionTree::from_json(t.to_json()) == t);
    EXPECT_THROW(RegressionTree::from_json("{\"nodes\": 3}"), Error);
    EXPECT_THROW(RegressionTree::from_json(
                     R"({"max_depth":1,"min_samples_split":2,"nodes":[{"feature":0,"threshold":0,"left":0,"right":0,"value":0,"samples":1}]})"),
                 Error);
}

TEST(Tree, EmptyFrameIsError) {
    EXPECT_THROW(fit_tree(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), TreeOptions{}), Error);
}

TEST(Forest, SingleUnbaggedTreeEqualsTree) {
    const auto X = uniform(50, 4, 9);
    const auto y = nonlinear_target(X, 10);
    RfrOptions r;
    r.n_estimators = 1;
    r.bootstrap = false;
    r.m_features = 4;
    r.max_depth = 3;
    const auto e = fit_rfr(X, y, r);
    TreeOptions o;
    o.max_depth = 3;
    EXPECT_EQ(predict_ensemble(e, X), fit_tree(X, y, o).predict(X));
}

TEST(Forest, SeedDeterminism) {
    const auto X = uniform(40, 3, 11);
    const auto y = nonlinear_target(X, 12);
    RfrOptions r;
    r.n_estimators = 20;
    r.seed = 5;
    const auto a = fit_rfr(X, y, r), b = fit_rfr(X, y, r);
    EXPECT_EQ(a.to_json(), b.to_json());
    r.seed = 6;
    const auto c = fit_rfr(X, y, r);
    EXPECT_NE(a.sample_indices, c.sample_indices);
    // Default per-tree subsets have ceil(M / 3) features.
    for (const auto& f : a.feature_indices) EXPECT_EQ(f.size(), 1u);
}

TEST(Forest, AveragingReducesVariance) {
    const auto X = uniform(80, 3, 13);
    const auto y = nonlinear_target(X, 14);
    const auto Xh = uniform(30, 3, 15);
    auto spread = [&](int trees) {
        std::vector<Eigen::VectorXd> preds;
        for (std::uint64_t s = 0; s < 50; ++s) {
            RfrOptions r;
            r.n_estimators = trees;
            r.seed = 1000 + s;
            r.m_features = 2;
            preds.push_back(predict_ensemble(fit_rfr(X, y, r), Xh));
        }
        double v = 0;
        for (Eigen::Index i = 0; i < Xh.rows(); ++i) {
            double m = 0, m2 = 0;
            for (const auto& p : preds) m += p(i);
            m /= 50;
            for (const auto& p : preds) m2 += (p(i) - m) * (p(i) - m);
            v += m2 / 50;
        }
        return v / static_cast<double>(Xh.rows());
    };
    EXPECT_LE(spread(30), spread(1));
}

TEST(Forest, PermutationInvariantAndMatchesReference) {
    const auto X = uniform(40, 4, 16);
    const auto y = nonlinear_target(X, 17);
    RfrOptions r;
    r.n_estimators = 15;
    r.seed = 3;
    auto e = fit_rfr(X, y, r);
    const auto base = predict_ensemble(e, X);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double s = 0;
        for (const auto& t : e.trees) s += reference_tree(t, X.row(i));
        EXPECT_NEAR(base(i), s / 15.0, 1e-12);
    }
    std::reverse(e.trees.begin(), e.trees.end());
    std::rotate(e.trees.begin(), e.trees.begin() + 4, e.trees.end());
    EXPECT_LT((predict_ensemble(e, X) - base).cwiseAbs().maxCoeff(), 1e-12);
    // k copies of one tree predict as that tree.
    Ensemble copies;
    copies.n_features = 4;
    copies.trees.assign(5, e.trees[0]);
    EXPECT_LT((predict_ensemble(copies, X) - e.trees[0].predict(X)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Boosting, FirstStageComposition) {
    const auto X = uniform(50, 2, 18);
    const auto y = nonlinear_target(X, 19);
    GbrOptions g;
    g.n_estimators = 1;
    g.learning_rate = 0.3;
    g.max_depth = 2;
    const auto e = fit_gbr(X, y, g);
    TreeOptions o;
    o.max_depth = 2;
    const auto t1 = fit_tree(X, (y.array() - y.mean()).matrix(), o);
    const Eigen::VectorXd manual = (y.mean() + 0.3 * t1.predict(X).array()).matrix();
    EXPECT_LT((predict_ensemble(e, X) - manual).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(e.training_sse[0], (y.array() - y.mean()).square().sum(), 1e-10);
}

TEST(Boosting, ZeroStagesIsConstant) {
    const auto X = uniform(10, 2, 20);
    const auto y = nonlinear_target(X, 21);
    GbrOptions g;
    g.n_estimators = 0;
    EXPECT_EQ(predict_ensemble(fit_gbr(X, y, g), X), Eigen::VectorXd::Constant(10, y.mean()));
}

TEST(Boosting, UnitRateUnlimitedDepthInterpolates) {
    const auto X = uniform(25, 2, 22);
    const auto y = nonlinear_target(X, 23);
    GbrOptions g;
    g.n_estimators = 25;
    g.learning_rate = 1.0;
    g.max_depth = -1;
    const auto e = fit_gbr(X, y, g);
    EXPECT_LT(e.training_sse.back(), 1e-20);
}

TEST(Boosting, SseNonincreasingAcrossRates) {
    const auto X = uniform(100, 3, 24);
    const auto y = nonlinear_target(X, 25);
    for (double rate : {0.05, 0.1, 0.5, 1.0, 1.5, 2.0}) {
        GbrOptions g;
        g.n_estimators = 300;
        g.learning_rate = rate;
        g.max_depth = 2;
        const auto e = fit_gbr(X, y, g);
        for (std::size_t p = 1; p < e.training_sse.size(); ++p)
            ASSERT_LE(e.training_sse[p], e.training_sse[p - 1] * (1.0 + 1e-12) + 1e-24) << rate << " stage " << p;
    }
}

TEST(Boosting, RateValidation) {
    const auto X = uniform(10, 1, 26);
    GbrOptions g;
    g.learning_rate = 0.0;
    EXPECT_THROW(fit_gbr(X, X.col(0), g), Error);
    g.learning_rate = -0.1;
    EXPECT_THROW(fit_gbr(X, X.col(0), g), Error);
    g.learning_rate = 2.5;  // accepted with a warning
    g.n_estimators = 3;
    set_warnings_enabled(false);
    EXPECT_NO_THROW(fit_gbr(X, X.col(0), g));
    set_warnings_enabled(true);
}

TEST(Boosting, DimensionMismatch) {
    const auto X = uniform(10, 2, 27);
    GbrOptions g;
    g.n_estimators = 2;
    const auto e = fit_gbr(X, X.col(0), g);
    EXPECT_THROW(predict_ensemble(e, uniform(3, 3, 1)), Error);
}
