#include "nowcast/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/fisher_f.hpp>

#include "nowcast/error.hpp"

namespace nowcast {

namespace {

// Returns nullopt-like sentinel (-1) for a constant column.
double correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double mx = x.mean(), my = y.mean();
    const Eigen::ArrayXd dx = x.array() - mx, dy = y.array() - my;
    const double sxx = dx.square().sum(), syy = dy.square().sum();
    if (!(sxx > 0.0) || !(syy > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return (dx * dy).sum() / std::sqrt(sxx * syy);
}

FScore from_r(double r, Eigen::Index n, double cap) {
    const double r2 = std::min(1.0, r * r);
    const double df2 = static_cast<double>(n - 2);
    if (1.0 - r2 <= 0.0) return {cap, 0.0};
    const double F = r2 / (1.0 - r2) * df2;
    if (F >= cap) return {cap, 0.0};
    const boost::math::fisher_f dist(1.0, df2);
    return {F, boost::math::cdf(boost::math::complement(dist, F))};
}

} // namespace

FScore fscore(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double f_cap) {
    if (x.size() != y.size()) throw data_error("selection-cv", "fscore: length mismatch");
    if (x.size() < 3) throw data_error("selection-cv", "fscore needs at least 3 observations");
    const double r = correlation(x, y);
    if (std::isnan(r)) throw data_error("selection-cv", "fscore: constant column");
    return from_r(r, x.size(), f_cap);
}

std::vector<int> select_k_best(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k,
                               const std::vector<int>& candidates_in) {
    std::vector<int> candidates = candidates_in;
    if (candidates.empty()) {
        candidates.resize(static_cast<std::size_t>(X.cols()));
        std::iota(candidates.begin(), candidates.end(), 0);
    }
    if (k < 1 || k > static_cast<int>(candidates.size()))
        throw config_error("selection-cv", "k-best count " + std::to_string(k) + " outside [1, " +
                                               std::to_string(candidates.size()) + "]");
    if (X.rows() < 3) throw data_error("selection-cv", "feature selection needs at least 3 rows");
    std::vector<std::pair<double, int>> scored;
    for (int c : candidates) {
        const double r = correlation(X.col(c), y);
        // A column constant over the window carries no signal.
        const double F = std::isnan(r) ? 0.0 : from_r(r, X.rows(), 1e12).F;
        scored.emplace_back(F, c);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<int> out;
    for (int i = 0; i < k; ++i) out.push_back(scored[static_cast<std::size_t>(i)].second);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace nowcast
