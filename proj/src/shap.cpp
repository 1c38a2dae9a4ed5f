#include "nowcast/shap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "nowcast/error.hpp"
#include "nowcast/random.hpp"
#include "nowcast/text.hpp"

namespace nowcast {

ValueFunction::ValueFunction(BatchPredictor model, Eigen::MatrixXd background, int draws, std::uint64_t seed)
    : model_(std::move(model)), background_(std::move(background)) {
    if (background_.rows() == 0) throw data_error("explain", "empty background sample");
    if (background_.cols() >= 64) throw data_error("explain", "value function supports at most 63 features");
    if (draws <= 0) {
        drawn_ = background_;
    } else {
        Rng rng(seed);
        drawn_.resize(draws, background_.cols());
        for (int b = 0; b < draws; ++b)
            drawn_.row(b) = background_.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(background_.rows()))));
    }
    base_value_ = model_(drawn_).mean();
}

std::vector<double> ValueFunction::evaluate(const Eigen::RowVectorXd& x, const std::vector<std::uint64_t>& masks) const {
    const Eigen::Index B = drawn_.rows(), M = drawn_.cols();
    if (x.size() != M) throw data_error("explain", "instance has the wrong number of features");
    std::vector<double> out;
    out.reserve(masks.size());
    // Batches of roughly 64k rows keep memory flat for large enumerations.
    const std::size_t per_batch = std::max<std::size_t>(1, 65536 / static_cast<std::size_t>(B));
    for (std::size_t start = 0; start < masks.size(); start += per_batch) {
        const std::size_t count = std::min(per_batch, masks.size() - start);
        Eigen::MatrixXd Z(static_cast<Eigen::Index>(count) * B, M);
        for (std::size_t c = 0; c < count; ++c) {
            const std::uint64_t mask = masks[start + c];
            auto block = Z.middleRows(static_cast<Eigen::Index>(c) * B, B);
            block = drawn_;
            for (Eigen::Index j = 0; j < M; ++j)
                if (mask >> j & 1U) block.col(j).setConstant(x(j));
        }
        const Eigen::VectorXd f = model_(Z);
        for (std::size_t c = 0; c < count; ++c) out.push_back(f.segment(static_cast<Eigen::Index>(c) * B, B).mean());
    }
    return out;
}

double ValueFunction::evaluate(const Eigen::RowVectorXd& x, std::uint64_t mask) const { return evaluate(x, std::vector<std::uint64_t>{mask})[0]; }

double ValueFunction::predict(const Eigen::RowVectorXd& x) const { return model_(Eigen::MatrixXd(x))(0); }

namespace {

ShapExplanation start_explanation(const ValueFunction& vf, const Eigen::RowVectorXd& x) {
    ShapExplanation e;
    e.base_value = vf.base_value();
    e.prediction = vf.predict(x);
    e.feature_values = x;
    e.draws = static_cast<int>(vf.draws().rows());
    return e;
}

double log_choose(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

// Gosper's hack: every M-bit mask with s bits set, in increasing order.
template <class F>
void for_each_subset_of_size(int M, int s, F&& f) {
    const std::uint64_t limit = 1ULL << M;
    for (std::uint64_t v = (1ULL << s) - 1; v < limit;) {
        f(v);
        const std::uint64_t c = v & (~v + 1), r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
}

} // namespace

ShapExplanation exact_shapley(const ValueFunction& vf, const Eigen::RowVectorXd& x, int max_features) {
    const int M = vf.features();
    if (M > std::min(max_features, kExactShapleyLimit))
        throw config_error("explain", "exact Shapley enumeration limited to " + std::to_string(std::min(max_features, kExactShapleyLimit)) +
                                          " features, got " + std::to_string(M));
    const std::uint64_t count = 1ULL << M;
    std::vector<std::uint64_t> masks(count);
    for (std::uint64_t s = 0; s < count; ++s) masks[s] = s;
    const auto v = vf.evaluate(x, masks);

    // w(s) = s! (M - s - 1)! / M!
    std::vector<double> w(static_cast<std::size_t>(M));
    for (int s = 0; s < M; ++s) w[static_cast<std::size_t>(s)] = std::exp(std::lgamma(s + 1.0) + std::lgamma(M - s + 0.0) - std::lgamma(M + 1.0));

    ShapExplanation e = start_explanation(vf, x);
    e.phi = Eigen::VectorXd::Zero(M);
    for (int i = 0; i < M; ++i) {
        const std::uint64_t bit = 1ULL << i;
        double acc = 0.0;
        for (std::uint64_t s = 0; s < count; ++s) {
            if (s & bit) continue;
            acc += w[static_cast<std::size_t>(__builtin_popcountll(s))] * (v[s | bit] - v[s]);
        }
        e.phi(i) = acc;
    }
    e.base_value = v[0];
    return e;
}

double shapley_kernel_weight(int M, int s) {
    if (s <= 0 || s >= M) return std::numeric_limits<double>::infinity();
    return (M - 1.0) / (std::exp(log_choose(M, s)) * s * (M - s));
}

ShapExplanation kernel_shap(const ValueFunction& vf, const Eigen::RowVectorXd& x, int n_coalitions, std::uint64_t seed) {
    const int M = vf.features();
    if (M == 0) throw data_error("explain", "no features to explain");
    ShapExplanation e = start_explanation(vf, x);
    e.seed = seed;
    const double total = e.prediction - e.base_value;
    if (M == 1) {
        e.phi = Eigen::VectorXd::Constant(1, total);
        return e;
    }
    if (n_coalitions < M + 2)
        throw config_error("explain", "kernel SHAP needs at least M + 2 = " + std::to_string(M + 2) + " coalitions");

    std::map<std::uint64_t, double> weight;
    const double proper = std::ldexp(1.0, M) - 2.0;
    if (static_cast<double>(n_coalitions) >= proper) {
        for (std::uint64_t s = 1; s + 1 < (1ULL << M); ++s)
            weight[s] = shapley_kernel_weight(M, __builtin_popcountll(s));
    } else {
        // Whole sizes are enumerated in the order 1, M-1, 2, M-2, ... while the
        // budget covers them, at exact kernel weight. Leftover sizes share the
        // remaining kernel mass over paired samples.
        std::vector<int> order;
        for (int lo = 1, hi = M - 1; lo <= hi; ++lo, --hi) {
            order.push_back(lo);
            if (hi != lo) order.push_back(hi);
        }
        double budget = n_coalitions;
        std::vector<int> rest;
        for (int s : order) {
            const double count = std::round(std::exp(log_choose(M, s)));
            if (rest.empty() && count <= budget) {
                for_each_subset_of_size(M, s, [&](std::uint64_t mask) { weight[mask] = shapley_kernel_weight(M, s); });
                budget -= count;
            } else {
                rest.push_back(s);
            }
        }
        const int pairs = static_cast<int>(budget) / 2;
        if (!rest.empty() && pairs > 0) {
            std::vector<double> cdf;
            double acc = 0.0;
            for (int s : rest) {
                acc += (M - 1.0) / (s * (M - s));  // kernel mass of size s
                cdf.push_back(acc);
            }
            const double each = acc / (2.0 * pairs);
            Rng rng(seed);
            const std::uint64_t full = (1ULL << M) - 1;
            for (int pair = 0; pair < pairs; ++pair) {
                const auto pick = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), rng.uniform() * acc) - cdf.begin());
                const int size = rest[std::min(pick, rest.size() - 1)];
                std::uint64_t mask = 0;
                for (auto j : rng.sample_without_replacement(static_cast<std::size_t>(M), static_cast<std::size_t>(size)))
                    mask |= 1ULL << j;
                weight[mask] += each;
                weight[full & ~mask] += each;
            }
        }
    }

    std::vector<std::uint64_t> masks;
    for (const auto& [m, _] : weight) masks.push_back(m);
    const auto v = vf.evaluate(x, masks);

    // Eliminate the last attribution through the efficiency constraint.
    const int K = M - 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, K);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K);
    std::size_t idx = 0;
    for (const auto& [mask, w] : weight) {
        const double zM = (mask >> K) & 1U ? 1.0 : 0.0;
        Eigen::VectorXd z(K);
        for (int j = 0; j < K; ++j) z(j) = static_cast<double>((mask >> j) & 1U) - zM;
        const double target = v[idx++] - e.base_value - zM * total;
        A.noalias() += w * z * z.transpose();
        rhs.noalias() += w * target * z;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-12);
    if (qr.rank() < K) throw numerical_error("explain", "kernel SHAP regression is singular (too few distinct coalitions)");
    const Eigen::VectorXd sol = qr.solve(rhs);
    e.phi.resize(M);
    e.phi.head(K) = sol;
    e.phi(K) = total - sol.sum();
    return e;
}

std::vector<ImportanceEntry> global_importance(const std::vector<ShapExplanation>& ex) {
    if (ex.empty()) throw data_error("explain", "no explanations to aggregate");
    const auto& names = ex.front().feature_names;
    const Eigen::Index M = ex.front().phi.size();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(M);
    for (const auto& e : ex) {
        if (e.phi.size() != M || e.feature_names != names) throw data_error("explain", "explanations have inconsistent feature sets");
        sum += e.phi.cwiseAbs();
    }
    std::vector<ImportanceEntry> out;
    for (Eigen::Index j = 0; j < M; ++j)
        out.push_back({static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)] : "f" + std::to_string(j),
                       sum(j) / static_cast<double>(ex.size()), 0});
    std::stable_sort(out.begin(), out.end(), [](const ImportanceEntry& a, const ImportanceEntry& b) {
        if (a.mean_abs_phi != b.mean_abs_phi) return a.mean_abs_phi > b.mean_abs_phi;
        return a.feature < b.feature;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i + 1);
    return out;
}

std::vector<DependenceRow> dependence_data(const std::vector<ShapExplanation>& ex, const std::string& feature,
                                           const std::optional<std::string>& color, const std::optional<ColumnScale>& scale) {
    if (ex.empty()) throw data_error("explain", "no explanations");
    const auto& names = ex.front().feature_names;
    auto find = [&](const std::string& f) {
        auto it = std::find(names.begin(), names.end(), f);
        if (it == names.end()) throw data_error("explain", "unknown feature '" + f + "'");
        return static_cast<Eigen::Index>(it - names.begin());
    };
    const Eigen::Index j = find(feature);
    const std::optional<Eigen::Index> c = color ? std::optional<Eigen::Index>(find(*color)) : std::nullopt;
    ColumnScale sc;
    if (scale) {
        sc = *scale;
    } else {
        double mean = 0.0, sq = 0.0;
        for (const auto& e : ex) mean += e.feature_values(j);
        mean /= static_cast<double>(ex.size());
        for (const auto& e : ex) sq += (e.feature_values(j) - mean) * (e.feature_values(j) - mean);
        const double sd = std::sqrt(sq / static_cast<double>(ex.size()));
        sc = {mean, sd > 0.0 ? sd : 1.0};
    }
    std::vector<DependenceRow> out;
    for (const auto& e : ex) {
        if (e.feature_names != names) throw data_error("explain", "explanations have inconsistent feature sets");
        DependenceRow r;
        r.month = e.month;
        r.feature_value = e.feature_values(j);
        r.feature_value_std = (r.feature_value - sc.mean) / sc.sd;
        r.phi = e.phi(j);
        if (c) r.color_value = e.feature_values(*c);
        out.push_back(r);
    }
    return out;
}

void write_shap_csv(const std::vector<ShapExplanation>& ex, std::ostream& out) {
    out << "month,feature,phi,feature_value,prediction,base_value\n";
    for (const auto& e : ex)
        for (Eigen::Index j = 0; j < e.phi.size(); ++j)
            out << (e.month ? e.month->str() : "") << ','
                << (static_cast<std::size_t>(j) < e.feature_names.size() ? e.feature_names[static_cast<std::size_t>(j)] : "f" + std::to_string(j))
                << ',' << format_double(e.phi(j)) << ',' << format_double(e.feature_values(j)) << ','
                << format_double(e.prediction) << ',' << format_double(e.base_value) << '\n';
}

void write_importance_csv(const std::vector<ImportanceEntry>& entries, std::ostream& out) {
    out << "feature,mean_abs_phi,rank\n";
    for (const auto& e : entries) out << e.feature << ',' << format_double(e.mean_abs_phi) << ',' << e.rank << '\n';
}

} // namespace nowcast
