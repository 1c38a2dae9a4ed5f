#include <gtest/gtest.h>

#include <cmath>

#include "nowcast/dfm.hpp"
#include "nowcast/error.hpp"
#include "nowcast/random.hpp"
#include "nowcast/synth.hpp"

using namespace nowcast;

namespace {

Eigen::MatrixXd standardize_cols(Eigen::MatrixXd X) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double mu = X.col(j).mean();
        X.col(j).array() -= mu;
        X.col(j) /= std::sqrt(X.col(j).squaredNorm() / static_cast<double>(X.rows()));
    }
    return X;
}

double corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::ArrayXd x = a.array() - a.mean(), y = b.array() - b.mean();
    return (x * y).sum() / std::sqrt(x.square().sum() * y.square().sum());
}

// Panel driven by one AR(1) factor plus idiosyncratic noise.
struct OneFactor {
    Eigen::MatrixXd X;
    Eigen::VectorXd f;
};

OneFactor one_factor(int n, int m, double noise, std::uint64_t seed) {
    Rng rng(seed);
    OneFactor d{Eigen::MatrixXd(n, m), Eigen::VectorXd(n)};
    double f = 0;
    for (int t = 0; t < n; ++t) {
        f = 0.8 * f + rng.normal();
        d.f(t) = f;
        for (int j = 0; j < m; ++j) d.X(t, j) = (0.5 + 0.2 * j) * f + noise * rng.normal();
    }
    d.X = standardize_cols(d.X);
    return d;
}

} // namespace

TEST(Factors, RankOneExact) {
    Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(30, -1, 1);
    Eigen::VectorXd v(4);
    v << 1, -2, 0.5, 3;
    const Eigen::MatrixXd X = u * v.transpose();
    const auto fx = extract_factors(X, 1);
    EXPECT_LT((reconstruct(fx) - X).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Factors, FullRankExactAndErrorNonincreasing) {
    Rng rng(3);
    Eigen::MatrixXd X(40, 5);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 5; ++j) X(i, j) = rng.normal() + (j > 0 ? 0.5 * X(i, j - 1) : 0.0);
    X = standardize_cols(X);
    double prev = std::numeric_limits<double>::infinity();
    for (int r = 1; r <= 5; ++r) {
        const double err = (reconstruct(extract_factors(X, r)) - X).squaredNorm();
        EXPECT_LE(err, prev + 1e-12) << r;
        prev = err;
    }
    EXPECT_LT(std::sqrt(prev), 1e-9);
    EXPECT_THROW(extract_factors(X, 0), Error);
    EXPECT_THROW(extract_factors(X, 6), Error);
}

TEST(Factors, OrthogonalUnitScoresAndSignConvention) {
    const auto d = one_factor(150, 6, 0.7, 4);
    const auto fx = extract_factors(d.X, 3);
    const double n = 150.0;
    const Eigen::MatrixXd cov = fx.factors.transpose() * fx.factors / n;
    EXPECT_LT((cov - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(fx.factors.colwise().mean().cwiseAbs().maxCoeff(), 1e-10);
    for (Eigen::Index c = 0; c < 3; ++c) {
        Eigen::Index arg;
        fx.loadings.col(c).cwiseAbs().maxCoeff(&arg);
        EXPECT_GT(fx.loadings(arg, c), 0.0);
    }
    // Projection of the training panel recovers the scores.
    DfmFit fit = fit_dfm(d.X, d.f, 3);
    EXPECT_LT((fit.project(d.X) - fit.factors.factors).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Factors, RecoversLatentActivityOfSyntheticEconomy) {
    auto scn = EconomyScenario::default_scenario(5);
    scn.regimes = {{scn.start, RegimeType::Normal}};
    scn.asymmetry = 1.0;
    for (auto& s : scn.streams) s.noise_sd = 0.5;
    const auto eco = generate_economy(scn);
    const Month first = eco.stream_growth.begin()->second.start();
    const auto n = static_cast<Eigen::Index>(eco.stream_growth.begin()->second.size());
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(eco.stream_growth.size()));
    Eigen::VectorXd act(n);
    int j = 0;
    for (const auto& [name, g] : eco.stream_growth) {
        for (Eigen::Index i = 0; i < n; ++i) X(i, j) = g.values()[static_cast<std::size_t>(i)];
        ++j;
    }
    for (Eigen::Index i = 0; i < n; ++i) act(i) = eco.truth.activity[static_cast<std::size_t>((first - scn.start) + i)];
    const auto fx = extract_factors(standardize_cols(X), 2);
    EXPECT_GT(corr(fx.factors.col(0).cwiseAbs(), act.cwiseAbs()), 0.95);
}

TEST(Var, RecoversKnownDynamics) {
    Eigen::MatrixXd A(2, 2);
    A << 0.6, 0.2, -0.1, 0.5;
    Rng rng(6);
    Eigen::MatrixXd F(400, 2);
    F.row(0) << 1, -1;
    for (int t = 1; t < 400; ++t) {
        Eigen::Vector2d e(rng.normal(), rng.normal());
        F.row(t) = (A * F.row(t - 1).transpose() + 0.01 * e).transpose();
        if (t % 50 == 0) F.row(t) += Eigen::RowVector2d(rng.normal(), rng.normal());  // re-excite
    }
    const auto v = fit_var1(F);
    EXPECT_LT((v.A - A).norm(), 0.05);
    EXPECT_LT(v.spectral_radius, 1.0);
}

TEST(Var, WhiteNoiseGivesSmallCoefficients) {
    const int n = 400;
    for (std::uint64_t s = 1; s <= 10; ++s) {
        Rng rng(s);
        Eigen::MatrixXd F(n, 2);
        for (int t = 0; t < n; ++t) F.row(t) << rng.normal(), rng.normal();
        EXPECT_LT(fit_var1(F).A.cwiseAbs().maxCoeff(), 3.0 / std::sqrt(n)) << s;
    }
}

TEST(Var, DegenerateInputs) {
    EXPECT_THROW(fit_var1(Eigen::MatrixXd::Constant(20, 2, 1.5)), Error);
    EXPECT_THROW(fit_var1(Eigen::MatrixXd::Zero(3, 2)), Error);
}

TEST(Dfm, ExactBridgeOnFactor) {
    const auto d = one_factor(120, 5, 0.5, 7);
    const auto fx = extract_factors(d.X, 2);
    const Eigen::VectorXd y = (1.0 + 2.5 * fx.factors.col(0).array()).matrix();
    const auto fit = fit_dfm(d.X, y, 2);
    EXPECT_LT((dfm_nowcast(fit, d.X) - y).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_EQ(fit.idiosyncratic_ar.size(), 5);
    EXPECT_THROW(dfm_nowcast(fit, Eigen::MatrixXd::Zero(3, 4)), Error);
}

TEST(Dfm, ExtraFactorsUninformative) {
    const auto d = one_factor(240, 8, 0.6, 8);
    Rng rng(9);
    Eigen::VectorXd y(240);
    for (int t = 0; t < 240; ++t) y(t) = 1.5 * d.f(t) + 0.5 * rng.normal();
    const Eigen::MatrixXd Xtr = d.X.topRows(180), Xte = d.X.bottomRows(60);
    auto rmse = [&](int r) {
        const auto fit = fit_dfm(Xtr, y.head(180), r);
        return std::sqrt((dfm_nowcast(fit, Xte) - y.tail(60)).squaredNorm() / 60.0);
    };
    const double r2 = rmse(2), r4 = rmse(4);
    EXPECT_NEAR(r4 / r2, 1.0, 0.10);
}
