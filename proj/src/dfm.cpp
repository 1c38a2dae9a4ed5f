#include "nowcast/dfm.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "nowcast/error.hpp"
#include "nowcast/linear.hpp"

namespace nowcast {

FactorExtraction extract_factors(const Eigen::MatrixXd& X, int r) {
    const Eigen::Index n = X.rows(), m = X.cols();
    if (r < 1 || r > std::min(n, m))
        throw config_error("factor-model", "factor count r=" + std::to_string(r) + " outside [1, min(N, M)]");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    FactorExtraction fx;
    fx.singular_values = svd.singularValues().head(r);
    fx.factors = svd.matrixU().leftCols(r) * sqrt_n;
    fx.loadings = svd.matrixV().leftCols(r) * fx.singular_values.asDiagonal() / sqrt_n;
    for (int k = 0; k < r; ++k) {
        Eigen::Index arg = 0;
        fx.loadings.col(k).cwiseAbs().maxCoeff(&arg);
        if (fx.loadings(arg, k) < 0.0) {
            fx.loadings.col(k) *= -1.0;
            fx.factors.col(k) *= -1.0;
        }
    }
    return fx;
}

Eigen::MatrixXd reconstruct(const FactorExtraction& fx) { return fx.factors * fx.loadings.transpose(); }

Var1Fit fit_var1(const Eigen::MatrixXd& F) {
    const Eigen::Index n = F.rows(), r = F.cols();
    if (n < r + 2) throw data_error("factor-model", "VAR(1) needs at least r + 2 observations");
    Eigen::MatrixXd Z(n - 1, r + 1);
    Z.col(0).setOnes();
    Z.rightCols(r) = F.topRows(n - 1);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    qr.setThreshold(1e-10);
    if (qr.rank() < r + 1) throw numerical_error("factor-model", "VAR(1) lagged regressors are singular");
    const Eigen::MatrixXd B = qr.solve(F.bottomRows(n - 1));  // (r+1) x r
    Var1Fit v;
    v.constant = B.row(0).transpose();
    v.A = B.bottomRows(r).transpose();
    v.spectral_radius = Eigen::EigenSolver<Eigen::MatrixXd>(v.A, false).eigenvalues().cwiseAbs().maxCoeff();
    if (!(v.spectral_radius < 1.0))
        warn("factor-model", "VAR(1) spectral radius " + std::to_string(v.spectral_radius) + " is not below 1");
    return v;
}

Eigen::MatrixXd DfmFit::project(const Eigen::MatrixXd& X) const {
    const Eigen::MatrixXd& L = factors.loadings;
    if (X.cols() != L.rows()) throw data_error("factor-model", "project: column count mismatch");
    const Eigen::MatrixXd gram = L.transpose() * L;
    return (X * L) * gram.ldlt().solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
}

DfmFit fit_dfm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int r) {
    if (y.size() != X.rows()) throw data_error("factor-model", "X and y row counts differ");
    DfmFit fit;
    fit.r = r;
    fit.factors = extract_factors(X, r);
    if (!(fit.factors.singular_values(r - 1) > 1e-10 * std::max(1.0, fit.factors.singular_values(0))))
        throw numerical_error("factor-model", "panel has fewer than r informative components");
    fit.var = fit_var1(fit.factors.factors);

    const Eigen::MatrixXd E = X - reconstruct(fit.factors);
    fit.idiosyncratic_ar.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const auto e = E.col(j);
        const double den = e.head(e.size() - 1).squaredNorm();
        fit.idiosyncratic_ar(j) = den > 0.0 ? e.tail(e.size() - 1).dot(e.head(e.size() - 1)) / den : 0.0;
    }

    const LinearFit bridge = fit_ols(fit.factors.factors, y);
    fit.bridge_intercept = bridge.intercept;
    fit.bridge_weights = bridge.weights;
    return fit;
}

Eigen::VectorXd dfm_nowcast(const DfmFit& fit, const Eigen::MatrixXd& X) {
    return (fit.project(X) * fit.bridge_weights).array() + fit.bridge_intercept;
}

} // namespace nowcast
