#pragma once

#include <Eigen/Dense>

namespace nowcast {

struct FactorExtraction {
    Eigen::MatrixXd loadings;  // M x r
    Eigen::MatrixXd factors;   // N x r, zero mean, unit (population) variance, mutually orthogonal
    Eigen::VectorXd singular_values;
};

// Principal-component factors of a standardized panel. Each loading column is
// signed so its largest-magnitude entry is positive.
FactorExtraction extract_factors(const Eigen::MatrixXd& Xstd, int r);

// Reconstruction F * Lambda^T.
Eigen::MatrixXd reconstruct(const FactorExtraction& fx);

struct Var1Fit {
    Eigen::MatrixXd A;         // r x r
    Eigen::VectorXd constant;  // r
    double spectral_radius = 0.0;
};

// Least squares f_t = c + A f_{t-1} + u_t. Requires N >= r + 2; throws
// Error(Numerical) when the lagged regressors are singular.
Var1Fit fit_var1(const Eigen::MatrixXd& factors);

struct DfmFit {
    FactorExtraction factors;
    Var1Fit var;
    Eigen::VectorXd idiosyncratic_ar;  // AR(1) coefficient of each column's residual
    double bridge_intercept = 0.0;
    Eigen::VectorXd bridge_weights;    // r
    int r = 2;

    // Factor scores for new standardized rows.
    Eigen::MatrixXd project(const Eigen::MatrixXd& Xstd) const;
};

DfmFit fit_dfm(const Eigen::MatrixXd& Xstd, const Eigen::VectorXd& y, int r);

// Bridge regression on contemporaneous factors; rows are already lag-aligned.
Eigen::VectorXd dfm_nowcast(const DfmFit& fit, const Eigen::MatrixXd& Xstd);

} // namespace nowcast
