#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nowcast/frame.hpp"
#include "nowcast/params.hpp"

namespace nowcast {

struct SolverDiagnostics {
    int iterations = 0;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    bool converged = true;
    std::vector<double> objective_history;  // one entry per sweep (ENT)
};

struct LinearFit {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    ParamSet hyperparams;
    SolverDiagnostics diagnostics;
    Eigen::VectorXd residuals;  // training residuals y - yhat
};

// Least squares with intercept via column-pivoted QR. Requires N > M + 1 and a
// full-rank design; throws Error(Numerical) otherwise.
LinearFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
LinearFit fit_ols(const FeatureFrame& frame);

struct EnetOptions {
    double alpha = 0.001;
    double l1_ratio = 0.5;
    int max_iter = 10000;
    double tol = 1e-8;
};

// Penalty weights of the elastic-net objective
//   ||y - Xw - b||^2 + lambda1 ||w||_1 + lambda2 ||w||_2^2
// with lambda1 = alpha * l1_ratio * N and lambda2 = alpha * (1 - l1_ratio) * N / 2.
struct EnetPenalty {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};
EnetPenalty enet_penalty(double alpha, double l1_ratio, std::size_t n);
double enet_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                      const EnetPenalty& penalty);

// Cyclic coordinate descent with soft-thresholding. Columns must be
// standardized. Exhausting max_iter warns and returns the last iterate.
LinearFit fit_enet(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const EnetOptions& options);

Eigen::VectorXd predict_linear(const LinearFit& fit, const Eigen::MatrixXd& X);

enum class KernelType { Linear, Rbf, Poly };
KernelType parse_kernel(const std::string& name);
std::string kernel_str(KernelType k);

struct SvrOptions {
    double C = 3.0;
    double epsilon = 0.3;
    KernelType kernel = KernelType::Rbf;
    int degree = 2;       // poly only; stored but inert for rbf
    double gamma = 0.0;   // <= 0 in options means "1 / M"
    double coef0 = 1.0;   // poly offset
    int max_iter = 200000;
    double tol = 1e-6;
};

class SvrModel {
public:
    double predict_row(const Eigen::RowVectorXd& x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

    const Eigen::VectorXd& coefficients() const { return coef_; }  // alpha - alpha*
    const Eigen::VectorXd& alpha() const { return alpha_; }         // [alpha; alpha*]
    double bias() const { return bias_; }
    double dual_objective() const { return dual_objective_; }     // maximised form
    double kkt_violation() const { return violation_; }
    int iterations() const { return iterations_; }
    const SvrOptions& options() const { return options_; }
    double gamma() const { return gamma_; }

private:
    friend SvrModel fit_svr(const Eigen::MatrixXd&, const Eigen::VectorXd&, const SvrOptions&);
    double kernel(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const;

    SvrOptions options_;
    double gamma_ = 1.0;
    Eigen::MatrixXd support_;
    Eigen::VectorXd coef_;
    Eigen::VectorXd alpha_;
    double bias_ = 0.0;
    double dual_objective_ = 0.0;
    double violation_ = 0.0;
    int iterations_ = 0;
};

double svr_kernel(KernelType kernel, double gamma, int degree, double coef0, const Eigen::RowVectorXd& a,
                  const Eigen::RowVectorXd& b);

// Epsilon-SVR dual, SMO with second-order working-set selection.
SvrModel fit_svr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SvrOptions& options);

} // namespace nowcast
