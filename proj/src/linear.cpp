#include "nowcast/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nowcast/error.hpp"
#include "nowcast/text.hpp"

namespace nowcast {

LinearFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows(), m = X.cols();
    if (y.size() != n) throw data_error("linear-models", "ols: X and y row counts differ");
    if (n <= m + 1)
        throw numerical_error("linear-models", "ols needs more rows than features + 1 (N=" + std::to_string(n) +
                                                   ", M=" + std::to_string(m) + ")");
    Eigen::MatrixXd A(n, m + 1);
    A.col(0).setOnes();
    A.rightCols(m) = X;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < m + 1) throw numerical_error("linear-models", "ols design matrix is rank deficient");
    Eigen::VectorXd beta = qr.solve(y);
    // One step of iterative refinement.
    beta += qr.solve(y - A * beta);

    LinearFit fit;
    fit.intercept = beta(0);
    fit.weights = beta.tail(m);
    fit.residuals = y - A * beta;
    fit.diagnostics.iterations = 1;
    fit.diagnostics.final_objective = fit.residuals.squaredNorm();
    fit.diagnostics.initial_objective = fit.diagnostics.final_objective;
    return fit;
}

LinearFit fit_ols(const FeatureFrame& frame) { return fit_ols(frame.X, frame.y); }

EnetPenalty enet_penalty(double alpha, double l1_ratio, std::size_t n) {
    const double N = static_cast<double>(n);
    return {alpha * l1_ratio * N, alpha * (1.0 - l1_ratio) * N / 2.0};
}

double enet_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                      const EnetPenalty& p) {
    const Eigen::VectorXd r = y - X * w - Eigen::VectorXd::Constant(y.size(), b);
    return r.squaredNorm() + p.lambda1 * w.lpNorm<1>() + p.lambda2 * w.squaredNorm();
}

LinearFit fit_enet(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const EnetOptions& opt) {
    const Eigen::Index n = X.rows(), m = X.cols();
    if (y.size() != n || n == 0) throw data_error("linear-models", "enet: X and y row counts differ");
    if (!(opt.alpha >= 0.0)) throw config_error("linear-models", "enet alpha must be >= 0");
    if (!(opt.l1_ratio >= 0.0 && opt.l1_ratio <= 1.0)) throw config_error("linear-models", "enet l1_ratio must lie in [0, 1]");
    if (!is_standardized(X, 1e-6)) throw data_error("linear-models", "enet requires standardized columns");

    const EnetPenalty pen = enet_penalty(opt.alpha, opt.l1_ratio, static_cast<std::size_t>(n));
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    double b = y.mean();
    Eigen::VectorXd r = y - Eigen::VectorXd::Constant(n, b);  // y - Xw - b
    Eigen::VectorXd col_sq(m);
    for (Eigen::Index j = 0; j < m; ++j) col_sq(j) = X.col(j).squaredNorm();

    LinearFit fit;
    fit.diagnostics.initial_objective = enet_objective(X, y, w, b, pen);
    double prev = fit.diagnostics.initial_objective;
    fit.diagnostics.converged = false;
    const double thresh = pen.lambda1 / 2.0;
    int sweep = 0;
    while (sweep < opt.max_iter) {
        ++sweep;
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double old = w(j);
            const double rho = X.col(j).dot(r) + col_sq(j) * old;
            double nw = 0.0;
            if (rho > thresh) nw = (rho - thresh) / (col_sq(j) + pen.lambda2);
            else if (rho < -thresh) nw = (rho + thresh) / (col_sq(j) + pen.lambda2);
            if (nw != old) {
                r -= X.col(j) * (nw - old);
                w(j) = nw;
                max_change = std::max(max_change, std::abs(nw - old));
            }
        }
        const double shift = r.mean();
        if (shift != 0.0) {
            b += shift;
            r.array() -= shift;
            max_change = std::max(max_change, std::abs(shift));
        }
        const double obj = enet_objective(X, y, w, b, pen);
        if (obj > prev + 1e-12 * std::max(1.0, std::abs(prev)))
            throw numerical_error("linear-models", "enet objective increased at sweep " + std::to_string(sweep));
        fit.diagnostics.objective_history.push_back(obj);
        prev = obj;
        if (max_change < opt.tol) {
            fit.diagnostics.converged = true;
            break;
        }
    }
    if (!fit.diagnostics.converged)
        warn("linear-models", "enet reached max_iter=" + std::to_string(opt.max_iter) + " without converging");

    fit.weights = w;
    fit.intercept = b;
    fit.residuals = r;
    fit.diagnostics.iterations = sweep;
    fit.diagnostics.final_objective = prev;
    fit.hyperparams.set("alpha", format_double(opt.alpha));
    fit.hyperparams.set("l1_ratio", format_double(opt.l1_ratio));
    fit.hyperparams.set("lambda1", format_double(pen.lambda1));
    fit.hyperparams.set("lambda2", format_double(pen.lambda2));
    return fit;
}

Eigen::VectorXd predict_linear(const LinearFit& fit, const Eigen::MatrixXd& X) {
    if (X.cols() != fit.weights.size())
        throw data_error("linear-models", "predict: expected " + std::to_string(fit.weights.size()) + " columns, got " +
                                              std::to_string(X.cols()));
    return (X * fit.weights).array() + fit.intercept;
}

KernelType parse_kernel(const std::string& name) {
    if (name == "linear") return KernelType::Linear;
    if (name == "rbf") return KernelType::Rbf;
    if (name == "poly") return KernelType::Poly;
    throw config_error("linear-models", "unknown kernel '" + name + "'");
}

std::string kernel_str(KernelType k) {
    switch (k) {
    case KernelType::Linear: return "linear";
    case KernelType::Rbf: return "rbf";
    case KernelType::Poly: return "poly";
    }
    return "?";
}

double svr_kernel(KernelType kernel, double gamma, int degree, double coef0, const Eigen::RowVectorXd& a,
                  const Eigen::RowVectorXd& b) {
    switch (kernel) {
    case KernelType::Linear: return a.dot(b);
    case KernelType::Rbf: return std::exp(-gamma * (a - b).squaredNorm());
    case KernelType::Poly: return std::pow(gamma * a.dot(b) + coef0, degree);
    }
    return 0.0;
}

double SvrModel::kernel(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const {
    return svr_kernel(options_.kernel, gamma_, options_.degree, options_.coef0, a, b);
}

double SvrModel::predict_row(const Eigen::RowVectorXd& x) const {
    if (x.size() != support_.cols()) throw data_error("linear-models", "svr predict: column count mismatch");
    double f = bias_;
    for (Eigen::Index i = 0; i < support_.rows(); ++i)
        if (coef_(i) != 0.0) f += coef_(i) * kernel(support_.row(i), x);
    return f;
}

Eigen::VectorXd SvrModel::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_row(X.row(i));
    return out;
}

SvrModel fit_svr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SvrOptions& opt) {
    const Eigen::Index n = X.rows();
    if (n == 0 || y.size() != n) throw data_error("linear-models", "svr: empty or mismatched training data");
    if (!(opt.C > 0.0)) throw config_error("linear-models", "svr C must be > 0");
    if (!(opt.epsilon >= 0.0)) throw config_error("linear-models", "svr epsilon must be >= 0");
    if (opt.gamma < 0.0 || !std::isfinite(opt.gamma))
        throw config_error("linear-models", "svr gamma must be > 0 (kernel would not be positive semidefinite)");
    if (opt.kernel == KernelType::Poly && opt.degree < 1) throw config_error("linear-models", "poly degree must be >= 1");

    SvrModel model;
    model.options_ = opt;
    model.gamma_ = opt.gamma > 0.0 ? opt.gamma : 1.0 / static_cast<double>(std::max<Eigen::Index>(1, X.cols()));
    model.support_ = X;

    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) K(i, j) = K(j, i) = model.kernel(X.row(i), X.row(j));

    // 2N variables: a_i = alpha_i (label +1), a_{i+N} = alpha*_i (label -1).
    const Eigen::Index l = 2 * n;
    std::vector<double> sign(static_cast<std::size_t>(l)), a(static_cast<std::size_t>(l), 0.0),
        G(static_cast<std::size_t>(l)), p(static_cast<std::size_t>(l));
    for (Eigen::Index i = 0; i < n; ++i) {
        sign[i] = 1.0;
        sign[i + n] = -1.0;
        p[i] = opt.epsilon - y(i);
        p[i + n] = opt.epsilon + y(i);
    }
    G = p;
    const double C = opt.C;
    auto Q = [&](Eigen::Index i, Eigen::Index j) { return sign[i] * sign[j] * K(i % n, j % n); };
    auto up = [&](Eigen::Index t) { return sign[t] > 0 ? a[t] < C : a[t] > 0.0; };
    auto low = [&](Eigen::Index t) { return sign[t] > 0 ? a[t] > 0.0 : a[t] < C; };
    constexpr double tau = 1e-12;

    int iter = 0;
    double violation = 0.0;
    for (;;) {
        double gmax = -std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index t = 0; t < l; ++t)
            if (up(t) && -sign[t] * G[t] >= gmax) {
                if (-sign[t] * G[t] > gmax || i < 0) i = t;
                gmax = -sign[t] * G[t];
            }
        double gmax2 = -std::numeric_limits<double>::infinity();
        Eigen::Index j = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < l; ++t) {
            if (!low(t)) continue;
            gmax2 = std::max(gmax2, sign[t] * G[t]);
            if (i < 0) continue;
            const double bgap = gmax + sign[t] * G[t];
            if (bgap > 0.0) {
                double quad = K(i % n, i % n) + K(t % n, t % n) - 2.0 * sign[i] * sign[t] * Q(i, t);
                if (quad <= 0.0) quad = tau;
                const double obj = -bgap * bgap / quad;
                if (obj < best) {
                    best = obj;
                    j = t;
                }
            }
        }
        violation = (i < 0 || !std::isfinite(gmax2)) ? 0.0 : gmax + gmax2;
        if (i < 0 || j < 0 || violation < opt.tol) break;
        if (iter >= opt.max_iter)
            throw numerical_error("linear-models", "svr did not converge within max_iter=" + std::to_string(opt.max_iter) +
                                                       " (KKT violation " + format_double(violation) + ")");
        ++iter;

        const double ai = a[i], aj = a[j];
        const double Qij = Q(i, j), Qii = Q(i, i), Qjj = Q(j, j);
        if (sign[i] != sign[j]) {
            double quad = Qii + Qjj + 2.0 * Qij;
            if (quad <= 0.0) quad = tau;
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0.0) {
                if (a[j] < 0.0) { a[j] = 0.0; a[i] = diff; }
            } else {
                if (a[i] < 0.0) { a[i] = 0.0; a[j] = -diff; }
            }
            if (diff > 0.0) {
                if (a[i] > C) { a[i] = C; a[j] = C - diff; }
            } else {
                if (a[j] > C) { a[j] = C; a[i] = C + diff; }
            }
        } else {
            double quad = Qii + Qjj - 2.0 * Qij;
            if (quad <= 0.0) quad = tau;
            const double delta = (G[i] - G[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > C) {
                if (a[i] > C) { a[i] = C; a[j] = sum - C; }
            } else {
                if (a[j] < 0.0) { a[j] = 0.0; a[i] = sum; }
            }
            if (sum > C) {
                if (a[j] > C) { a[j] = C; a[i] = sum - C; }
            } else {
                if (a[i] < 0.0) { a[i] = 0.0; a[j] = sum; }
            }
        }
        const double di = a[i] - ai, dj = a[j] - aj;
        for (Eigen::Index t = 0; t < l; ++t) G[t] += Q(t, i) * di + Q(t, j) * dj;
    }

    // Bias from free variables, else the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (Eigen::Index t = 0; t < l; ++t) {
        const double yg = sign[t] * G[t];
        if (a[t] >= C) {
            if (sign[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (a[t] <= 0.0) {
            if (sign[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / n_free : (ub + lb) / 2.0;

    model.alpha_.resize(l);
    model.coef_.resize(n);
    for (Eigen::Index t = 0; t < l; ++t) model.alpha_(t) = a[t];
    for (Eigen::Index i = 0; i < n; ++i) model.coef_(i) = a[i] - a[i + n];
    model.bias_ = -rho;
    // Primal-form dual value: 0.5 a'Qa + p'a = 0.5 sum a (G + p).
    double half = 0.0;
    for (Eigen::Index t = 0; t < l; ++t) half += a[t] * (G[t] + p[t]);
    model.dual_objective_ = -0.5 * half;
    model.violation_ = violation;
    model.iterations_ = iter;
    return model;
}

} // namespace nowcast
