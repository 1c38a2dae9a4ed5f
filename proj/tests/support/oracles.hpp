#pragma once

// Brute-force reference solvers shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "nowcast/linear.hpp"
#include "nowcast/random.hpp"

namespace nowcast::oracle {

inline Eigen::MatrixXd gaussian(int n, int m, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd X(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) X(i, j) = rng.normal();
    return X;
}

inline Eigen::MatrixXd standardized(Eigen::MatrixXd X) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        X.col(j).array() -= X.col(j).mean();
        X.col(j) /= std::sqrt(X.col(j).squaredNorm() / static_cast<double>(X.rows()));
    }
    return X;
}

inline Eigen::VectorXd linear_target(const Eigen::MatrixXd& X, std::uint64_t seed, double noise) {
    Rng rng(seed);
    Eigen::VectorXd w(X.cols());
    for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = (j % 2 ? -1.0 : 1.0) * (0.5 + 0.3 * static_cast<double>(j));
    Eigen::VectorXd y = X * w;
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += 1.5 + noise * rng.normal();
    return y;
}

// Proximal gradient (FISTA) on the same objective, intercept unpenalized.
inline double fista_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const EnetPenalty& pen) {
    const Eigen::Index n = X.rows(), m = X.cols();
    Eigen::MatrixXd A(n, m + 1);
    A.col(0).setOnes();
    A.rightCols(m) = X;
    const double L = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A.transpose() * A).eigenvalues().maxCoeff() +
                     2.0 * pen.lambda2;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m + 1), z = x, prev = x;
    double t = 1.0;
    for (int it = 0; it < 200000; ++it) {
        Eigen::VectorXd g = -2.0 * A.transpose() * (y - A * z);
        g.tail(m) += 2.0 * pen.lambda2 * z.tail(m);
        Eigen::VectorXd u = z - g / L;
        for (Eigen::Index j = 1; j <= m; ++j) {
            const double s = pen.lambda1 / L;
            u(j) = u(j) > s ? u(j) - s : u(j) < -s ? u(j) + s : 0.0;
        }
        prev = x;
        x = u;
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        z = x + ((t - 1.0) / tn) * (x - prev);
        t = tn;
    }
    return enet_objective(X, y, x.tail(m), x(0), pen);
}

// Dual objective in maximized form for coefficients beta = alpha - alpha*.
inline double svr_dual(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, const Eigen::VectorXd& a, const Eigen::VectorXd& as,
                double eps) {
    const Eigen::VectorXd beta = a - as;
    return -0.5 * beta.dot(K * beta) - eps * (a.sum() + as.sum()) + y.dot(beta);
}

// Euclidean projection onto {0 <= v <= C, sum(v_a) - sum(v_as) = 0} by bisection on the multiplier.
inline void project(Eigen::VectorXd& a, Eigen::VectorXd& as, double C) {
    auto residual = [&](double mu, Eigen::VectorXd* pa, Eigen::VectorXd* pas) {
        const Eigen::VectorXd ca = (a.array() - mu).cwiseMax(0.0).cwiseMin(C);
        const Eigen::VectorXd cs = (as.array() + mu).cwiseMax(0.0).cwiseMin(C);
        if (pa) {
            *pa = ca;
            *pas = cs;
        }
        return ca.sum() - cs.sum();
    };
    double lo = -1e3, hi = 1e3;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid, nullptr, nullptr) > 0 ? lo : hi) = mid;
    }
    Eigen::VectorXd na, ns;
    residual(0.5 * (lo + hi), &na, &ns);
    a = na;
    as = ns;
}

inline double qp_oracle(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double C, double eps) {
    const Eigen::Index n = y.size();
    const double L = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K).eigenvalues().maxCoeff() + 1e-12;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n), as = a, za = a, zs = a;
    double t = 1.0;
    for (int it = 0; it < 100000; ++it) {
        const Eigen::VectorXd beta = za - zs;
        const Eigen::VectorXd g = y - K * beta;  // ascent direction for beta
        Eigen::VectorXd na = za + (g.array() - eps).matrix() / L;
        Eigen::VectorXd ns = zs + (-g.array() - eps).matrix() / L;
        project(na, ns, C);
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        za = na + ((t - 1.0) / tn) * (na - a);
        zs = ns + ((t - 1.0) / tn) * (ns - as);
        a = na;
        as = ns;
        t = tn;
    }
    return svr_dual(K, y, a, as, eps);
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
};

// Every (feature, midpoint) pair, scored by the summed SSE of both sides.
inline Split exhaustive_root(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Split best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int f = 0; f < X.cols(); ++f) {
        std::vector<double> vals(X.col(f).data(), X.col(f).data() + X.rows());
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
            const double thr = 0.5 * (vals[k] + vals[k + 1]);
            double sl = 0, sr = 0, nl = 0, nr = 0;
            for (Eigen::Index i = 0; i < X.rows(); ++i) (X(i, f) < thr ? (sl += y(i), nl += 1) : (sr += y(i), nr += 1));
            double sse = 0;
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                const double mu = X(i, f) < thr ? sl / nl : sr / nr;
                sse += (y(i) - mu) * (y(i) - mu);
            }
            if (sse < best_sse) {
                best_sse = sse;
                best = {f, thr};
            }
        }
    }
    return best;
}

} // namespace nowcast::oracle
