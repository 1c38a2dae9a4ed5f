#pragma once

#include <vector>

#include <Eigen/Dense>

namespace nowcast {

struct FScore {
    double F = 0.0;
    double p = 1.0;
};

// Univariate regression F-test: r = corr(x, y), F = r^2 / (1 - r^2) * (n - 2),
// p from the F(1, n - 2) upper tail. A perfect correlation yields F = f_cap, p = 0.
// Throws Error(Data) for a constant column or n < 3.
FScore fscore(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double f_cap = 1e12);

// Indices of the k largest F scores among `candidates` (all columns when
// empty), ties to the lower index, returned in ascending index order.
std::vector<int> select_k_best(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k,
                               const std::vector<int>& candidates = {});

} // namespace nowcast
