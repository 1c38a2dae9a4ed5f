#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nowcast {

enum class Activation { Relu, Tanh, Identity };
enum class LrSchedule { Constant, AdaptiveHalving };

Activation parse_activation(const std::string& name);

// Feed-forward network: hidden layers use `activation`, the output unit is linear.
struct MlpParams {
    std::vector<int> layer_sizes;  // input, hidden..., 1
    Activation activation = Activation::Relu;
    std::vector<Eigen::MatrixXd> weights;  // weights[l]: sizes[l+1] x sizes[l]
    std::vector<Eigen::VectorXd> biases;

    // Glorot-uniform weights r = sqrt(6 / (fan_in + fan_out)), zero biases.
    static MlpParams glorot(std::vector<int> layer_sizes, Activation activation, std::uint64_t seed);
    static MlpParams zeros(std::vector<int> layer_sizes, Activation activation);

    std::size_t parameter_count() const;
    Eigen::VectorXd flatten() const;
    void assign(const Eigen::VectorXd& flat);
    bool all_finite() const;

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

struct MlpTrainOptions {
    double learning_rate = 0.05;
    LrSchedule schedule = LrSchedule::AdaptiveHalving;
    int epochs = 2000;
    double min_learning_rate = 1e-8;
};

struct MlpModel {
    MlpParams params;
    std::vector<double> loss_history;  // training MSE before epoch 1, then after each epoch
    std::vector<double> learning_rates;

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const { return params.predict(X); }
};

double mlp_loss(const MlpParams& params, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
// Gradient of the MSE with respect to flatten() order.
Eigen::VectorXd mlp_gradient(const MlpParams& params, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Full-batch gradient descent on MSE from `initial`. With adaptive halving a
// step that would raise the loss is rejected and the rate halved. Throws
// Error(Numerical) if a forward pass produces NaN/Inf.
MlpModel fit_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, MlpParams initial,
                 const MlpTrainOptions& options);

struct GradCheckOptions {
    int probes = 20;
    double h = 1e-5;
    std::uint64_t seed = 0;
    bool avoid_kinks = true;  // redraw probes whose +-h evaluations change a relu mask
};

// Max relative error between backprop and central finite differences over
// randomly chosen parameters.
double grad_check(const MlpParams& params, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const GradCheckOptions& options);

} // namespace nowcast
