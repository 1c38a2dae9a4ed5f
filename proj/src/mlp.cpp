#include "nowcast/mlp.hpp"

#include <cmath>

#include "nowcast/error.hpp"
#include "nowcast/random.hpp"

namespace nowcast {

Activation parse_activation(const std::string& name) {
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    if (name == "identity" || name == "linear") return Activation::Identity;
    throw config_error("neural-model", "unknown activation '" + name + "'");
}

namespace {

void check_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw config_error("neural-model", "network needs input and output layers");
    for (int s : sizes)
        if (s < 1) throw config_error("neural-model", "layer sizes must be >= 1");
    if (sizes.back() != 1) throw config_error("neural-model", "output layer must have one unit");
}

Eigen::MatrixXd activate(const Eigen::MatrixXd& Z, Activation a) {
    switch (a) {
    case Activation::Relu: return Z.cwiseMax(0.0);
    case Activation::Tanh: return Z.array().tanh().matrix();
    case Activation::Identity: return Z;
    }
    return Z;
}

Eigen::MatrixXd derivative(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& A, Activation a) {
    switch (a) {
    case Activation::Relu: return (Z.array() > 0.0).cast<double>().matrix();
    case Activation::Tanh: return (1.0 - A.array().square()).matrix();
    case Activation::Identity: return Eigen::MatrixXd::Ones(Z.rows(), Z.cols());
    }
    return Z;
}

struct Forward {
    std::vector<Eigen::MatrixXd> Z;  // pre-activations per layer
    std::vector<Eigen::MatrixXd> A;  // A[0] = X^T, A[l+1] = act(Z[l])
};

Forward forward(const MlpParams& p, const Eigen::MatrixXd& X) {
    if (X.cols() != p.layer_sizes.front())
        throw data_error("neural-model", "expected " + std::to_string(p.layer_sizes.front()) + " input columns, got " +
                                             std::to_string(X.cols()));
    Forward f;
    f.A.push_back(X.transpose());
    const std::size_t L = p.weights.size();
    for (std::size_t l = 0; l < L; ++l) {
        Eigen::MatrixXd Z = (p.weights[l] * f.A.back()).colwise() + p.biases[l];
        f.A.push_back(l + 1 < L ? activate(Z, p.activation) : Z);
        f.Z.push_back(std::move(Z));
    }
    return f;
}

double mse_of(const Eigen::MatrixXd& out, const Eigen::VectorXd& y) {
    return (out.row(0).transpose() - y).squaredNorm() / static_cast<double>(y.size());
}

std::vector<Eigen::MatrixXd> relu_masks(const MlpParams& p, const Eigen::MatrixXd& X) {
    auto f = forward(p, X);
    std::vector<Eigen::MatrixXd> masks;
    for (std::size_t l = 0; l + 1 < f.Z.size(); ++l) masks.push_back((f.Z[l].array() > 0.0).cast<double>().matrix());
    return masks;
}

} // namespace

MlpParams MlpParams::zeros(std::vector<int> sizes, Activation activation) {
    check_sizes(sizes);
    MlpParams p;
    p.layer_sizes = std::move(sizes);
    p.activation = activation;
    for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
        p.weights.push_back(Eigen::MatrixXd::Zero(p.layer_sizes[l + 1], p.layer_sizes[l]));
        p.biases.push_back(Eigen::VectorXd::Zero(p.layer_sizes[l + 1]));
    }
    return p;
}

MlpParams MlpParams::glorot(std::vector<int> sizes, Activation activation, std::uint64_t seed) {
    MlpParams p = zeros(std::move(sizes), activation);
    Rng rng(seed);
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const double r = std::sqrt(6.0 / (p.layer_sizes[l] + p.layer_sizes[l + 1]));
        auto& W = p.weights[l];
        for (Eigen::Index j = 0; j < W.cols(); ++j)
            for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = rng.uniform(-r, r);
    }
    return p;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return n;
}

Eigen::VectorXd MlpParams::flatten() const {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        flat.segment(k, weights[l].size()) = weights[l].reshaped();
        k += weights[l].size();
        flat.segment(k, biases[l].size()) = biases[l];
        k += biases[l].size();
    }
    return flat;
}

void MlpParams::assign(const Eigen::VectorXd& flat) {
    if (flat.size() != static_cast<Eigen::Index>(parameter_count()))
        throw data_error("neural-model", "parameter vector has the wrong length");
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l].reshaped() = flat.segment(k, weights[l].size());
        k += weights[l].size();
        biases[l] = flat.segment(k, biases[l].size());
        k += biases[l].size();
    }
}

bool MlpParams::all_finite() const {
    for (std::size_t l = 0; l < weights.size(); ++l)
        if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
    return true;
}

Eigen::VectorXd MlpParams::predict(const Eigen::MatrixXd& X) const {
    auto f = forward(*this, X);
    return f.A.back().row(0).transpose();
}

double mlp_loss(const MlpParams& p, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    return mse_of(forward(p, X).A.back(), y);
}

Eigen::VectorXd mlp_gradient(const MlpParams& p, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    auto f = forward(p, X);
    const std::size_t L = p.weights.size();
    const double n = static_cast<double>(y.size());
    Eigen::MatrixXd delta = 2.0 / n * (f.A.back() - y.transpose());
    std::vector<Eigen::MatrixXd> gW(L);
    std::vector<Eigen::VectorXd> gb(L);
    for (std::size_t l = L; l-- > 0;) {
        gW[l] = delta * f.A[l].transpose();
        gb[l] = delta.rowwise().sum();
        if (l > 0) delta = (p.weights[l].transpose() * delta).cwiseProduct(derivative(f.Z[l - 1], f.A[l], p.activation));
    }
    Eigen::VectorXd flat(static_cast<Eigen::Index>(p.parameter_count()));
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < L; ++l) {
        flat.segment(k, gW[l].size()) = gW[l].reshaped();
        k += gW[l].size();
        flat.segment(k, gb[l].size()) = gb[l];
        k += gb[l].size();
    }
    return flat;
}

MlpModel fit_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, MlpParams initial, const MlpTrainOptions& opt) {
    if (X.rows() == 0 || y.size() != X.rows()) throw data_error("neural-model", "empty or mismatched training data");
    if (!(opt.learning_rate > 0.0)) throw config_error("neural-model", "learning_rate must be > 0");
    if (opt.epochs < 0) throw config_error("neural-model", "epochs must be >= 0");
    if (!initial.all_finite()) throw numerical_error("neural-model", "initial parameters are not finite");

    MlpModel model;
    model.params = std::move(initial);
    double loss = mlp_loss(model.params, X, y);
    if (!std::isfinite(loss)) throw numerical_error("neural-model", "non-finite loss in the initial forward pass");
    model.loss_history.push_back(loss);
    double lr = opt.learning_rate;
    Eigen::VectorXd theta = model.params.flatten();
    MlpParams trial = model.params;
    for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
        const Eigen::VectorXd g = mlp_gradient(model.params, X, y);
        trial.assign(theta - lr * g);
        const double next = trial.all_finite() ? mlp_loss(trial, X, y) : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(next))
            throw numerical_error("neural-model", "non-finite loss at epoch " + std::to_string(epoch) +
                                                      " (learning rate " + std::to_string(lr) + ")");
        if (opt.schedule == LrSchedule::AdaptiveHalving && next > loss) {
            lr /= 2.0;
        } else {
            theta = trial.flatten();
            model.params = trial;
            loss = next;
        }
        model.loss_history.push_back(loss);
        model.learning_rates.push_back(lr);
        if (lr < opt.min_learning_rate) break;
    }
    return model;
}

double grad_check(const MlpParams& params, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const GradCheckOptions& opt) {
    if (!(opt.h > 0.0)) throw config_error("neural-model", "grad_check step h must be > 0");
    const Eigen::VectorXd analytic = mlp_gradient(params, X, y);
    const Eigen::VectorXd theta = params.flatten();
    const auto count = static_cast<std::size_t>(theta.size());
    const bool check_masks = opt.avoid_kinks && params.activation == Activation::Relu && params.weights.size() > 1;
    const auto base_masks = check_masks ? relu_masks(params, X) : std::vector<Eigen::MatrixXd>{};

    Rng rng(opt.seed);
    MlpParams probe = params;
    double worst = 0.0;
    int done = 0, attempts = 0;
    while (done < opt.probes && attempts < 100 * std::max(1, opt.probes)) {
        ++attempts;
        const auto k = static_cast<Eigen::Index>(rng.index(count));
        Eigen::VectorXd t = theta;
        t(k) = theta(k) + opt.h;
        probe.assign(t);
        if (check_masks && relu_masks(probe, X) != base_masks) continue;
        const double up = mlp_loss(probe, X, y);
        t(k) = theta(k) - opt.h;
        probe.assign(t);
        if (check_masks && relu_masks(probe, X) != base_masks) continue;
        const double down = mlp_loss(probe, X, y);
        const double numeric = (up - down) / (2.0 * opt.h);
        const double a = analytic(k);
        worst = std::max(worst, std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-10));
        ++done;
    }
    if (done == 0) throw numerical_error("neural-model", "grad_check found no probe away from relu kinks");
    return worst;
}

} // namespace nowcast
