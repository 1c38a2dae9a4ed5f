#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nowcast/frame.hpp"
#include "nowcast/params.hpp"

namespace nowcast {

enum class ModelFamily { Ols, Enet, Svr, Rfr, Gbr, Mlp, Dfm };

ModelFamily parse_model_family(const std::string& name);
std::string model_family_str(ModelFamily f);

struct ModelSpec {
    ModelFamily family = ModelFamily::Ols;
    ParamSet params;
    std::string str() const;
};

// A trained regressor. Inputs are full-width frame rows; the model applies its
// own column selection and scaling.
class FittedModel {
public:
    virtual ~FittedModel() = default;

    // Columns of the training frame the model consumes, ascending.
    const std::vector<int>& input_columns() const { return input_columns_; }
    const ParamSet& hyperparams() const { return hyperparams_; }

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
    double predict_row(const Eigen::RowVectorXd& x) const;
    // Inputs restricted to input_columns(), in that order.
    virtual Eigen::VectorXd predict_selected(const Eigen::MatrixXd& Xsel) const = 0;

protected:
    std::vector<int> input_columns_;
    ParamSet hyperparams_;
};

using ModelHandle = std::shared_ptr<const FittedModel>;

// Fits a ModelSpec on a training frame. Parameter `p` ("all" or an integer)
// keeps the p best payment columns by F score on the training rows; all
// non-payment columns are always kept. Parameter `features = benchmark` drops
// payment columns entirely.
ModelHandle fit_model(const ModelSpec& spec, const FeatureFrame& train);

// Default grid for a model family (used when the config declares none).
ParamGrid default_grid(ModelFamily family);

} // namespace nowcast
