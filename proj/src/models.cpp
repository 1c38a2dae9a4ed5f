#include "nowcast/models.hpp"

#include <algorithm>
#include <cmath>

#include "nowcast/dfm.hpp"
#include "nowcast/error.hpp"
#include "nowcast/linear.hpp"
#include "nowcast/mlp.hpp"
#include "nowcast/selection.hpp"
#include "nowcast/text.hpp"
#include "nowcast/tree.hpp"

namespace nowcast {

ModelFamily parse_model_family(const std::string& name) {
    if (name == "ols") return ModelFamily::Ols;
    if (name == "enet" || name == "ent") return ModelFamily::Enet;
    if (name == "svr") return ModelFamily::Svr;
    if (name == "rfr") return ModelFamily::Rfr;
    if (name == "gbr") return ModelFamily::Gbr;
    if (name == "mlp" || name == "ann") return ModelFamily::Mlp;
    if (name == "dfm") return ModelFamily::Dfm;
    throw config_error("cli", "unknown model '" + name + "' (ols, enet, svr, rfr, gbr, mlp, dfm)");
}

std::string model_family_str(ModelFamily f) {
    switch (f) {
    case ModelFamily::Ols: return "ols";
    case ModelFamily::Enet: return "enet";
    case ModelFamily::Svr: return "svr";
    case ModelFamily::Rfr: return "rfr";
    case ModelFamily::Gbr: return "gbr";
    case ModelFamily::Mlp: return "mlp";
    case ModelFamily::Dfm: return "dfm";
    }
    return "?";
}

std::string ModelSpec::str() const {
    const std::string p = params.str();
    return model_family_str(family) + (p.empty() ? "" : ":" + p);
}

Eigen::VectorXd FittedModel::predict(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd sel(X.rows(), static_cast<Eigen::Index>(input_columns_.size()));
    for (std::size_t j = 0; j < input_columns_.size(); ++j) {
        if (input_columns_[j] >= X.cols()) throw data_error("cli", "predict: input has too few columns");
        sel.col(static_cast<Eigen::Index>(j)) = X.col(input_columns_[j]);
    }
    return predict_selected(sel);
}

double FittedModel::predict_row(const Eigen::RowVectorXd& x) const { return predict(Eigen::MatrixXd(x))(0); }

namespace {

class LinearModel : public FittedModel {
public:
    LinearModel(std::vector<int> cols, ParamSet hp, LinearFit fit, std::optional<Standardizer> scale)
        : fit_(std::move(fit)), scale_(std::move(scale)) {
        input_columns_ = std::move(cols);
        hyperparams_ = std::move(hp);
    }
    Eigen::VectorXd predict_selected(const Eigen::MatrixXd& X) const override {
        return predict_linear(fit_, scale_ ? scale_->apply(X) : X);
    }

private:
    LinearFit fit_;
    std::optional<Standardizer> scale_;
};

class SvrFitted : public FittedModel {
public:
    SvrFitted(std::vector<int> cols, ParamSet hp, SvrModel m, Standardizer s) : model_(std::move(m)), scale_(std::move(s)) {
        input_columns_ = std::move(cols);
        hyperparams_ = std::move(hp);
    }
    Eigen::VectorXd predict_selected(const Eigen::MatrixXd& X) const override { return model_.predict(scale_.apply(X)); }

private:
    SvrModel model_;
    Standardizer scale_;
};

class EnsembleFitted : public FittedModel {
public:
    EnsembleFitted(std::vector<int> cols, ParamSet hp, Ensemble e) : ensemble_(std::move(e)) {
        input_columns_ = std::move(cols);
        hyperparams_ = std::move(hp);
    }
    Eigen::VectorXd predict_selected(const Eigen::MatrixXd& X) const override { return predict_ensemble(ensemble_, X); }

private:
    Ensemble ensemble_;
};

class MlpFitted : public FittedModel {
public:
    MlpFitted(std::vector<int> cols, ParamSet hp, MlpModel m, Standardizer s, double ym, double ys)
        : model_(std::move(m)), scale_(std::move(s)), y_mean_(ym), y_sd_(ys) {
        input_columns_ = std::move(cols);
        hyperparams_ = std::move(hp);
    }
    Eigen::VectorXd predict_selected(const Eigen::MatrixXd& X) const override {
        return (model_.predict(scale_.apply(X)).array() * y_sd_ + y_mean_).matrix();
    }

private:
    MlpModel model_;
    Standardizer scale_;
    double y_mean_, y_sd_;
};

class DfmFitted : public FittedModel {
public:
    DfmFitted(std::vector<int> cols, ParamSet hp, DfmFit f, Standardizer s) : fit_(std::move(f)), scale_(std::move(s)) {
        input_columns_ = std::move(cols);
        hyperparams_ = std::move(hp);
    }
    Eigen::VectorXd predict_selected(const Eigen::MatrixXd& X) const override {
        return dfm_nowcast(fit_, scale_.apply(X));
    }

private:
    DfmFit fit_;
    Standardizer scale_;
};

std::vector<int> choose_columns(const ModelSpec& spec, const FeatureFrame& train) {
    const std::string mode = spec.params.get_string("features", spec.family == ModelFamily::Ols ? "benchmark" : "all");
    if (mode != "benchmark" && mode != "all")
        throw config_error("cli", "parameter 'features' must be benchmark or all, got '" + mode + "'");
    std::vector<int> keep, payments;
    for (std::size_t j = 0; j < train.cols(); ++j)
        (train.feature_groups[j] == PredictorGroup::Payments ? payments : keep).push_back(static_cast<int>(j));
    if (mode == "all" && !payments.empty()) {
        const std::string p = spec.params.get_string("p", "all");
        if (p == "all") {
            keep.insert(keep.end(), payments.begin(), payments.end());
        } else {
            const int count = spec.params.get_int("p", 0);
            if (count < 1) throw config_error("cli", "parameter 'p' must be 'all' or a positive integer");
            // Fewer payment columns than requested keeps them all.
            const int k = std::min(count, static_cast<int>(payments.size()));
            auto best = select_k_best(train.X, train.y, k, payments);
            keep.insert(keep.end(), best.begin(), best.end());
        }
    }
    std::sort(keep.begin(), keep.end());
    if (keep.empty()) throw data_error("cli", "model has no input columns");
    return keep;
}

Standardizer fit_scale(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
    std::vector<std::size_t> rows(static_cast<std::size_t>(X.rows()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return fit_standardizer(X, rows, names);
}

} // namespace

ModelHandle fit_model(const ModelSpec& spec, const FeatureFrame& train) {
    if (train.rows() == 0) throw data_error("cli", "empty training frame");
    const auto cols = choose_columns(spec, train);
    const FeatureFrame sel = train.select_columns(cols);
    const auto& P = spec.params;
    const auto seed = static_cast<std::uint64_t>(std::max<long long>(0, parse_int(P.get_string("seed", "0")).value_or(0)));

    switch (spec.family) {
    case ModelFamily::Ols:
        return std::make_shared<LinearModel>(cols, P, fit_ols(sel.X, sel.y), std::nullopt);
    case ModelFamily::Enet: {
        EnetOptions o;
        o.alpha = P.get_double("alpha", o.alpha);
        o.l1_ratio = P.get_double("l1_ratio", o.l1_ratio);
        o.max_iter = P.get_int("max_iter", o.max_iter);
        o.tol = P.get_double("tol", o.tol);
        Standardizer s = fit_scale(sel.X, sel.feature_names);
        auto fit = fit_enet(s.apply(sel.X), sel.y, o);
        return std::make_shared<LinearModel>(cols, P, std::move(fit), std::move(s));
    }
    case ModelFamily::Svr: {
        SvrOptions o;
        o.kernel = parse_kernel(P.get_string("kernel", kernel_str(o.kernel)));
        o.C = P.get_double("C", o.C);
        o.epsilon = P.get_double("epsilon", o.epsilon);
        o.degree = P.get_int("degree", o.degree);
        if (P.has("gamma")) {
            o.gamma = P.get_double("gamma", 0.0);
            if (!(o.gamma > 0.0)) throw config_error("linear-models", "svr gamma must be > 0");
        }
        o.coef0 = P.get_double("coef0", o.coef0);
        o.max_iter = P.get_int("max_iter", o.max_iter);
        o.tol = P.get_double("tol", 1e-3);
        Standardizer s = fit_scale(sel.X, sel.feature_names);
        auto m = fit_svr(s.apply(sel.X), sel.y, o);
        return std::make_shared<SvrFitted>(cols, P, std::move(m), std::move(s));
    }
    case ModelFamily::Rfr: {
        RfrOptions o;
        o.n_estimators = P.get_int("n_estimators", o.n_estimators);
        o.max_depth = P.get_int("max_depth", o.max_depth);
        o.min_samples_split = P.get_int("min_samples_split", o.min_samples_split);
        o.m_features = P.get_int("m_features", o.m_features);
        o.per_split = P.get_bool("per_split", o.per_split);
        o.bootstrap = P.get_bool("bootstrap", o.bootstrap);
        o.seed = seed;
        return std::make_shared<EnsembleFitted>(cols, P, fit_rfr(sel.X, sel.y, o));
    }
    case ModelFamily::Gbr: {
        GbrOptions o;
        o.n_estimators = P.get_int("n_estimators", o.n_estimators);
        o.learning_rate = P.get_double("learning_rate", o.learning_rate);
        o.max_depth = P.get_int("max_depth", o.max_depth);
        o.min_samples_split = P.get_int("min_samples_split", o.min_samples_split);
        o.seed = seed;
        return std::make_shared<EnsembleFitted>(cols, P, fit_gbr(sel.X, sel.y, o));
    }
    case ModelFamily::Mlp: {
        std::vector<int> sizes{static_cast<int>(cols.size())};
        for (int h : P.get_int_list("hidden_layer_sizes", {3})) sizes.push_back(h);
        sizes.push_back(1);
        MlpTrainOptions o;
        o.learning_rate = P.get_double("learning_rate", o.learning_rate);
        o.epochs = P.get_int("epochs", o.epochs);
        const std::string sched = P.get_string("schedule", "adaptive");
        if (sched == "constant") o.schedule = LrSchedule::Constant;
        else if (sched != "adaptive") throw config_error("neural-model", "schedule must be adaptive or constant");
        Standardizer s = fit_scale(sel.X, sel.feature_names);
        const double ym = sel.y.mean();
        const double ys = std::sqrt((sel.y.array() - ym).square().mean());
        if (!(ys > 0.0)) throw data_error("neural-model", "target has zero variance");
        const Eigen::VectorXd yz = (sel.y.array() - ym) / ys;
        auto init = MlpParams::glorot(sizes, parse_activation(P.get_string("activation", "relu")), seed);
        auto m = fit_mlp(s.apply(sel.X), yz, std::move(init), o);
        return std::make_shared<MlpFitted>(cols, P, std::move(m), std::move(s), ym, ys);
    }
    case ModelFamily::Dfm: {
        const int r = P.get_int("r", 2);
        Standardizer s = fit_scale(sel.X, sel.feature_names);
        auto f = fit_dfm(s.apply(sel.X), sel.y, r);
        return std::make_shared<DfmFitted>(cols, P, std::move(f), std::move(s));
    }
    }
    throw config_error("cli", "unsupported model family");
}

ParamGrid default_grid(ModelFamily family) {
    const std::vector<std::string> p{"4", "8", "all"};
    switch (family) {
    case ModelFamily::Ols: return {};
    case ModelFamily::Dfm: return {};
    case ModelFamily::Enet: return {{{"alpha", {"0.001", "0.01", "0.1"}}, {"l1_ratio", {"0.5", "0.9"}}, {"p", p}}};
    case ModelFamily::Svr:
        return {{{"kernel", {"rbf"}}, {"C", {"1", "3", "10"}}, {"epsilon", {"0.1", "0.3"}}, {"p", p}}};
    case ModelFamily::Rfr: return {{{"n_estimators", {"400"}}, {"max_depth", {"2", "4"}}, {"p", p}}};
    case ModelFamily::Gbr:
        return {{{"learning_rate", {"0.05", "0.1"}}, {"max_depth", {"1", "2"}}, {"n_estimators", {"500", "1000"}}, {"p", p}}};
    case ModelFamily::Mlp:
        return {{{"hidden_layer_sizes", {"3"}}, {"activation", {"relu"}}, {"learning_rate", {"0.05", "0.01"}}, {"p", p}}};
    }
    return {};
}

} // namespace nowcast
