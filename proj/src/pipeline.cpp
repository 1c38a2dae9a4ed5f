#include "nowcast/pipeline.hpp"

#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nowcast/error.hpp"
#include "nowcast/random.hpp"
#include "nowcast/synth.hpp"
#include "nowcast/text.hpp"

namespace nowcast {

namespace {

const std::vector<std::string> kStreamKinds{"_value", "_volume"};

ParamSet with_seed(const RunConfig& cfg) {
    ParamSet fixed = cfg.fixed;
    if (!fixed.has("seed")) fixed.set("seed", std::to_string(cfg.seed));
    return fixed;
}

Date first_release_date(const VintageStore& store, const std::string& series, Month m) {
    auto r = store.first_release(series, m);
    if (!r) throw data_error("cli", "no release of '" + series + "' for " + m.str());
    return r->date;
}

} // namespace

RunInputs load_inputs(const RunConfig& cfg) {
    RunInputs in;
    in.rules = cfg.rules_path.empty() ? default_stream_rules() : MergeRuleset::load(cfg.rules_path);
    if (!cfg.series_path.empty()) {
        in.store = parse_series_csv(cfg.series_path);
        return in;
    }
    EconomyScenario scn = EconomyScenario::default_scenario(cfg.seed);
    scn.start = cfg.synth_start;
    scn.months = cfg.synth_months;
    const Month end = scn.start + scn.months - 1;
    std::vector<RegimeStart> regimes;
    for (const auto& r : scn.regimes)
        if (r.start <= end) regimes.push_back(r);
    while (regimes.size() > 1 && regimes[1].start <= scn.start) regimes.erase(regimes.begin());
    regimes.front().start = scn.start;
    scn.regimes = regimes;
    in.store = generate_economy(scn).store;
    return in;
}

DesignSpec make_design_spec(const RunConfig& cfg, const SeriesMap& snap) {
    DesignSpec spec;
    spec.target = cfg.target;
    spec.target_transform = Transform::Yoy;
    spec.horizon = HorizonSpec::for_horizon(cfg.horizon);
    auto need = [&](const std::string& name) {
        if (!snap.count(name)) throw data_error("cli", "required series '" + name + "' is missing from the input");
    };
    need(cfg.target);
    for (const char* s : {"CPI", "UNE", "CFSI", "CBCC"}) need(s);
    spec.predictors.push_back({cfg.target, PredictorGroup::TargetLag, Transform::Yoy, ""});
    spec.predictors.push_back({"CPI", PredictorGroup::CpiUne, Transform::Yoy, ""});
    spec.predictors.push_back({"UNE", PredictorGroup::CpiUne, Transform::Level, ""});
    spec.predictors.push_back({"CFSI", PredictorGroup::CfsiCbcc, Transform::Level, ""});
    spec.predictors.push_back({"CBCC", PredictorGroup::CfsiCbcc, Transform::Level, ""});
    const MergeRuleset rules = cfg.rules_path.empty() ? default_stream_rules() : MergeRuleset::load(cfg.rules_path);
    for (const auto& kind : kStreamKinds)
        for (const auto& rule : rules.rules) {
            const std::string name = rule.output + kind;
            if (snap.count(name)) spec.predictors.push_back({name, PredictorGroup::Payments, Transform::SeasonalYoy, ""});
        }
    return spec;
}

DesignSpec benchmark_only(const DesignSpec& spec) {
    DesignSpec out = spec;
    out.predictors.clear();
    for (const auto& p : spec.predictors)
        if (p.group != PredictorGroup::Payments) out.predictors.push_back(p);
    return out;
}

RealtimePoint realtime_nowcast(const SeriesSource& source, const DesignSpec& spec, const ModelSpec& model, Month month) {
    RealtimePoint pt;
    pt.info_date = spec.horizon.nowcast_date(month);
    const FeatureFrame train = build_design_matrix(source, spec, pt.info_date).rows_before(month);
    if (train.rows() == 0) throw data_error("cli", "no training rows before " + month.str());
    auto row = build_feature_row(source, spec, month, pt.info_date);
    if (!row) throw data_error("cli", "predictors for " + month.str() + " are unavailable on " + pt.info_date.str());
    pt.prediction = fit_model(model, train)->predict_row(*row);
    pt.training_rows = train.rows();
    return pt;
}

RunResult run_pipeline(const RunConfig& cfg, const RunInputs& in, Stages stages) {
    cfg.validate();
    const VintageSource source(in.store, in.rules, kStreamKinds);
    const DesignSpec spec = make_design_spec(cfg, source.snapshot(Date::max()));
    const ModelFamily family = parse_model_family(cfg.model);
    const ModelSpec benchmark{ModelFamily::Ols, {{"features", "benchmark"}}};
    const bool realtime = cfg.vintages == VintageMode::Realtime;

    const FeatureFrame latest = build_design_matrix(source, spec, Date::max());
    const FeatureFrame cv_frame =
        realtime ? build_design_matrix(source, spec, spec.horizon.nowcast_date(cfg.test_start)) : latest;

    RunResult res;
    CvPlan plan;
    plan.superset_start = cfg.cv.superset_start;
    plan.superset_end = cfg.cv.superset_end;
    plan.n = cfg.cv.n;
    plan.k = cfg.cv.k;
    plan.seed = cfg.seed;
    plan.mode = cfg.cv.mode;
    plan.with_replacement = cfg.cv.with_replacement;
    const ParamGrid grid = cfg.grid.dimensions.empty() ? default_grid(family) : cfg.grid;
    const ParamSet fixed = with_seed(cfg);
    if (stages.cv) {
        res.grid = grid_search_cv(family, grid, cv_frame, plan, fixed);
        res.chosen = {family, res.grid.best().params};
    } else {
        res.grid.family = family;
        res.chosen = {family, grid.combinations(fixed).front()};
    }

    if (stages.test) {
        for (Month m = cfg.test_start; m <= cfg.test_end; ++m) {
            PredictionRow row;
            row.month = m;
            if (realtime) {
                const auto model_pt = realtime_nowcast(source, spec, res.chosen, m);
                const auto bench_pt = realtime_nowcast(source, spec, benchmark, m);
                row.info_date = model_pt.info_date;
                row.prediction = model_pt.prediction;
                row.benchmark = bench_pt.prediction;
                auto actual = target_value(source, spec, m, first_release_date(in.store, spec.target, m));
                if (!actual) throw data_error("cli", "no first-release target for " + m.str());
                row.actual = *actual;
            } else {
                auto pts = expanding_window_eval(res.chosen, latest, {m});
                auto bench = expanding_window_eval(benchmark, latest, {m});
                row.info_date = latest.info_dates[*latest.row_of(m)];
                row.prediction = pts[0].prediction;
                row.benchmark = bench[0].prediction;
                row.actual = pts[0].actual;
            }
            res.predictions.push_back(row);
        }
        std::vector<double> pred, act, base;
        std::vector<Month> months;
        for (const auto& r : res.predictions) {
            pred.push_back(r.prediction);
            act.push_back(r.actual);
            base.push_back(r.benchmark);
            months.push_back(r.month);
        }
        std::vector<RegimeRange> regimes;
        if (cfg.crisis_start > cfg.test_start) regimes.push_back({"normal", cfg.test_start, cfg.crisis_start - 1});
        if (cfg.crisis_start <= cfg.test_end) regimes.push_back({"crisis", std::max(cfg.crisis_start, cfg.test_start), cfg.test_end});
        const std::string h = horizon_str(cfg.horizon);
        for (auto& m : split_eval(pred, act, months, regimes, base)) res.metrics.push_back({cfg.target, h, cfg.model, m});
        for (auto& m : split_eval(base, act, months, regimes)) res.metrics.push_back({cfg.target, h, "ols_benchmark", m});
    }

    if (stages.explain) {
        const ModelHandle model = fit_model(res.chosen, latest);
        const auto& cols = model->input_columns();
        const FeatureFrame sel = latest.select_columns(cols);
        res.explained_features = sel.feature_names;
        const FeatureFrame train = sel.rows_before(cfg.test_start);
        for (Eigen::Index j = 0; j < sel.X.cols(); ++j) {
            const auto& col = train.rows() > 0 ? train.X.col(j) : sel.X.col(j);
            const double mean = col.mean();
            const double sd = std::sqrt((col.array() - mean).square().mean());
            res.explained_scales.push_back({mean, sd > 0.0 ? sd : 1.0});
        }
        const ValueFunction vf([model](const Eigen::MatrixXd& X) { return model->predict_selected(X); }, sel.X,
                               cfg.shap.draws, derive_seed(cfg.seed, 0x5b));
        const bool exact = vf.features() <= std::min(cfg.shap.exact_max_features, kExactShapleyLimit);
        for (std::size_t i = 0; i < sel.rows(); ++i) {
            const Eigen::RowVectorXd x = sel.X.row(static_cast<Eigen::Index>(i));
            ShapExplanation e = exact ? exact_shapley(vf, x)
                                      : kernel_shap(vf, x, cfg.shap.coalitions, derive_seed(cfg.seed, 0x5b, i));
            e.month = sel.months[i];
            e.feature_names = sel.feature_names;
            e.seed = derive_seed(cfg.seed, 0x5b);
            res.explanations.push_back(std::move(e));
        }
        res.importance = global_importance(res.explanations);
    }
    return res;
}

void write_outputs(const RunConfig& cfg, const RunResult& res, Stages stages) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw data_error("cli", "cannot create output directory '" + cfg.output_dir + "'");
    auto open = [&](const std::string& name) {
        std::ofstream out(fs::path(cfg.output_dir) / name, std::ios::binary);
        if (!out) throw data_error("cli", "cannot write '" + name + "'");
        return out;
    };
    if (stages.cv) {
        auto out = open("gridsearch.csv");
        res.grid.write_csv(out);
    }
    if (stages.test) {
        auto out = open("predictions.csv");
        out << "month,info_date,actual,prediction,benchmark\n";
        for (const auto& r : res.predictions)
            out << r.month.str() << ',' << r.info_date.str() << ',' << format_double(r.actual) << ','
                << format_double(r.prediction) << ',' << format_double(r.benchmark) << '\n';
        auto m = open("metrics.csv");
        write_metrics_csv(res.metrics, m);
    }
    if (stages.explain) {
        auto s = open("shap_values.csv");
        write_shap_csv(res.explanations, s);
        auto i = open("importance.csv");
        write_importance_csv(res.importance, i);
        auto z = open("standardization.csv");
        z << "feature,train_mean,train_sd,full_mean,full_sd\n";
        for (std::size_t j = 0; j < res.explained_features.size(); ++j) {
            double mean = 0.0, sq = 0.0;
            for (const auto& e : res.explanations) mean += e.feature_values(static_cast<Eigen::Index>(j));
            mean /= static_cast<double>(res.explanations.size());
            for (const auto& e : res.explanations) {
                const double d = e.feature_values(static_cast<Eigen::Index>(j)) - mean;
                sq += d * d;
            }
            z << res.explained_features[j] << ',' << format_double(res.explained_scales[j].mean) << ','
              << format_double(res.explained_scales[j].sd) << ',' << format_double(mean) << ','
              << format_double(std::sqrt(sq / static_cast<double>(res.explanations.size()))) << '\n';
        }
    }
    auto man = open("run_manifest.txt");
    man << "# nowcast run manifest\n";
    man << "version = " << NOWCAST_VERSION << "\n";
    man << "eigen = " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << "\n";
    man << "stages =" << (stages.cv ? " cv" : "") << (stages.test ? " test" : "") << (stages.explain ? " explain" : "") << "\n";
    man << cfg.echo();
    man << "chosen = " << res.chosen.str() << "\n";
    if (!res.explanations.empty()) {
        man << "shap.method = "
            << (static_cast<int>(res.explained_features.size()) <= std::min(cfg.shap.exact_max_features, kExactShapleyLimit) ? "exact" : "kernel")
            << "\n";
        man << "shap.background_seed = " << res.explanations.front().seed << "\n";
    }
}

} // namespace nowcast
