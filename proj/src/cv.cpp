#include "nowcast/cv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "nowcast/error.hpp"
#include "nowcast/evaluate.hpp"
#include "nowcast/random.hpp"
#include "nowcast/text.hpp"

namespace nowcast {

void CvPlan::validate() const {
    if (k < 2) throw config_error("selection-cv", "k must be >= 2");
    if (n < 1) throw config_error("selection-cv", "n must be >= 1");
    if (!(superset_start < superset_end)) throw config_error("selection-cv", "superset start must precede its end");
}

std::vector<Month> superset_months(const CvPlan& plan, const std::vector<Month>& available) {
    std::vector<Month> out;
    for (Month m = plan.superset_start; m <= plan.superset_end; ++m)
        if (available.empty() || std::binary_search(available.begin(), available.end(), m)) out.push_back(m);
    return out;
}

std::vector<Month> sample_validation_subset(const CvPlan& plan, int fold, const std::vector<Month>& available) {
    plan.validate();
    if (fold < 0 || fold >= plan.k) throw config_error("selection-cv", "fold index out of range");
    const auto pool = superset_months(plan, available);
    const auto n = static_cast<std::size_t>(plan.n);
    if (pool.size() < n)
        throw data_error("selection-cv", "validation superset has " + std::to_string(pool.size()) + " months, fewer than n=" +
                                             std::to_string(plan.n));
    std::vector<Month> out;
    if (plan.mode == SamplingMode::Randomized) {
        Rng rng(derive_seed(plan.seed, static_cast<std::uint64_t>(fold)));
        if (plan.with_replacement) {
            for (std::size_t i = 0; i < n; ++i) out.push_back(pool[rng.index(pool.size())]);
        } else {
            for (auto idx : rng.sample_without_replacement(pool.size(), n)) out.push_back(pool[idx]);
        }
    } else {
        const long end = static_cast<long>(pool.size()) - 1 - static_cast<long>(plan.k - 1 - fold) * plan.n;
        const long begin = end - plan.n + 1;
        if (begin < 0)
            throw data_error("selection-cv", "superset too short for " + std::to_string(plan.k) + " consecutive windows");
        out.assign(pool.begin() + begin, pool.begin() + end + 1);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<EvalPoint> expanding_window_eval(const ModelSpec& spec, const FeatureFrame& frame,
                                             std::vector<Month> eval_months) {
    std::sort(eval_months.begin(), eval_months.end());
    std::vector<EvalPoint> out;
    for (Month m : eval_months) {
        const auto row = frame.row_of(m);
        if (!row) throw data_error("selection-cv", "eval month " + m.str() + " has no row in the frame");
        if (*row == 0) throw data_error("selection-cv", "eval month " + m.str() + " has no earlier training data");
        std::vector<std::size_t> train(*row);
        for (std::size_t i = 0; i < *row; ++i) train[i] = i;
        const FeatureFrame tf = frame.subset_rows(train);
        const ModelHandle model = fit_model(spec, tf);
        EvalPoint p;
        p.month = m;
        p.prediction = model->predict_row(frame.X.row(static_cast<Eigen::Index>(*row)));
        p.actual = frame.y(static_cast<Eigen::Index>(*row));
        p.last_training_month = tf.months.back();
        p.training_rows = tf.rows();
        out.push_back(p);
    }
    return out;
}

const GridEntry& GridResult::best() const {
    for (const auto& e : entries)
        if (e.chosen) return e;
    throw numerical_error("selection-cv", "grid search has no chosen combination");
}

void GridResult::write_csv(std::ostream& out) const {
    const std::size_t k = fold_months.size();
    out << "model,params";
    for (std::size_t f = 0; f < k; ++f) out << ",fold" << f + 1 << "_rmse";
    out << ",mean_rmse,chosen\n";
    for (const auto& e : entries) {
        out << model_family_str(family) << ',' << e.params.str();
        for (double r : e.fold_rmse) out << ',' << format_double(r);
        out << ',' << format_double(e.mean_rmse) << ',' << (e.chosen ? 1 : 0) << '\n';
    }
}

GridResult grid_search_cv(ModelFamily family, const ParamGrid& grid, const FeatureFrame& frame, const CvPlan& plan,
                          const ParamSet& fixed) {
    plan.validate();
    GridResult result;
    result.family = family;
    for (int f = 0; f < plan.k; ++f) result.fold_months.push_back(sample_validation_subset(plan, f, frame.months));

    const auto combos = grid.combinations(fixed);
    if (combos.empty()) throw config_error("selection-cv", "empty hyperparameter grid");
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = combos.size();
    for (std::size_t c = 0; c < combos.size(); ++c) {
        GridEntry entry;
        entry.params = combos[c];
        const ModelSpec spec{family, combos[c]};
        double sum = 0.0;
        for (const auto& months : result.fold_months) {
            if (months.empty()) throw data_error("selection-cv", "fold with no valid eval months");
            double r = std::numeric_limits<double>::infinity();
            try {
                const auto pts = expanding_window_eval(spec, frame, months);
                std::vector<double> pred, act;
                for (const auto& p : pts) {
                    pred.push_back(p.prediction);
                    act.push_back(p.actual);
                }
                r = rmse(pred, act);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Numerical) throw;
                warn("selection-cv", spec.str() + " failed on a fold: " + e.what());
            }
            if (!std::isfinite(r)) r = std::numeric_limits<double>::infinity();
            entry.fold_rmse.push_back(r);
            sum += r;
        }
        entry.mean_rmse = sum / static_cast<double>(result.fold_months.size());
        if (entry.mean_rmse < best) {
            best = entry.mean_rmse;
            best_idx = c;
        }
        result.entries.push_back(std::move(entry));
    }
    if (best_idx == combos.size()) throw numerical_error("selection-cv", "every grid combination failed");
    result.entries[best_idx].chosen = true;
    return result;
}

} // namespace nowcast
