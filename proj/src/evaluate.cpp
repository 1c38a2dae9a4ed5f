#include "nowcast/evaluate.hpp"

#include <cmath>
#include <ostream>

#include <boost/math/distributions/students_t.hpp>

#include "nowcast/error.hpp"
#include "nowcast/text.hpp"

namespace nowcast {

double rmse(const std::vector<double>& pred, const std::vector<double>& actual) {
    if (pred.size() != actual.size()) throw data_error("evaluate", "rmse: length mismatch");
    if (pred.empty()) throw data_error("evaluate", "rmse of an empty sample");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - actual[i]) * (pred[i] - actual[i]);
    return std::sqrt(s / static_cast<double>(pred.size()));
}

double rmse_reduction(double baseline, double model) {
    if (!(baseline > 0.0)) throw data_error("evaluate", "rmse_reduction needs a positive baseline");
    return 100.0 * (1.0 - model / baseline);
}

std::string display_percent(double percent) {
    const long v = std::lround(percent);
    return std::to_string(v == 0 ? 0L : v);
}

DmResult dm_test(const std::vector<double>& a, const std::vector<double>& b, int h, LossType loss) {
    if (a.size() != b.size()) throw data_error("evaluate", "dm_test: length mismatch");
    if (a.size() < 8) throw data_error("evaluate", "dm_test needs at least 8 observations");
    if (h < 1) throw config_error("evaluate", "dm_test horizon must be >= 1");
    const int T = static_cast<int>(a.size());
    DmResult r;
    r.T = T;
    r.h = h;
    r.variant = "newey-west-bartlett+hln";
    std::vector<double> d(a.size());
    auto L = [&](double e) { return loss == LossType::Squared ? e * e : std::abs(e); };
    double mean = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        d[t] = L(a[t]) - L(b[t]);
        mean += d[t];
    }
    mean /= T;
    auto autocov = [&](int k) {
        double s = 0.0;
        for (int t = k; t < T; ++t) s += (d[static_cast<std::size_t>(t)] - mean) * (d[static_cast<std::size_t>(t - k)] - mean);
        return s / T;
    };
    const double g0 = autocov(0);
    double lrv = g0;
    for (int k = 1; k < h && k < T; ++k) lrv += 2.0 * (1.0 - static_cast<double>(k) / h) * autocov(k);
    if (!(g0 > 1e-300) || !(lrv > 0.0)) {
        r.indistinguishable = true;
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    const double dm = mean / std::sqrt(lrv / T);
    const double hln = std::sqrt((T + 1.0 - 2.0 * h + h * (h - 1.0) / T) / T);
    r.statistic = dm * hln;
    const boost::math::students_t dist(T - 1.0);
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic)));
    return r;
}

std::vector<RegimeMetrics> split_eval(const std::vector<double>& pred, const std::vector<double>& actual,
                                      const std::vector<Month>& months, const std::vector<RegimeRange>& regimes,
                                      const std::optional<std::vector<double>>& baseline) {
    if (pred.size() != actual.size() || pred.size() != months.size())
        throw data_error("evaluate", "split_eval: length mismatch");
    if (baseline && baseline->size() != pred.size()) throw data_error("evaluate", "split_eval: baseline length mismatch");
    for (Month m : months) {
        int hits = 0;
        for (const auto& r : regimes) hits += (m >= r.start && m <= r.end) ? 1 : 0;
        if (hits != 1) throw data_error("evaluate", "regimes do not partition the evaluation months (" + m.str() + ")");
    }
    auto section = [&](const std::string& name, auto in_range) {
        RegimeMetrics out;
        out.regime = name;
        std::vector<double> p, a, base;
        for (std::size_t i = 0; i < months.size(); ++i)
            if (in_range(months[i])) {
                p.push_back(pred[i]);
                a.push_back(actual[i]);
                if (baseline) base.push_back((*baseline)[i]);
            }
        out.count = p.size();
        if (p.empty()) return out;
        out.rmse = rmse(p, a);
        if (baseline) {
            out.baseline_rmse = rmse(base, a);
            if (*out.baseline_rmse > 0.0) out.reduction_pct = rmse_reduction(*out.baseline_rmse, out.rmse);
            if (p.size() >= 8) {
                std::vector<double> em(p.size()), eb(p.size());
                for (std::size_t i = 0; i < p.size(); ++i) {
                    em[i] = p[i] - a[i];
                    eb[i] = base[i] - a[i];
                }
                out.dm = dm_test(em, eb, 1);
            }
        }
        return out;
    };
    std::vector<RegimeMetrics> out;
    out.push_back(section("all", [](Month) { return true; }));
    for (const auto& r : regimes) {
        auto s = section(r.name, [&](Month m) { return m >= r.start && m <= r.end; });
        if (s.count > 0) out.push_back(std::move(s));
    }
    return out;
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, std::ostream& out) {
    out << "target,horizon,model,regime,rmse,reduction_pct,dm_stat,dm_p\n";
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        out << r.target << ',' << r.horizon << ',' << r.model << ',' << m.regime << ',' << format_double(m.rmse) << ',';
        if (m.reduction_pct) out << format_double(*m.reduction_pct);
        out << ',';
        if (m.dm && !m.dm->indistinguishable) out << format_double(m.dm->statistic);
        out << ',';
        if (m.dm) out << format_double(m.dm->p_value);
        out << '\n';
    }
}

} // namespace nowcast
