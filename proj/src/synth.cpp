#include "nowcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nowcast/error.hpp"
#include "nowcast/random.hpp"

namespace nowcast {

std::string regime_str(RegimeType t) {
    switch (t) {
    case RegimeType::Normal: return "normal";
    case RegimeType::GfcLike: return "gfc_like";
    case RegimeType::CovidLike: return "covid_like";
    }
    return "?";
}

EconomyScenario EconomyScenario::default_scenario(std::uint64_t seed) {
    EconomyScenario s;
    s.seed = seed;
    s.regimes = {{Month(2001, 1), RegimeType::Normal},
                 {Month(2008, 10), RegimeType::GfcLike},
                 {Month(2009, 10), RegimeType::Normal},
                 {Month(2020, 3), RegimeType::CovidLike}};
    //             name  load noise base  covid vol   retail
    s.streams = {{"C", 1.5, 3.0, 4.0, -1.0, 0.6, true},
                 {"D", 1.2, 3.5, 3.0, 1.0, 0.6, true},
                 {"E", 1.0, 4.0, -3.0, 1.0, 0.8, true},
                 {"N", 1.5, 3.5, 2.0, 1.0, 0.7, true},
                 {"P", 3.0, 2.0, 5.0, 1.0, 0.7, true},
                 {"X", 2.0, 3.0, 4.0, 1.0, 0.5, true},
                 {"T1", 1.0, 4.0, 3.0, 1.0, 0.5, false},
                 {"T2", 1.2, 4.0, 3.0, 1.0, 0.5, false}};
    s.targets = {{"GDP", 2.0, 1.0, 0.4}, {"RTS", 3.0, 1.5, 0.6}, {"WTS", 3.0, 1.2, 0.6}};
    return s;
}

void EconomyScenario::validate() const {
    if (months < 60) throw config_error("synthgen", "scenario needs at least 60 months");
    if (regimes.empty()) throw config_error("synthgen", "scenario has no regimes");
    if (regimes.front().start != start) throw config_error("synthgen", "first regime must start with the sample");
    for (std::size_t i = 1; i < regimes.size(); ++i)
        if (!(regimes[i - 1].start < regimes[i].start))
            throw config_error("synthgen", "regimes must be ordered and non-overlapping");
    if (streams.empty() || targets.empty()) throw config_error("synthgen", "scenario needs streams and targets");
    for (const auto& st : streams)
        if (!(st.noise_sd > 0.0)) throw config_error("synthgen", "stream '" + st.name + "' noise sd must be > 0");
    for (const auto& t : targets)
        if (!(t.noise_sd > 0.0)) throw config_error("synthgen", "target '" + t.name + "' noise sd must be > 0");
    if (!(first_release_sd > 0.0) || !(second_release_sd > 0.0))
        throw config_error("synthgen", "revision noise sds must be > 0");
    if (!(activity_persistence > -1.0 && activity_persistence < 1.0))
        throw config_error("synthgen", "activity persistence must lie in (-1, 1)");
    if (asymmetry < 1.0) throw config_error("synthgen", "asymmetry coefficient must be >= 1");
}

namespace {

// Raw instruments that the default merge rules fold back into each stream.
struct Component {
    std::string id;
    double share;
};

std::vector<Component> components_of(const std::string& stream) {
    if (stream == "E")
        return {{"E", 0.50}, {"L", 0.10}, {"O", 0.10}, {"B", 0.10}, {"G", 0.10},
                {"H", 0.20}, {"S", -0.04}, {"U", -0.03}, {"Z", -0.03}};
    if (stream == "P") return {{"J", 0.70}, {"P", 0.40}, {"K", -0.06}, {"Q", -0.04}};
    if (stream == "X") return {{"F", 0.50}, {"X", 0.30}, {"Y", 0.20}};
    return {{stream, 1.0}};
}

// Regime shift profile, in units of the regime depth.
double gfc_profile(int k) { return std::min(1.0, 0.8 + 0.1 * k); }

double covid_profile(int k, double depth) {
    if (k == 0) return 0.75;
    const double floor = 5.0 / depth;
    return 1.0 - (1.0 - floor) * std::min(1.0, (k - 1) / 8.0);
}

double kinked(double a, double kappa, double tau) { return a >= tau ? a : tau + kappa * (a - tau); }

std::vector<double> seasonal_pattern(std::size_t i) {
    std::vector<double> m(12);
    const double amp = 0.04 + 0.01 * static_cast<double>(i % 4);
    double mean = 0.0;
    for (int c = 0; c < 12; ++c) {
        m[c] = 1.0 + amp * std::sin(2.0 * std::numbers::pi * (c + static_cast<double>(i)) / 12.0) +
               0.5 * amp * std::cos(4.0 * std::numbers::pi * c / 12.0);
        mean += m[c];
    }
    for (double& v : m) v /= mean / 12.0;
    return m;
}

// Level path from YOY growth; the first year is a gentle ramp.
std::vector<double> levels_from_growth(const std::vector<double>& g, double base) {
    std::vector<double> level(g.size());
    for (std::size_t t = 0; t < g.size(); ++t)
        level[t] = t < 12 ? base * (1.0 + 0.001 * static_cast<double>(t)) : level[t - 12] * (1.0 + g[t] / 100.0);
    return level;
}

} // namespace

SyntheticEconomy generate_economy(const EconomyScenario& scn) {
    scn.validate();
    const int T = scn.months;
    const auto n = static_cast<std::size_t>(T);
    SyntheticEconomy eco;
    auto& truth = eco.truth;
    truth.asymmetry = scn.asymmetry;
    truth.asymmetry_threshold = scn.asymmetry_threshold;

    // Regimes and latent activity.
    truth.regime.assign(n, RegimeType::Normal);
    truth.shift.assign(n, 0.0);
    for (std::size_t r = 0; r < scn.regimes.size(); ++r) {
        const int begin = std::max(0, scn.regimes[r].start - scn.start);
        const int end = r + 1 < scn.regimes.size() ? std::min(T, scn.regimes[r + 1].start - scn.start) : T;
        for (int t = begin; t < end; ++t) {
            const int k = t - begin;
            truth.regime[static_cast<std::size_t>(t)] = scn.regimes[r].type;
            if (scn.regimes[r].type == RegimeType::GfcLike)
                truth.shift[static_cast<std::size_t>(t)] = -scn.gfc_depth * gfc_profile(k);
            else if (scn.regimes[r].type == RegimeType::CovidLike)
                truth.shift[static_cast<std::size_t>(t)] = -scn.covid_depth * covid_profile(k, scn.covid_depth);
        }
    }
    std::vector<double> cycle(n);
    {
        Rng rng(derive_seed(scn.seed, 1));
        const double rho = scn.activity_persistence;
        const double innov = std::sqrt(1.0 - rho * rho);
        double ar = rng.normal();
        for (std::size_t t = 0; t < n; ++t) {
            if (t > 0) ar = rho * ar + innov * rng.normal();
            cycle[t] = ar;
        }
    }
    truth.activity.resize(n);
    for (std::size_t t = 0; t < n; ++t) truth.activity[t] = cycle[t] + truth.shift[t];

    auto growth_months = [&](const std::vector<double>& g, const std::string& name) {
        return MonthlySeries(name, scn.start + 12, std::vector<double>(g.begin() + 12, g.end()));
    };

    // Payment streams, split into raw instruments.
    double best_ratio = -1.0;
    for (std::size_t i = 0; i < scn.streams.size(); ++i) {
        const auto& st = scn.streams[i];
        if (st.covid_response < 0.0 && truth.support_stream.empty()) truth.support_stream = st.name + "_value";
        if (st.retail && st.loading / st.noise_sd > best_ratio) {
            best_ratio = st.loading / st.noise_sd;
            truth.dominant_stream = st.name + "_value";
        }
        Rng rng(derive_seed(scn.seed, 100 + i));
        const auto season = seasonal_pattern(i);
        for (int kind = 0; kind < 2; ++kind) {
            const bool volume = kind == 1;
            const std::string suffix = volume ? "_volume" : "_value";
            const double lambda = volume ? st.loading * st.volume_ratio : st.loading;
            const double mu = volume ? 0.5 * st.base_growth : st.base_growth;
            std::vector<double> g(n, 0.0);
            for (std::size_t t = 0; t < n; ++t) {
                const double sign = truth.regime[t] == RegimeType::CovidLike ? st.covid_response : 1.0;
                g[t] = mu + lambda * (cycle[t] + sign * truth.shift[t]) + st.noise_sd * rng.normal();
            }
            if (!volume) eco.stream_growth.emplace(st.name + suffix, growth_months(g, st.name + suffix));
            const auto base = levels_from_growth(g, (volume ? 50.0 : 1000.0) * static_cast<double>(i + 1));
            std::vector<double> level(n);
            for (std::size_t t = 0; t < n; ++t) level[t] = base[t] * season[static_cast<std::size_t>((scn.start + static_cast<int>(t)).month() - 1)];

            auto emit = [&](const std::string& id, Month from, std::vector<double> values) {
                eco.streams.emplace(id + suffix, MonthlySeries(id + suffix, from, std::move(values)));
            };
            if (st.name == "C") {
                // Government direct deposits leave AFT credit at the split month.
                const int split = std::clamp(scn.gdd_split - scn.start, 0, T);
                std::vector<double> raw(n), gdd;
                for (std::size_t t = 0; t < n; ++t) {
                    const bool after = static_cast<int>(t) >= split;
                    raw[t] = after ? 0.7 * level[t] : level[t];
                    if (after) gdd.push_back(0.3 * level[t]);
                }
                emit("C_raw", scn.start, std::move(raw));
                if (!gdd.empty()) emit("M", scn.start + split, std::move(gdd));
            } else {
                for (const auto& c : components_of(st.name)) {
                    std::vector<double> part(n);
                    // Subtracted instruments are stored as positive flows.
                    for (std::size_t t = 0; t < n; ++t) part[t] = std::abs(c.share) * level[t];
                    emit(c.id, scn.start, std::move(part));
                }
            }
        }
    }

    // Targets.
    for (std::size_t i = 0; i < scn.targets.size(); ++i) {
        const auto& tg = scn.targets[i];
        Rng rng(derive_seed(scn.seed, 200 + i));
        std::vector<double> g(n);
        for (std::size_t t = 0; t < n; ++t)
            g[t] = tg.base_growth + tg.loading * kinked(truth.activity[t], scn.asymmetry, scn.asymmetry_threshold) +
                   tg.noise_sd * rng.normal();
        eco.target_growth.emplace(tg.name, growth_months(g, tg.name));
        eco.targets.emplace(tg.name, MonthlySeries(tg.name, scn.start, levels_from_growth(g, 100.0)));
    }

    // Benchmark indicators. CFSI and CBCC carry only a weak activity signal.
    {
        Rng rng(derive_seed(scn.seed, 300));
        std::vector<double> infl(n), une(n), cfsi(n), cbcc(n);
        double une_noise = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double a = truth.activity[t];
            infl[t] = 2.0 + 0.3 * a + 0.4 * rng.normal();
            une_noise = 0.8 * une_noise + 0.2 * rng.normal();
            une[t] = 7.0 - 0.4 * a + une_noise;
            cfsi[t] = -0.2 * a + rng.normal();
            cbcc[t] = 100.0 + 1.0 * a + 4.0 * rng.normal();
        }
        eco.macro.emplace("CPI", MonthlySeries("CPI", scn.start, levels_from_growth(infl, 100.0)));
        eco.macro.emplace("UNE", MonthlySeries("UNE", scn.start, std::move(une)));
        eco.macro.emplace("CFSI", MonthlySeries("CFSI", scn.start, std::move(cfsi)));
        eco.macro.emplace("CBCC", MonthlySeries("CBCC", scn.start, std::move(cbcc)));
    }

    // Release schedule.
    auto& store = eco.store;
    for (const auto& [name, s] : eco.streams)
        for (Month m = s.start(); m <= s.last(); ++m) store.add(name, m, Date::first_of(m + 1), s[m]);
    for (const auto& [name, s] : eco.macro) {
        const bool late = name == "CPI" || name == "UNE";
        for (Month m = s.start(); m <= s.last(); ++m)
            store.add(name, m, late ? Date::in_month(m + 1, 15) : Date::first_of(m + 1), s[m]);
    }
    {
        Rng rng(derive_seed(scn.seed, 400));
        for (const auto& [name, s] : eco.targets)
            for (Month m = s.start(); m <= s.last(); ++m) {
                const double v = s[m];
                store.add(name, m, Date::in_month(m + 2, 20), v * (1.0 + scn.first_release_sd / 100.0 * rng.normal()));
                store.add(name, m, Date::in_month(m + 3, 20), v * (1.0 + scn.second_release_sd / 100.0 * rng.normal()));
                store.add(name, m, Date::in_month(m + 14, 20), v);
            }
    }
    return eco;
}

} // namespace nowcast
