#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nowcast/calendar.hpp"
#include "nowcast/series.hpp"
#include "nowcast/vintage.hpp"

namespace nowcast {

enum class RegimeType { Normal, GfcLike, CovidLike };

std::string regime_str(RegimeType t);

struct RegimeStart {
    Month start;
    RegimeType type = RegimeType::Normal;
};

// One merged payment stream of the synthetic economy.
struct StreamSpec {
    std::string name;
    double loading = 2.0;          // growth points per unit of latent activity
    double noise_sd = 1.0;         // idiosyncratic growth noise
    double base_growth = 3.0;      // mean YOY growth, percent
    double covid_response = 1.0;   // sign applied to the covid-like shift
    double volume_ratio = 0.6;     // volume loading relative to value loading
    bool retail = true;            // part of the Allstream total
};

struct TargetSpec {
    std::string name;
    double base_growth = 2.0;
    double loading = 1.5;
    double noise_sd = 0.4;
};

struct EconomyScenario {
    Month start{2001, 1};
    int months = 240;
    std::vector<RegimeStart> regimes;
    std::vector<StreamSpec> streams;
    std::vector<TargetSpec> targets;

    double activity_persistence = 0.85;  // AR(1) coefficient, unit stationary sd
    double gfc_depth = 6.0;              // activity shift in stationary-sd units
    double covid_depth = 7.0;
    double asymmetry = 3.0;              // slope multiplier below the threshold
    double asymmetry_threshold = -2.5;   // activity level where the kink sits

    double first_release_sd = 0.3;       // target level revision noise, percent
    double second_release_sd = 0.1;
    Month gdd_split{2012, 4};            // government deposits split from AFT credit
    std::uint64_t seed = 1;

    // 240 months from 2001-01 with a GFC-like spell from 2008-10 and a
    // COVID-like spell from 2020-03.
    static EconomyScenario default_scenario(std::uint64_t seed = 1);
    void validate() const;
};

struct EconomyTruth {
    std::vector<double> activity;   // latent activity per month
    std::vector<double> shift;      // regime shift component per month
    std::vector<RegimeType> regime; // regime per month
    std::string dominant_stream;    // merged value stream with the highest loading-to-noise ratio
    std::string support_stream;     // stream whose covid-like response is positive
    double asymmetry = 1.0;
    double asymmetry_threshold = 0.0;
};

struct SyntheticEconomy {
    SeriesMap streams;          // raw payment instruments, `<id>_value` / `<id>_volume`, levels
    SeriesMap targets;          // true target levels (latest vintage)
    SeriesMap macro;            // CPI, UNE, CFSI, CBCC levels
    SeriesMap stream_growth;    // merged-stream YOY growth before seasonality, `<id>_value`
    SeriesMap target_growth;    // true target YOY growth
    EconomyTruth truth;
    VintageStore store;         // every series with its release schedule
};

SyntheticEconomy generate_economy(const EconomyScenario& scenario);

} // namespace nowcast
