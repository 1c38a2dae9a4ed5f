#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nowcast/calendar.hpp"
#include "nowcast/frame.hpp"
#include "nowcast/params.hpp"

namespace nowcast {

enum class VintageMode { Latest, Realtime };
enum class SamplingMode { Randomized, StandardExpanding };

struct CvSettings {
    int k = 5;
    int n = 24;
    Month superset_start{2008, 10};
    Month superset_end{2018, 12};
    SamplingMode mode = SamplingMode::Randomized;
    bool with_replacement = false;
};

struct ShapSettings {
    int draws = 32;
    int coalitions = 2048;
    int exact_max_features = 10;
};

// Run configuration. Loaded from a `key = value` text file (TOML-compatible
// subset); CLI flags override keys one-to-one.
struct RunConfig {
    std::string target = "GDP";
    Horizon horizon = Horizon::T1;
    std::string model = "gbr";
    std::uint64_t seed = 0;
    bool seed_set = false;
    VintageMode vintages = VintageMode::Latest;

    std::string series_path;  // empty: generate the synthetic economy
    std::string rules_path;   // empty: built-in merge rules
    std::string output_dir = "nowcast_out";

    CvSettings cv;
    ParamGrid grid;  // model hyperparameter grid (may include "p")
    ParamSet fixed;  // fixed model params (see model.* keys)

    Month test_start{2019, 1};
    Month test_end{2020, 12};
    Month crisis_start{2020, 3};

    ShapSettings shap;
    int synth_months = 240;
    Month synth_start{2001, 1};

    // Echo of every key in canonical form, for the run manifest.
    std::map<std::string, std::string> raw;

    static RunConfig from_text(const std::string& text);
    static RunConfig load(const std::string& path);

    // Applies one `key = value` assignment; throws Error(Config) on unknown keys
    // or bad values.
    void set(const std::string& key, const std::string& value);
    // Checks cross-field invariants (k >= 2, n >= 1, superset order, seed present).
    void validate() const;
    std::string echo() const;
};

} // namespace nowcast
