// Command-line driver for the nowcasting pipeline.
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nowcast/config.hpp"
#include "nowcast/error.hpp"
#include "nowcast/pipeline.hpp"
#include "nowcast/report.hpp"
#include "nowcast/synth.hpp"
#include "nowcast/text.hpp"
#include "nowcast/vintage.hpp"

namespace {

using namespace nowcast;

struct CommonFlags {
    std::string config;
    std::string model, horizon, seed, vintages, out, target, series;
    std::vector<std::string> sets;

    void attach(CLI::App* app) {
        app->add_option("--config,-c", config, "Run configuration file (key = value)");
        app->add_option("--model,-m", model, "Model family: ols, enet, svr, rfr, gbr, mlp, dfm");
        app->add_option("--horizon", horizon, "Nowcast horizon: t, t+1, t+2");
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--vintages", vintages, "Vintage mode: latest or realtime");
        app->add_option("--out,-o", out, "Output directory");
        app->add_option("--target", target, "Target series (GDP, RTS, WTS)");
        app->add_option("--series", series, "Series CSV (long format); synthetic data when omitted");
        app->add_option("--set", sets, "Override any config key: --set key=value")->take_all();
    }

    RunConfig resolve() const {
        RunConfig cfg = config.empty() ? RunConfig{} : RunConfig::load(config);
        auto apply = [&](const char* key, const std::string& v) {
            if (!v.empty()) cfg.set(key, v);
        };
        apply("model", model);
        apply("horizon", horizon);
        apply("seed", seed);
        apply("vintages", vintages);
        apply("output.dir", out);
        apply("target", target);
        apply("data.series", series);
        for (const auto& kv : sets) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw config_error("cli", "--set expects key=value, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        return cfg;
    }
};

int run_stages(const CommonFlags& flags, Stages stages) {
    const RunConfig cfg = flags.resolve();
    cfg.validate();
    const RunInputs inputs = load_inputs(cfg);
    const RunResult res = run_pipeline(cfg, inputs, stages);
    write_outputs(cfg, res, stages);
    std::cout << "chosen " << res.chosen.str() << "\n";
    for (const auto& m : res.metrics)
        if (m.model == cfg.model) {
            std::cout << m.metrics.regime << ": rmse " << format_fixed(m.metrics.rmse, 3);
            if (m.metrics.reduction_pct) std::cout << ", reduction " << format_fixed(*m.metrics.reduction_pct, 1) << "%";
            std::cout << "\n";
        }
    std::cout << "outputs written to " << cfg.output_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Payments-based macroeconomic nowcasting"};
    app.require_subcommand(1);

    CommonFlags synth_flags, ingest_flags, cv_flags, nowcast_flags, explain_flags, run_flags;
    std::string synth_file, report_dir;

    auto* synth = app.add_subcommand("synth", "Generate the synthetic economy as a series CSV");
    synth_flags.attach(synth);
    synth->add_option("--file", synth_file, "Output CSV path (default <out>/series.csv)");

    auto* ingest = app.add_subcommand("ingest", "Validate a series CSV and summarize its vintages");
    ingest_flags.attach(ingest);

    auto* cv = app.add_subcommand("cv", "Grid search with randomized expanding-window cross-validation");
    cv_flags.attach(cv);
    auto* nowcast = app.add_subcommand("nowcast", "Cross-validate, then nowcast the test window");
    nowcast_flags.attach(nowcast);
    auto* explain = app.add_subcommand("explain", "Cross-validate, fit on the full sample and compute Shapley values");
    explain_flags.attach(explain);
    auto* run = app.add_subcommand("run", "Full pipeline: cv, test-window nowcasts, evaluation and explanation");
    run_flags.attach(run);

    auto* report = app.add_subcommand("report", "Write plot-ready summaries from a completed run directory");
    report->add_option("--out,-o,dir", report_dir, "Run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_code(ErrorKind::Config);
    }

    try {
        if (*synth) {
            RunConfig cfg = synth_flags.resolve();
            cfg.validate();
            const RunInputs in = load_inputs(cfg);
            const std::string path =
                synth_file.empty() ? (std::filesystem::path(cfg.output_dir) / "series.csv").string() : synth_file;
            if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
                std::filesystem::create_directories(parent);
            write_series_csv(in.store, path);
            std::cout << "wrote " << in.store.release_count() << " releases of " << in.store.series_names().size()
                      << " series to " << path << "\n";
            return 0;
        }
        if (*ingest) {
            RunConfig cfg = ingest_flags.resolve();
            if (cfg.series_path.empty()) throw config_error("cli", "ingest needs --series or data.series");
            const VintageStore store = parse_series_csv(cfg.series_path);
            std::cout << "series,first_month,last_month,releases\n";
            for (const auto& name : store.series_names()) {
                const auto& rel = store.releases(name);
                std::size_t n = 0;
                for (const auto& [_, list] : rel) n += list.size();
                std::cout << name << ',' << rel.begin()->first.str() << ',' << rel.rbegin()->first.str() << ',' << n << "\n";
            }
            return 0;
        }
        if (*cv) return run_stages(cv_flags, {true, false, false});
        if (*nowcast) return run_stages(nowcast_flags, {true, true, false});
        if (*explain) return run_stages(explain_flags, {true, false, true});
        if (*run) return run_stages(run_flags, {true, true, true});
        if (*report) {
            for (const auto& f : emit_report(report_dir)) std::cout << f << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
