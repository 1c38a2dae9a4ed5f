#include "nowcast/config.hpp"

#include <fstream>
#include <sstream>

#include "nowcast/error.hpp"
#include "nowcast/text.hpp"

namespace nowcast {

namespace {

std::string unquote(std::string_view v) {
    v = trim(v);
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
        v = v.substr(1, v.size() - 2);
    return std::string(v);
}

int to_int(const std::string& key, const std::string& value) {
    auto v = parse_int(value);
    if (!v) throw config_error("ingest", "key '" + key + "': expected an integer, got '" + value + "'");
    return static_cast<int>(*v);
}

Month to_month(const std::string& key, const std::string& value) {
    try {
        return Month::parse(value);
    } catch (const Error&) {
        throw config_error("ingest", "key '" + key + "': expected YYYY-MM, got '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw config_error("ingest", "key '" + key + "': expected true/false, got '" + value + "'");
}

} // namespace

void RunConfig::set(const std::string& key_in, const std::string& value_in) {
    const std::string key(trim(key_in));
    const std::string value = unquote(value_in);
    if (value.empty() && key != "data.series" && key != "data.rules")
        throw config_error("ingest", "key '" + key + "' has an empty value");

    if (key == "target") {
        target = value;
    } else if (key == "horizon") {
        try {
            horizon = parse_horizon(value);
        } catch (const Error& e) {
            throw config_error("ingest", e.what());
        }
    } else if (key == "model") {
        model = value;
    } else if (key == "seed") {
        auto v = parse_int(value);
        if (!v || *v < 0) throw config_error("ingest", "key 'seed': expected a nonnegative integer, got '" + value + "'");
        seed = static_cast<std::uint64_t>(*v);
        seed_set = true;
    } else if (key == "vintages") {
        if (value == "latest") vintages = VintageMode::Latest;
        else if (value == "realtime") vintages = VintageMode::Realtime;
        else throw config_error("ingest", "key 'vintages': expected latest or realtime, got '" + value + "'");
    } else if (key == "data.series") {
        series_path = value;
    } else if (key == "data.rules") {
        rules_path = value;
    } else if (key == "output.dir") {
        output_dir = value;
    } else if (key == "cv.k") {
        cv.k = to_int(key, value);
    } else if (key == "cv.n") {
        cv.n = to_int(key, value);
    } else if (key == "cv.superset_start") {
        cv.superset_start = to_month(key, value);
    } else if (key == "cv.superset_end") {
        cv.superset_end = to_month(key, value);
    } else if (key == "cv.mode") {
        if (value == "randomized") cv.mode = SamplingMode::Randomized;
        else if (value == "standard") cv.mode = SamplingMode::StandardExpanding;
        else throw config_error("ingest", "key 'cv.mode': expected randomized or standard, got '" + value + "'");
    } else if (key == "cv.with_replacement") {
        cv.with_replacement = to_bool(key, value);
    } else if (key == "test.start") {
        test_start = to_month(key, value);
    } else if (key == "test.end") {
        test_end = to_month(key, value);
    } else if (key == "crisis.start") {
        crisis_start = to_month(key, value);
    } else if (key == "shap.draws") {
        shap.draws = to_int(key, value);
    } else if (key == "shap.coalitions") {
        shap.coalitions = to_int(key, value);
    } else if (key == "shap.exact_max") {
        shap.exact_max_features = to_int(key, value);
    } else if (key == "synth.months") {
        synth_months = to_int(key, value);
    } else if (key == "synth.start") {
        synth_start = to_month(key, value);
    } else if (key.rfind("grid.", 0) == 0 && key.size() > 5) {
        const std::string param = key.substr(5);
        std::vector<std::string> values;
        for (const auto& v : split(value, ',')) {
            std::string t(trim(v));
            if (t.empty()) throw config_error("ingest", "key '" + key + "' has an empty grid value");
            values.push_back(t);
        }
        bool replaced = false;
        for (auto& dim : grid.dimensions)
            if (dim.first == param) {
                dim.second = values;
                replaced = true;
            }
        if (!replaced) grid.dimensions.emplace_back(param, values);
    } else if (key.rfind("model.", 0) == 0 && key.size() > 6) {
        fixed.set(key.substr(6), value);
    } else {
        throw config_error("ingest", "unknown config key '" + key + "'");
    }
    raw[key] = value;
}

void RunConfig::validate() const {
    if (cv.k < 2) throw config_error("ingest", "cv.k must be >= 2");
    if (cv.n < 1) throw config_error("ingest", "cv.n must be >= 1");
    if (!(cv.superset_start < cv.superset_end)) throw config_error("ingest", "cv.superset_start must precede cv.superset_end");
    if (cv.superset_end - cv.superset_start + 1 < cv.n)
        throw config_error("ingest", "validation superset has fewer than cv.n months");
    if (!seed_set) throw config_error("ingest", "a seed is required (set `seed` or pass --seed)");
    if (test_end < test_start) throw config_error("ingest", "test.end precedes test.start");
    if (!(cv.superset_end < test_start)) throw config_error("ingest", "validation superset must end before the test window");
    if (shap.draws < 1) throw config_error("ingest", "shap.draws must be >= 1");
    if (shap.coalitions < 1) throw config_error("ingest", "shap.coalitions must be >= 1");
    if (synth_months < 60) throw config_error("ingest", "synth.months must be >= 60");
}

RunConfig RunConfig::from_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view v = line;
        bool quoted = false;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] == '"') quoted = !quoted;
            else if (v[i] == '#' && !quoted) {
                v = v.substr(0, i);
                break;
            }
        }
        v = trim(v);
        if (v.empty()) continue;
        if (v.front() == '[') {
            if (v.back() != ']') throw config_error("ingest", "line " + std::to_string(lineno) + ": malformed section");
            section = std::string(trim(v.substr(1, v.size() - 2)));
            continue;
        }
        auto eq = v.find('=');
        if (eq == std::string_view::npos)
            throw config_error("ingest", "line " + std::to_string(lineno) + ": expected `key = value`");
        std::string key(trim(v.substr(0, eq)));
        if (!section.empty()) key = section + "." + key;
        std::string value(trim(v.substr(eq + 1)));
        // TOML arrays: grid.x = [0.1, 0.2]
        if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
            std::string inner = value.substr(1, value.size() - 2);
            std::string joined;
            for (const auto& part : split(inner, ',')) {
                if (!joined.empty()) joined += ",";
                joined += unquote(part);
            }
            value = joined;
        }
        try {
            cfg.set(key, value);
        } catch (const Error& e) {
            std::string msg = e.what();
            if (msg.rfind(e.module() + ": ", 0) == 0) msg.erase(0, e.module().size() + 2);
            throw Error(e.kind(), e.module(), "line " + std::to_string(lineno) + ": " + msg);
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("ingest", "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

std::string RunConfig::echo() const {
    std::ostringstream out;
    out << "target = " << target << "\n";
    out << "horizon = " << horizon_str(horizon) << "\n";
    out << "model = " << model << "\n";
    out << "seed = " << seed << "\n";
    out << "vintages = " << (vintages == VintageMode::Latest ? "latest" : "realtime") << "\n";
    out << "data.series = " << series_path << "\n";
    out << "data.rules = " << rules_path << "\n";
    out << "cv.k = " << cv.k << "\n";
    out << "cv.n = " << cv.n << "\n";
    out << "cv.superset_start = " << cv.superset_start.str() << "\n";
    out << "cv.superset_end = " << cv.superset_end.str() << "\n";
    out << "cv.mode = " << (cv.mode == SamplingMode::Randomized ? "randomized" : "standard") << "\n";
    out << "cv.with_replacement = " << (cv.with_replacement ? "true" : "false") << "\n";
    out << "test.start = " << test_start.str() << "\n";
    out << "test.end = " << test_end.str() << "\n";
    out << "crisis.start = " << crisis_start.str() << "\n";
    out << "shap.draws = " << shap.draws << "\n";
    out << "shap.coalitions = " << shap.coalitions << "\n";
    out << "shap.exact_max = " << shap.exact_max_features << "\n";
    out << "synth.months = " << synth_months << "\n";
    out << "synth.start = " << synth_start.str() << "\n";
    for (const auto& [k, v] : fixed.values()) out << "model." << k << " = " << v << "\n";
    for (const auto& [k, vals] : grid.dimensions) {
        out << "grid." << k << " = ";
        for (std::size_t i = 0; i < vals.size(); ++i) out << (i ? "," : "") << vals[i];
        out << "\n";
    }
    return out.str();
}

} // namespace nowcast
