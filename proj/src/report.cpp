#include "nowcast/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "nowcast/error.hpp"
#include "nowcast/text.hpp"

namespace nowcast {

namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header) {
    std::ifstream in(path);
    if (!in) throw data_error("cli", "report: missing input '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line) != header)
        throw data_error("cli", "report: unexpected header in '" + path.filename().string() + "'");
    std::vector<std::vector<std::string>> rows;
    const auto width = split(header, ',').size();
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto f = split(line, ',');
        if (f.size() != width)
            throw data_error("cli", "report: " + path.filename().string() + " line " + std::to_string(lineno) + " is malformed");
        rows.push_back(std::move(f));
    }
    return rows;
}

double num(const std::string& s) {
    auto v = parse_double(s);
    if (!v) throw data_error("cli", "report: non-numeric field '" + s + "'");
    return *v;
}

struct Attribution {
    std::string month, feature;
    double phi, value;
};

} // namespace

std::vector<std::string> emit_report(const std::string& run_dir) {
    const fs::path dir(run_dir);
    const auto shap = read_csv(dir / "shap_values.csv", "month,feature,phi,feature_value,prediction,base_value");
    const auto preds = read_csv(dir / "predictions.csv", "month,info_date,actual,prediction,benchmark");
    if (shap.empty()) throw data_error("cli", "report: shap_values.csv has no rows");

    // Training-window scaling when available, otherwise the explained sample.
    std::map<std::string, std::pair<double, double>> scale;
    if (fs::exists(dir / "standardization.csv"))
        for (const auto& r : read_csv(dir / "standardization.csv", "feature,train_mean,train_sd,full_mean,full_sd"))
            scale[r[0]] = {num(r[1]), num(r[2])};

    std::vector<Attribution> rows;
    std::vector<std::string> features, months;
    for (const auto& r : shap) {
        rows.push_back({r[0], r[1], num(r[2]), num(r[3])});
        if (std::find(features.begin(), features.end(), r[1]) == features.end()) features.push_back(r[1]);
        if (months.empty() || months.back() != r[0]) months.push_back(r[0]);
    }
    for (const auto& f : features)
        if (!scale.count(f)) {
            double mean = 0.0, sq = 0.0;
            int n = 0;
            for (const auto& a : rows)
                if (a.feature == f) { mean += a.value; ++n; }
            mean /= n;
            for (const auto& a : rows)
                if (a.feature == f) sq += (a.value - mean) * (a.value - mean);
            const double sd = std::sqrt(sq / n);
            scale[f] = {mean, sd > 0.0 ? sd : 1.0};
        }
    auto zval = [&](const Attribution& a) {
        const auto& [m, s] = scale.at(a.feature);
        return (a.value - m) / (s > 0.0 ? s : 1.0);
    };

    std::vector<std::string> written;
    auto open = [&](const std::string& name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw data_error("cli", "report: cannot write '" + name + "'");
        written.push_back((dir / name).string());
        return out;
    };

    for (const auto& f : features) {
        auto out = open("dependence_" + f + ".csv");
        out << "month,feature_value,feature_value_std,phi\n";
        for (const auto& a : rows)
            if (a.feature == f)
                out << a.month << ',' << format_double(a.value) << ',' << format_double(zval(a)) << ','
                    << format_double(a.phi) << '\n';
    }
    for (const auto& m : months) {
        std::vector<Attribution> inst;
        for (const auto& a : rows)
            if (a.month == m) inst.push_back(a);
        std::stable_sort(inst.begin(), inst.end(), [](const Attribution& a, const Attribution& b) {
            if (std::abs(a.phi) != std::abs(b.phi)) return std::abs(a.phi) > std::abs(b.phi);
            return a.feature < b.feature;
        });
        auto out = open("force_" + m + ".csv");
        out << "feature,feature_value,feature_value_std,phi\n";
        for (const auto& a : inst)
            out << a.feature << ',' << format_double(a.value) << ',' << format_double(zval(a)) << ','
                << format_double(a.phi) << '\n';
    }
    {
        auto out = open("timeline.csv");
        out << "month,actual,prediction,benchmark\n";
        for (const auto& r : preds) out << r[0] << ',' << r[2] << ',' << r[3] << ',' << r[4] << '\n';
    }
    return written;
}

} // namespace nowcast
