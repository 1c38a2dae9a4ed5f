#include "nowcast/series.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nowcast/error.hpp"
#include "nowcast/text.hpp"

namespace nowcast {

MonthlySeries::MonthlySeries(std::string name, Month start, std::vector<double> values)
    : name_(std::move(name)), start_(start), values_(std::move(values)) {
    for (double v : values_)
        if (!std::isfinite(v)) throw data_error("series-core", "series '" + name_ + "' has a non-finite value");
}

MonthlySeries MonthlySeries::from_optional(std::string name, Month start,
                                           const std::vector<std::optional<double>>& values) {
    std::size_t first = 0;
    while (first < values.size() && !values[first]) ++first;
    std::vector<double> present;
    present.reserve(values.size() - first);
    for (std::size_t i = first; i < values.size(); ++i) {
        if (!values[i])
            throw data_error("series-core", "series '" + name + "' has an internal gap at " +
                                                (start + static_cast<int>(i)).str());
        present.push_back(*values[i]);
    }
    return MonthlySeries(std::move(name), start + static_cast<int>(first), std::move(present));
}

std::optional<double> MonthlySeries::at(Month m) const {
    if (!covers(m)) return std::nullopt;
    return values_[static_cast<std::size_t>(m - start_)];
}

double MonthlySeries::operator[](Month m) const {
    if (!covers(m)) throw data_error("series-core", "series '" + name_ + "' has no value for " + m.str());
    return values_[static_cast<std::size_t>(m - start_)];
}

MonthlySeries MonthlySeries::truncated(Month last_month) const {
    if (values_.empty() || last_month >= last()) return *this;
    if (last_month < start_) return MonthlySeries(name_, start_, {});
    std::vector<double> kept(values_.begin(), values_.begin() + (last_month - start_ + 1));
    return MonthlySeries(name_, start_, std::move(kept));
}

MonthlySeries MonthlySeries::renamed(std::string name) const {
    MonthlySeries out = *this;
    out.name_ = std::move(name);
    return out;
}

MonthlySeries MonthlySeries::scaled(double factor) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= factor;
    return MonthlySeries(name_, start_, std::move(v));
}

MonthlySeries yoy_growth(const MonthlySeries& s) {
    if (s.size() < 13)
        throw data_error("series-core", "yoy_growth needs at least 13 months, '" + s.name() + "' has " +
                                            std::to_string(s.size()));
    const auto& v = s.values();
    std::vector<double> out(v.size() - 12);
    for (std::size_t t = 12; t < v.size(); ++t) {
        if (v[t - 12] == 0.0)
            throw data_error("series-core", "yoy_growth: zero base value in '" + s.name() + "' at " +
                                                (s.start() + static_cast<int>(t - 12)).str());
        out[t - 12] = 100.0 * (v[t] / v[t - 12] - 1.0);
    }
    return MonthlySeries(s.name(), s.start() + 12, std::move(out));
}

SeasonalDecomposition seasonal_decompose(const MonthlySeries& s, Month asof) {
    const MonthlySeries data = s.truncated(asof);
    const std::size_t n = data.size();
    if (n < 36)
        throw data_error("series-core", "seasonal adjustment of '" + s.name() + "' needs 36 months up to " +
                                            asof.str() + ", found " + std::to_string(n));
    const auto& v = data.values();

    std::vector<double> ratio_sum(12, 0.0);
    std::vector<int> ratio_count(12, 0);
    for (std::size_t t = 6; t + 6 < n; ++t) {
        double trend = 0.5 * (v[t - 6] + v[t + 6]);
        for (std::size_t j = t - 5; j <= t + 5; ++j) trend += v[j];
        trend /= 12.0;
        if (trend == 0.0) throw data_error("series-core", "seasonal adjustment: zero trend in '" + s.name() + "'");
        const int cal = (data.start() + static_cast<int>(t)).month() - 1;
        ratio_sum[cal] += v[t] / trend;
        ++ratio_count[cal];
    }

    std::vector<double> indices(12);
    double mean = 0.0;
    for (int c = 0; c < 12; ++c) {
        indices[c] = ratio_sum[c] / ratio_count[c];
        mean += indices[c];
    }
    mean /= 12.0;
    for (double& idx : indices) idx /= mean;

    std::vector<double> adjusted(n);
    for (std::size_t t = 0; t < n; ++t) adjusted[t] = v[t] / indices[(data.start() + static_cast<int>(t)).month() - 1];
    return {MonthlySeries(s.name(), data.start(), std::move(adjusted)), std::move(indices)};
}

MonthlySeries seasonal_adjust_lite(const MonthlySeries& s, Month asof) { return seasonal_decompose(s, asof).adjusted; }

MergeRuleset MergeRuleset::parse(const std::string& text) {
    MergeRuleset set;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw config_error("series-core", "merge rule line " + std::to_string(line_no) + ": missing '='");
        MergeRule rule;
        rule.output = std::string(trim(body.substr(0, eq)));
        std::string_view rhs = body.substr(eq + 1);
        double sign = 1.0;
        std::string token;
        auto flush = [&] {
            const std::string name(trim(token));
            if (name.empty())
                throw config_error("series-core", "merge rule line " + std::to_string(line_no) + ": empty term");
            rule.terms.push_back({name, sign});
            token.clear();
        };
        bool leading = true;
        for (char c : rhs) {
            if (c == '+' || c == '-') {
                if (leading && trim(token).empty()) {
                    sign = c == '-' ? -1.0 : 1.0;
                    leading = false;
                    continue;
                }
                flush();
                sign = c == '-' ? -1.0 : 1.0;
            } else {
                token += c;
                if (c != ' ' && c != '\t') leading = false;
            }
        }
        flush();
        if (rule.output.empty())
            throw config_error("series-core", "merge rule line " + std::to_string(line_no) + ": empty output name");
        set.rules.push_back(std::move(rule));
    }
    return set;
}

MergeRuleset MergeRuleset::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("series-core", "cannot open merge rules '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string MergeRuleset::str() const {
    std::string out;
    for (const auto& r : rules) {
        out += r.output + " =";
        for (std::size_t i = 0; i < r.terms.size(); ++i) {
            const bool neg = r.terms[i].sign < 0;
            if (i == 0)
                out += neg ? " -" : "";
            else
                out += neg ? " -" : " +";
            out += " " + r.terms[i].stream;
        }
        out += '\n';
    }
    return out;
}

SeriesMap aggregate_streams(const SeriesMap& streams, const MergeRuleset& rules) {
    SeriesMap out;
    for (const auto& rule : rules.rules) {
        std::vector<const MonthlySeries*> terms;
        for (const auto& term : rule.terms) {
            const MonthlySeries* source = nullptr;
            if (auto it = out.find(term.stream); it != out.end())
                source = &it->second;
            else if (auto jt = streams.find(term.stream); jt != streams.end())
                source = &jt->second;
            else
                throw data_error("series-core", "merge rule for '" + rule.output + "' references unknown stream '" +
                                                    term.stream + "'");
            terms.push_back(source);
        }
        const MonthlySeries& first = *terms.front();
        if (first.empty()) {
            out[rule.output] = MonthlySeries(rule.output, first.start(), {});
            continue;
        }
        Month end = first.last();
        for (const auto* t : terms) {
            if (t->empty()) continue;
            end = std::min(end, t->last());
        }
        std::vector<double> values;
        for (Month m = first.start(); m <= end; ++m) {
            double sum = 0.0;
            for (std::size_t i = 0; i < terms.size(); ++i)
                if (auto v = terms[i]->at(m)) sum += rule.terms[i].sign * *v;
            values.push_back(sum);
        }
        out[rule.output] = MonthlySeries(rule.output, first.start(), std::move(values));
    }
    return out;
}

MergeRuleset default_stream_rules() {
    return MergeRuleset::parse(R"(# AFT credit plus the government direct deposit stream split out of it
C = C_raw + M
D = D
# encoded paper and the streams separated from it over time
E = E + L + O + B + G + H - S - U - Z
N = N
# POS and online payments net of returns and refunds
P = J + P - K - Q
# corporate payments and remittances
X = F + X + Y
All = C + D + E + N + P + X
T1 = T1
T2 = T2
)");
}

} // namespace nowcast
