#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nowcast/calendar.hpp"

namespace nowcast {

// One named monthly series with contiguous coverage starting at `start`.
// Leading missing values are dropped at construction; internal gaps are rejected.
class MonthlySeries {
public:
    MonthlySeries() = default;
    MonthlySeries(std::string name, Month start, std::vector<double> values);

    // Builds from a sequence that may contain leading missing values.
    static MonthlySeries from_optional(std::string name, Month start,
                                       const std::vector<std::optional<double>>& values);

    const std::string& name() const { return name_; }
    Month start() const { return start_; }
    Month last() const { return start_ + static_cast<int>(values_.size()) - 1; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    const std::vector<double>& values() const { return values_; }

    bool covers(Month m) const { return !values_.empty() && m >= start_ && m <= last(); }
    std::optional<double> at(Month m) const;
    double operator[](Month m) const;  // throws Error(Data) outside coverage

    // Keeps months <= last_month.
    MonthlySeries truncated(Month last_month) const;
    MonthlySeries renamed(std::string name) const;
    MonthlySeries scaled(double factor) const;

    bool operator==(const MonthlySeries&) const = default;

private:
    std::string name_;
    Month start_;
    std::vector<double> values_;
};

using SeriesMap = std::map<std::string, MonthlySeries>;

// 100 * (s[t] / s[t-12] - 1), starting 12 months after s.start().
MonthlySeries yoy_growth(const MonthlySeries& s);

// Result of the classical multiplicative decomposition.
struct SeasonalDecomposition {
    MonthlySeries adjusted;
    std::vector<double> indices;  // indexed by calendar month 1..12 -> [0..11], mean 1
};

// Classical multiplicative decomposition using only data up to `asof`: centred
// 2x12 moving-average trend, calendar-month averages of s/trend normalised to
// mean 1, output s / index. Requires at least 36 months up to `asof`.
SeasonalDecomposition seasonal_decompose(const MonthlySeries& s, Month asof);
MonthlySeries seasonal_adjust_lite(const MonthlySeries& s, Month asof);

// A signed sum of named streams, e.g. "E = E + L + O + B + G + H - S - U - Z".
struct MergeRule {
    struct Term {
        std::string stream;
        double sign = 1.0;
    };
    std::string output;
    std::vector<Term> terms;
};

struct MergeRuleset {
    std::vector<MergeRule> rules;

    // One rule per line, `OUT = A + B - C`; '#' starts a comment.
    static MergeRuleset parse(const std::string& text);
    static MergeRuleset load(const std::string& path);
    std::string str() const;
};

// Applies rules in order. A right-hand name resolves to an earlier rule's
// output when one exists, otherwise to the input stream of that name. Merged
// coverage follows the first term; other terms missing at a month contribute
// zero (a stream that has not been split out yet carries no payments).
SeriesMap aggregate_streams(const SeriesMap& streams, const MergeRuleset& rules);

// Payment-stream merge rules for the retail system plus the Allstream total,
// and identity rules for the large-value tranches.
MergeRuleset default_stream_rules();

} // namespace nowcast
