#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nowcast/calendar.hpp"
#include "nowcast/frame.hpp"
#include "nowcast/series.hpp"

namespace nowcast {

struct Release {
    Date date;
    double value = 0.0;
    bool operator==(const Release&) const = default;
};

// Per-series map from reference month to its releases, ordered by release date.
class VintageStore {
public:
    // Throws Error(Data) on a duplicate (series, ref_month, release_date).
    void add(const std::string& series, Month ref_month, Date release_date, double value);

    // Latest release dated on or before `asof`.
    std::optional<double> asof(const std::string& series, Month ref_month, Date asof) const;
    std::optional<double> latest(const std::string& series, Month ref_month) const;
    std::optional<Release> first_release(const std::string& series, Month ref_month) const;

    // Level series as they were known on `asof`. Coverage is the contiguous
    // run of reference months starting at the earliest month with a release.
    MonthlySeries series_asof(const std::string& series, Date asof) const;
    SeriesMap snapshot(Date asof) const;

    std::vector<std::string> series_names() const;
    bool has_series(const std::string& series) const { return entries_.count(series) != 0; }
    std::size_t entry_count() const;  // (series, ref_month) pairs
    std::size_t release_count() const;

    const std::map<Month, std::vector<Release>>& releases(const std::string& series) const;

    bool operator==(const VintageStore&) const = default;

private:
    std::map<std::string, std::map<Month, std::vector<Release>>> entries_;
};

// Long-format CSV: header `series,ref_month,release_date,value`.
VintageStore parse_series_csv(std::istream& in);
VintageStore parse_series_csv(const std::string& path);
void write_series_csv(const VintageStore& store, std::ostream& out);
void write_series_csv(const VintageStore& store, const std::string& path);

// Vintage-aware source: snapshots the store, then merges payment streams.
class VintageSource : public SeriesSource {
public:
    VintageSource(const VintageStore& store, MergeRuleset rules, std::vector<std::string> stream_kinds);
    SeriesMap snapshot(Date asof) const override;

private:
    const VintageStore& store_;
    MergeRuleset rules_;
    std::vector<std::string> kinds_;
};

} // namespace nowcast
