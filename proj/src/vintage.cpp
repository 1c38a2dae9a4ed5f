#include "nowcast/vintage.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "nowcast/error.hpp"
#include "nowcast/text.hpp"

namespace nowcast {

void VintageStore::add(const std::string& series, Month ref_month, Date release_date, double value) {
    auto& list = entries_[series][ref_month];
    auto pos = std::lower_bound(list.begin(), list.end(), release_date,
                                [](const Release& r, const Date& d) { return r.date < d; });
    if (pos != list.end() && pos->date == release_date)
        throw data_error("ingest", "duplicate release " + series + " " + ref_month.str() + " " + release_date.str());
    list.insert(pos, Release{release_date, value});
}

std::optional<double> VintageStore::asof(const std::string& series, Month ref_month, Date asof) const {
    auto s = entries_.find(series);
    if (s == entries_.end()) return std::nullopt;
    auto m = s->second.find(ref_month);
    if (m == s->second.end()) return std::nullopt;
    const auto& list = m->second;
    auto pos = std::upper_bound(list.begin(), list.end(), asof,
                                [](const Date& d, const Release& r) { return d < r.date; });
    if (pos == list.begin()) return std::nullopt;
    return std::prev(pos)->value;
}

std::optional<double> VintageStore::latest(const std::string& series, Month ref_month) const {
    return asof(series, ref_month, Date::max());
}

std::optional<Release> VintageStore::first_release(const std::string& series, Month ref_month) const {
    auto s = entries_.find(series);
    if (s == entries_.end()) return std::nullopt;
    auto m = s->second.find(ref_month);
    if (m == s->second.end() || m->second.empty()) return std::nullopt;
    return m->second.front();
}

MonthlySeries VintageStore::series_asof(const std::string& series, Date asof) const {
    auto s = entries_.find(series);
    if (s == entries_.end()) return MonthlySeries(series, Month{}, {});
    std::optional<Month> start;
    std::vector<double> values;
    for (const auto& [month, list] : s->second) {
        auto v = this->asof(series, month, asof);
        if (!start) {
            if (!v) continue;
            start = month;
        } else if (!v || month != *start + static_cast<int>(values.size())) {
            break;
        }
        values.push_back(*v);
    }
    if (!start) return MonthlySeries(series, Month{}, {});
    return MonthlySeries(series, *start, std::move(values));
}

SeriesMap VintageStore::snapshot(Date asof) const {
    SeriesMap out;
    for (const auto& [name, _] : entries_) {
        auto s = series_asof(name, asof);
        if (!s.empty()) out.emplace(name, std::move(s));
    }
    return out;
}

std::vector<std::string> VintageStore::series_names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : entries_) out.push_back(name);
    return out;
}

std::size_t VintageStore::entry_count() const {
    std::size_t n = 0;
    for (const auto& [_, months] : entries_) n += months.size();
    return n;
}

std::size_t VintageStore::release_count() const {
    std::size_t n = 0;
    for (const auto& [_, months] : entries_)
        for (const auto& [__, list] : months) n += list.size();
    return n;
}

const std::map<Month, std::vector<Release>>& VintageStore::releases(const std::string& series) const {
    auto s = entries_.find(series);
    if (s == entries_.end()) throw data_error("ingest", "unknown series '" + series + "'");
    return s->second;
}

VintageStore parse_series_csv(std::istream& in) {
    VintageStore store;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header) {
            if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
            if (trim(line) != "series,ref_month,release_date,value")
                throw data_error("ingest", "line 1: expected header 'series,ref_month,release_date,value'");
            header = true;
            continue;
        }
        if (trim(line).empty()) continue;
        const auto where = "line " + std::to_string(lineno) + ": ";
        auto fields = split(line, ',');
        if (fields.size() != 4) throw data_error("ingest", where + "expected 4 fields, got " + std::to_string(fields.size()));
        const std::string name(trim(fields[0]));
        if (name.empty()) throw data_error("ingest", where + "empty series name");
        try {
            const Month ref = Month::parse(trim(fields[1]));
            const Date rel = Date::parse(trim(fields[2]));
            auto value = parse_double(trim(fields[3]));
            if (!value) throw data_error("ingest", "non-numeric value '" + fields[3] + "'");
            store.add(name, ref, rel, *value);
        } catch (const Error& e) {
            throw data_error("ingest", where + e.what());
        }
    }
    if (!header) throw data_error("ingest", "empty series file");
    return store;
}

VintageStore parse_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("ingest", "cannot open series file '" + path + "'");
    return parse_series_csv(in);
}

void write_series_csv(const VintageStore& store, std::ostream& out) {
    out << "series,ref_month,release_date,value\n";
    for (const auto& name : store.series_names())
        for (const auto& [month, list] : store.releases(name))
            for (const auto& r : list)
                out << name << ',' << month.str() << ',' << r.date.str() << ',' << format_double(r.value) << '\n';
}

void write_series_csv(const VintageStore& store, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("ingest", "cannot write '" + path + "'");
    write_series_csv(store, out);
}

VintageSource::VintageSource(const VintageStore& store, MergeRuleset rules, std::vector<std::string> stream_kinds)
    : store_(store), rules_(std::move(rules)), kinds_(std::move(stream_kinds)) {}

SeriesMap VintageSource::snapshot(Date asof) const {
    SeriesMap out = store_.snapshot(asof);
    if (rules_.rules.empty()) return out;
    for (const auto& kind : kinds_) {
        // Streams with no release yet still take part (as empty series).
        SeriesMap streams;
        for (const auto& name : store_.series_names()) {
            if (name.size() <= kind.size() || name.compare(name.size() - kind.size(), kind.size(), kind) != 0)
                continue;
            const std::string base = name.substr(0, name.size() - kind.size());
            auto it = out.find(name);
            streams.emplace(base, it != out.end() ? it->second : MonthlySeries(base, Month{}, {}));
        }
        if (streams.empty()) continue;
        for (auto& [base, series] : aggregate_streams(streams, rules_)) {
            if (series.empty()) {
                out.erase(base + kind);
                continue;
            }
            out.insert_or_assign(base + kind, series.renamed(base + kind));
        }
    }
    return out;
}

} // namespace nowcast
