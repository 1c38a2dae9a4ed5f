#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace nowcast {

// Hyperparameter record. Values stay textual so a record round-trips through
// config files and CSV exports unchanged; typed access validates on read.
class ParamSet {
public:
    ParamSet() = default;
    ParamSet(std::initializer_list<std::pair<const std::string, std::string>> init) : values_(init) {}

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

    // "key=value;key=value" in key order.
    std::string str() const;

    bool operator==(const ParamSet&) const = default;

private:
    std::map<std::string, std::string> values_;
};

// Ordered hyperparameter grid. Combinations enumerate the cartesian product
// with the first-declared dimension varying slowest.
struct ParamGrid {
    std::vector<std::pair<std::string, std::vector<std::string>>> dimensions;

    std::vector<ParamSet> combinations(const ParamSet& base = {}) const;
};

} // namespace nowcast
