#include "nowcast/params.hpp"

#include "nowcast/error.hpp"
#include "nowcast/text.hpp"

namespace nowcast {

std::string ParamSet::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ParamSet::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    auto v = parse_double(it->second);
    if (!v) throw config_error("params", "parameter '" + key + "' is not a number: '" + it->second + "'");
    return *v;
}

int ParamSet::get_int(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "none") return -1;
    auto v = parse_int(it->second);
    if (!v) throw config_error("params", "parameter '" + key + "' is not an integer: '" + it->second + "'");
    return static_cast<int>(*v);
}

bool ParamSet::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw config_error("params", "parameter '" + key + "' is not a boolean: '" + it->second + "'");
}

std::vector<int> ParamSet::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<int> out;
    for (const auto& part : split(it->second, 'x')) {
        auto v = parse_int(part);
        if (!v || *v <= 0) throw config_error("params", "parameter '" + key + "' is not a size list: '" + it->second + "'");
        out.push_back(static_cast<int>(*v));
    }
    return out;
}

std::string ParamSet::str() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        if (!out.empty()) out += ';';
        out += k + '=' + v;
    }
    return out;
}

std::vector<ParamSet> ParamGrid::combinations(const ParamSet& base) const {
    std::vector<ParamSet> combos{base};
    for (const auto& [name, values] : dimensions) {
        if (values.empty()) throw config_error("params", "grid dimension '" + name + "' has no values");
        std::vector<ParamSet> next;
        next.reserve(combos.size() * values.size());
        for (const auto& combo : combos)
            for (const auto& v : values) {
                ParamSet p = combo;
                p.set(name, v);
                next.push_back(std::move(p));
            }
        combos = std::move(next);
    }
    return combos;
}

} // namespace nowcast
