#include "nowcast/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "nowcast/error.hpp"

namespace nowcast {
namespace {

bool parse_fixed_int(std::string_view text, int& out) {
    if (text.empty()) return false;
    for (char c : text)
        if (c < '0' || c > '9') return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

} // namespace

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return kDays[month - 1];
}

Month Month::parse(std::string_view text) {
    int y = 0, m = 0;
    if (text.size() != 7 || text[4] != '-' || !parse_fixed_int(text.substr(0, 4), y) ||
        !parse_fixed_int(text.substr(5, 2), m) || m < 1 || m > 12)
        throw data_error("calendar", "malformed month '" + std::string(text) + "' (expected YYYY-MM)");
    return Month(y, m);
}

std::string Month::str() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year(), month());
    return buf;
}

Date Date::parse(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_fixed_int(text.substr(0, 4), y) ||
        !parse_fixed_int(text.substr(5, 2), m) || !parse_fixed_int(text.substr(8, 2), d) || m < 1 || m > 12 ||
        d < 1 || d > days_in_month(y, m))
        throw data_error("calendar", "malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    return Date{y, m, d};
}

Date Date::in_month(Month m, int day) {
    const int last = days_in_month(m.year(), m.month());
    return Date{m.year(), m.month(), day > last ? last : day};
}

std::string Date::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

} // namespace nowcast
