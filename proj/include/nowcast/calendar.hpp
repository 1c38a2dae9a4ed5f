#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace nowcast {

// A calendar month stored as a serial index (year * 12 + month - 1).
class Month {
public:
    constexpr Month() = default;
    constexpr Month(int year, int month) : serial_(year * 12 + (month - 1)) {}

    static constexpr Month from_serial(int serial) {
        Month m;
        m.serial_ = serial;
        return m;
    }
    // Parses YYYY-MM; throws Error(Data) on malformed input.
    static Month parse(std::string_view text);

    constexpr int serial() const { return serial_; }
    constexpr int year() const { return floor_div(serial_, 12); }
    constexpr int month() const { return serial_ - floor_div(serial_, 12) * 12 + 1; }

    std::string str() const;

    constexpr Month operator+(int months) const { return from_serial(serial_ + months); }
    constexpr Month operator-(int months) const { return from_serial(serial_ - months); }
    constexpr int operator-(Month other) const { return serial_ - other.serial_; }
    Month& operator++() { ++serial_; return *this; }

    constexpr auto operator<=>(const Month&) const = default;

private:
    static constexpr int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
    int serial_ = 0;
};

// A calendar date. Date::max() stands in for "+infinity" (latest vintage).
struct Date {
    int year = 0;
    int month = 1;
    int day = 1;

    static Date parse(std::string_view text);
    static constexpr Date max() { return Date{9999, 12, 31}; }
    static constexpr Date first_of(Month m) { return Date{m.year(), m.month(), 1}; }
    static Date in_month(Month m, int day);

    Month month_of() const { return Month(year, month); }
    std::string str() const;
    bool is_max() const { return *this == max(); }

    constexpr auto operator<=>(const Date&) const = default;
};

int days_in_month(int year, int month);

} // namespace nowcast
