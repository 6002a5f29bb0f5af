#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace nsbench {

// Calendar date, serialized as ISO-8601 "YYYY-MM-DD".
class Date {
public:
    Date() = default;
    Date(int year, unsigned month, unsigned day);
    explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}

    // Throws ParseError unless `text` is exactly YYYY-MM-DD and names a real day.
    static Date parse(std::string_view text);

    std::string to_string() const;
    bool ok() const { return ymd_.ok(); }

    int year() const { return static_cast<int>(ymd_.year()); }
    unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
    unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

    // Same month/day `years` earlier; Feb 29 clamps to Feb 28.
    Date minus_years(int years) const;
    Date plus_days(int days) const;

    std::chrono::year_month_day ymd() const { return ymd_; }

    friend auto operator<=>(const Date& a, const Date& b) {
        return std::chrono::sys_days{a.ymd_} <=> std::chrono::sys_days{b.ymd_};
    }
    friend bool operator==(const Date& a, const Date& b) { return a.ymd_ == b.ymd_; }

private:
    std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                     std::chrono::day{1}};
};

} // namespace nsbench
