#include "nsbench/date.hpp"

#include "nsbench/error.hpp"

#include <cctype>
#include <cstdio>

namespace nsbench {

namespace chr = std::chrono;

Date::Date(int y, unsigned m, unsigned d) : ymd_(chr::year{y}, chr::month{m}, chr::day{d}) {
    if (!ymd_.ok())
        throw ParseError("invalid calendar date " + std::to_string(y) + "-" +
                         std::to_string(m) + "-" + std::to_string(d));
}

Date Date::parse(std::string_view text) {
    auto bad = [&] { return ParseError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw bad();
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (!std::isdigit(static_cast<unsigned char>(text[i])))
            throw bad();
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i)
            v = v * 10 + (text[i] - '0');
        return v;
    };
    chr::year_month_day ymd{chr::year{num(0, 4)}, chr::month{static_cast<unsigned>(num(5, 2))},
                            chr::day{static_cast<unsigned>(num(8, 2))}};
    if (!ymd.ok())
        throw bad();
    return Date{ymd};
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

Date Date::minus_years(int years) const {
    chr::year_month_day shifted{ymd_.year() - std::chrono::years{years}, ymd_.month(), ymd_.day()};
    if (!shifted.ok())
        shifted = chr::year_month_day{shifted.year() / shifted.month() / chr::last};
    return Date{shifted};
}

Date Date::plus_days(int days) const {
    return Date{chr::year_month_day{chr::sys_days{ymd_} + chr::days{days}}};
}

} // namespace nsbench
