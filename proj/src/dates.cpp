#include "hedge/dates.hpp"

#include <cstdio>

namespace hedge {

Date parse_date(const std::string& s) {
    int y = 0, m = 0, d = 0;
    char tail = 0;
    if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3)
        throw DataError("bad date '" + s + "', expected YYYY-MM-DD");
    std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(unsigned(m)),
                                    std::chrono::day(unsigned(d))};
    if (!ymd.ok()) throw DataError("invalid calendar date '" + s + "'");
    return std::chrono::sys_days(ymd);
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd(d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

int year_of(Date d) { return int(std::chrono::year_month_day(d).year()); }

bool is_weekend(Date d) {
    std::chrono::weekday wd(d);
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

std::vector<Date> business_days(Date start, int n) {
    if (n < 0) throw ConfigError("business_days: negative count");
    std::vector<Date> out;
    out.reserve(n);
    Date d = start;
    while (static_cast<int>(out.size()) < n) {
        if (!is_weekend(d)) out.push_back(d);
        d += std::chrono::days(1);
    }
    return out;
}

int first_index_of_year(const std::vector<Date>& dates, int y) {
    for (size_t i = 0; i < dates.size(); ++i)
        if (year_of(dates[i]) >= y) return static_cast<int>(i);
    return -1;
}

}  // namespace hedge
