#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "hedge/errors.hpp"

namespace hedge {

using Date = std::chrono::sys_days;

// Parses strict ISO "YYYY-MM-DD"; anything else is a DataError.
Date parse_date(const std::string& s);
std::string format_date(Date d);

int year_of(Date d);
bool is_weekend(Date d);

// Weekday calendar of n days starting at `start` (start shifted forward to
// the next weekday if it falls on a weekend).
std::vector<Date> business_days(Date start, int n);

// Index of the first date in `dates` (sorted ascending) with year >= y, or
// -1 if none.
int first_index_of_year(const std::vector<Date>& dates, int y);

}  // namespace hedge
