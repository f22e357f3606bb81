#pragma once

#include <string>

namespace rvol {

// Minimal ISO-8601 calendar arithmetic for the market pipeline: day counts
// between quote and expiry and the settlement window around the third Friday
// of each month. Weekends are the only non-business days; there is no
// holiday calendar.
struct CivilDate {
  int year = 0;
  int month = 0;  // 1..12
  int day = 0;    // 1..31
};

// Parses YYYY-MM-DD, throws std::invalid_argument on malformed input.
CivilDate parse_iso_date(const std::string& s);
bool looks_like_iso_date(const std::string& s);

// Days since 1970-01-01 (Hinnant's civil-days algorithm).
long days_from_civil(const CivilDate& d);

// 0 = Sunday ... 6 = Saturday.
int weekday_of(long serial_day);

long third_friday_serial(int year, int month);

// Serial day shifted by n business days (n may be negative).
long add_business_days(long serial_day, int n);

// True when the date falls within [third Friday - before_bd, third Friday +
// after_bd] of its own month, measured in business days.
bool in_settlement_window(const CivilDate& d, int before_bd, int after_bd);

}  // namespace rvol
