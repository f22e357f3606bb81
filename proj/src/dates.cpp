#include "rvol/dates.hpp"

#include <cctype>
#include <stdexcept>

namespace rvol {

bool looks_like_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

CivilDate parse_iso_date(const std::string& s) {
  if (!looks_like_iso_date(s))
    throw std::invalid_argument("expected ISO date YYYY-MM-DD, got '" + s + "'");
  CivilDate d;
  d.year = std::stoi(s.substr(0, 4));
  d.month = std::stoi(s.substr(5, 2));
  d.day = std::stoi(s.substr(8, 2));
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
    throw std::invalid_argument("out-of-range date '" + s + "'");
  return d;
}

long days_from_civil(const CivilDate& d) {
  int y = d.year;
  const int m = d.month;
  const int dd = d.day;
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + dd - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

int weekday_of(long serial_day) {
  // 1970-01-01 was a Thursday.
  long w = (serial_day + 4) % 7;
  if (w < 0) w += 7;
  return static_cast<int>(w);
}

long third_friday_serial(int year, int month) {
  const long first = days_from_civil({year, month, 1});
  const int wd = weekday_of(first);          // 0=Sun..6=Sat, Friday = 5
  const int offset = (5 - wd + 7) % 7;       // first Friday of the month
  return first + offset + 14;
}

long add_business_days(long serial_day, int n) {
  const int step = n >= 0 ? 1 : -1;
  int remaining = n >= 0 ? n : -n;
  long d = serial_day;
  while (remaining > 0) {
    d += step;
    const int wd = weekday_of(d);
    if (wd != 0 && wd != 6) --remaining;
  }
  return d;
}

bool in_settlement_window(const CivilDate& d, int before_bd, int after_bd) {
  const long serial = days_from_civil(d);
  const long friday = third_friday_serial(d.year, d.month);
  const long lo = add_business_days(friday, -before_bd);
  const long hi = add_business_days(friday, after_bd);
  return serial >= lo && serial <= hi;
}

}  // namespace rvol
