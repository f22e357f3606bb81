#include "rvol/series.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "rvol/csv.hpp"
#include "rvol/dates.hpp"

namespace rvol {

void VolSeries::validate() const {
  if (values.empty()) throw std::invalid_argument("VolSeries: empty series");
  if (dates.size() != values.size())
    throw std::invalid_argument("VolSeries: dates/values length mismatch");
  for (double v : values)
    if (!(v > 0.0))
      throw std::invalid_argument("VolSeries: values must be strictly positive");
}

VolSeries VolSeries::from_values(std::vector<double> values) {
  VolSeries s;
  s.dates.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    s.dates.push_back(std::to_string(i + 1));
  s.values = std::move(values);
  s.validate();
  return s;
}

VolSeries VolSeries::from_values(std::vector<std::string> dates,
                                 std::vector<double> values) {
  VolSeries s;
  s.dates = std::move(dates);
  s.values = std::move(values);
  s.validate();
  return s;
}

VolSeries VolSeries::from_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  require_header(table, {"date", "value"}, path);
  if (table.rows.empty()) throw CsvError("no data rows in '" + path + "'", 1);

  VolSeries s;
  s.dates.reserve(table.rows.size());
  s.values.reserve(table.rows.size());

  bool all_iso = true;
  bool all_int = true;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = table.line_numbers[i];
    const double v = parse_double_field(row[1], line, "value");
    if (!(v > 0.0))
      throw CsvError("value must be strictly positive, got '" + row[1] + "'",
                     line);
    if (!looks_like_iso_date(row[0])) all_iso = false;
    long dummy = 0;
    auto [p, ec] =
        std::from_chars(row[0].data(), row[0].data() + row[0].size(), dummy);
    if (ec != std::errc{} || p != row[0].data() + row[0].size())
      all_int = false;
    s.dates.push_back(row[0]);
    s.values.push_back(v);
  }

  // Order check where the labels have an unambiguous order.
  auto order_key = [&](const std::string& d) -> long {
    if (all_iso) return days_from_civil(parse_iso_date(d));
    return std::stol(d);
  };
  if (all_iso || all_int) {
    for (std::size_t i = 1; i < s.dates.size(); ++i) {
      if (order_key(s.dates[i]) <= order_key(s.dates[i - 1]))
        throw CsvError("dates must be strictly increasing ('" + s.dates[i - 1] +
                           "' then '" + s.dates[i] + "')",
                       table.line_numbers[i]);
    }
  }
  return s;
}

void VolSeries::write_csv(const std::string& path,
                          const std::string& comment) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "date,value\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    out << dates[i] << "," << format_double(values[i]) << "\n";
}

}  // namespace rvol
