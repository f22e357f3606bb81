#pragma once

#include <string>
#include <vector>

namespace rvol {

// A dated sequence of strictly positive volatility observations, one step =
// one business day. Dates are labels: ordering is positional, and relabeling
// never changes any estimate computed from the series.
struct VolSeries {
  std::vector<std::string> dates;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }

  // Throws std::invalid_argument on empty input, nonpositive values, or a
  // date/value length mismatch.
  void validate() const;

  // Labels generated as "1".."n".
  static VolSeries from_values(std::vector<double> values);
  static VolSeries from_values(std::vector<std::string> dates,
                               std::vector<double> values);

  // Reads a `date,value` CSV. Values must be strictly positive; errors carry
  // the offending line number. When all dates parse as ISO dates (or all as
  // integers) they must be strictly increasing.
  static VolSeries from_csv(const std::string& path);

  // Writes a `date,value` CSV; `comment` (if nonempty) is emitted first as a
  // '#' line.
  void write_csv(const std::string& path, const std::string& comment = "") const;
};

}  // namespace rvol
