#include "rvol/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

namespace rvol {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split_line(t);
    for (auto& f : fields) f = trimmed(f);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      throw CsvError("expected " + std::to_string(table.header.size()) +
                         " fields, got " + std::to_string(fields.size()),
                     line_no);
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw CsvError("missing header in '" + path + "'", 1);
  return table;
}

void require_header(const CsvTable& table,
                    const std::vector<std::string>& expected,
                    const std::string& path) {
  if (table.header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i)
      want += (i ? "," : "") + expected[i];
    std::string got;
    for (std::size_t i = 0; i < table.header.size(); ++i)
      got += (i ? "," : "") + table.header[i];
    throw CsvError("'" + path + "' has header '" + got + "', expected '" +
                       want + "'",
                   1);
  }
}

double parse_double_field(const std::string& field, std::size_t line,
                          const std::string& column) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw CsvError("cannot parse '" + field + "' as number in column '" +
                       column + "'",
                   line);
  return v;
}

long parse_long_field(const std::string& field, std::size_t line,
                      const std::string& column) {
  long v = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw CsvError("cannot parse '" + field + "' as integer in column '" +
                       column + "'",
                   line);
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace rvol
