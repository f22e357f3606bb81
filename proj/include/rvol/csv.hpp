#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvol {

// Parse/format helpers for the comma-separated artifacts the toolkit reads
// and writes. Lines starting with '#' are treated as comments (output files
// use one to reference their manifest); the first non-comment line must be
// the header.
struct CsvError : std::runtime_error {
  CsvError(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_number(line) {}
  std::size_t line_number;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // source line of each row
};

CsvTable read_csv(const std::string& path);

// Throws CsvError(0) unless the header matches `expected` exactly.
void require_header(const CsvTable& table,
                    const std::vector<std::string>& expected,
                    const std::string& path);

double parse_double_field(const std::string& field, std::size_t line,
                          const std::string& column);
long parse_long_field(const std::string& field, std::size_t line,
                      const std::string& column);

std::string format_double(double v);  // round-trip precision

}  // namespace rvol
