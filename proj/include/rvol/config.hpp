#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvol {

// Accumulates every problem found in a config file so the user sees them all
// at once.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), issues(std::move(problems)) {}
  std::vector<std::string> issues;

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "config errors:";
    for (const auto& p : v) s += "\n  - " + p;
    return s;
  }
};

// Flat typed key-value file with [section] headers, '#' comments and
// `key = value` lines.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> raw(const std::string& section,
                                 const std::string& key) const;

  // Typed getters record parse problems instead of throwing; call
  // check() once all values are read.
  double get_double(const std::string& section, const std::string& key,
                    double fallback);
  long get_long(const std::string& section, const std::string& key,
                long fallback);
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback);
  std::string get_string(const std::string& section, const std::string& key,
                         std::string fallback);
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key,
                                      std::vector<double> fallback);
  std::vector<int> get_int_list(const std::string& section,
                                const std::string& key,
                                std::vector<int> fallback);

  void record_problem(std::string msg) { problems_.push_back(std::move(msg)); }

  // Throws ConfigError when any getter failed or any key was never read.
  void check() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
  mutable std::map<std::string, bool> consumed_;  // "section.key" -> read
  std::vector<std::string> problems_;
};

// FNV-1a 64-bit digest of a file's bytes, as "fnv1a64:<hex>". Used in
// manifests to pin the exact inputs of a run.
std::string file_digest(const std::string& path);

std::string utc_timestamp();

}  // namespace rvol
