#include "rvol/config.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace rvol {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trimmed(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trimmed(cur).empty() || !out.empty()) out.push_back(trimmed(cur));
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        cfg.problems_.push_back("line " + std::to_string(line_no) +
                                ": malformed section header '" + t + "'");
      else
        section = trimmed(t.substr(1, t.size() - 2));
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      cfg.problems_.push_back("line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + t + "'");
      continue;
    }
    const std::string key = trimmed(t.substr(0, eq));
    const std::string val = trimmed(t.substr(eq + 1));
    if (key.empty()) {
      cfg.problems_.push_back("line " + std::to_string(line_no) + ": empty key");
      continue;
    }
    cfg.values_[section][key] = val;
    cfg.consumed_[section + "." + key] = false;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

bool KeyValueConfig::has(const std::string& section,
                         const std::string& key) const {
  auto s = values_.find(section);
  return s != values_.end() && s->second.count(key) > 0;
}

std::optional<std::string> KeyValueConfig::raw(const std::string& section,
                                               const std::string& key) const {
  auto s = values_.find(section);
  if (s == values_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  consumed_[section + "." + key] = true;
  return k->second;
}

double KeyValueConfig::get_double(const std::string& section,
                                  const std::string& key, double fallback) {
  auto v = raw(section, key);
  if (!v) return fallback;
  double out = 0.0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || p != v->data() + v->size()) {
    problems_.push_back("[" + section + "] " + key + ": '" + *v +
                        "' is not a number");
    return fallback;
  }
  return out;
}

long KeyValueConfig::get_long(const std::string& section,
                              const std::string& key, long fallback) {
  auto v = raw(section, key);
  if (!v) return fallback;
  long out = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || p != v->data() + v->size()) {
    problems_.push_back("[" + section + "] " + key + ": '" + *v +
                        "' is not an integer");
    return fallback;
  }
  return out;
}

bool KeyValueConfig::get_bool(const std::string& section,
                              const std::string& key, bool fallback) {
  auto v = raw(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "on" || *v == "1") return true;
  if (*v == "false" || *v == "off" || *v == "0") return false;
  problems_.push_back("[" + section + "] " + key + ": '" + *v +
                      "' is not a boolean (true/false/on/off/1/0)");
  return fallback;
}

std::string KeyValueConfig::get_string(const std::string& section,
                                       const std::string& key,
                                       std::string fallback) {
  auto v = raw(section, key);
  return v ? *v : fallback;
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& section, const std::string& key,
    std::vector<double> fallback) {
  auto v = raw(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(*v)) {
    double d = 0.0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), d);
    if (ec != std::errc{} || p != item.data() + item.size()) {
      problems_.push_back("[" + section + "] " + key + ": '" + item +
                          "' is not a number");
      return fallback;
    }
    out.push_back(d);
  }
  if (out.empty()) {
    problems_.push_back("[" + section + "] " + key + ": empty list");
    return fallback;
  }
  return out;
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& section,
                                              const std::string& key,
                                              std::vector<int> fallback) {
  auto v = raw(section, key);
  if (!v) return fallback;
  std::vector<int> out;
  for (const auto& item : split_list(*v)) {
    int d = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), d);
    if (ec != std::errc{} || p != item.data() + item.size()) {
      problems_.push_back("[" + section + "] " + key + ": '" + item +
                          "' is not an integer");
      return fallback;
    }
    out.push_back(d);
  }
  if (out.empty()) {
    problems_.push_back("[" + section + "] " + key + ": empty list");
    return fallback;
  }
  return out;
}

void KeyValueConfig::check() const {
  std::vector<std::string> all = problems_;
  for (const auto& [key, used] : consumed_)
    if (!used) all.push_back("unknown key '" + key + "'");
  if (!all.empty()) throw ConfigError(std::move(all));
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for digest");
  std::uint64_t h = 1469598103934665603ull;
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + hex;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace rvol
