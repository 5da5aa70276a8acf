// Flat [section] key = value configuration with command-line overrides,
// and the deterministic CSV/manifest writers shared by the subcommands.
#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hypsmap/common.hpp"

namespace hypsmap {

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

class Config {
 public:
  void parse_stream(std::istream& in) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto semi = line.find(';');
      if (semi != std::string::npos) line.erase(semi);
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": malformed section header");
        section = detail::trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) +
                                         ": empty key");
      values_[section.empty() ? key : section + "." + key] = value;
    }
  }

  void parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    parse_stream(in);
  }

  /// Apply a CLI override of the form section.key=value.
  void set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got: " + assignment);
    values_[detail::trim(assignment.substr(0, eq))] =
        detail::trim(assignment.substr(eq + 1));
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("config key " + key + " is not a number: " + it->second);
    }
  }

  long get_int(const std::string& key, long fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    const long l = std::lround(v);
    if (static_cast<double>(l) != v)
      throw ConfigError("config key " + key + " is not an integer");
    return l;
  }

  std::vector<double> get_list(const std::string& key,
                               const std::string& fallback) const {
    const std::string raw = get_string(key, fallback);
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = detail::trim(tok);
      if (tok.empty()) continue;
      try {
        out.push_back(std::stod(tok));
      } catch (...) {
        throw ConfigError("config key " + key + ": bad list entry '" + tok + "'");
      }
    }
    if (out.empty()) throw ConfigError("config key " + key + ": empty list");
    return out;
  }

  const std::map<std::string, std::string>& items() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

inline constexpr const char* kVersion = "0.1.0";

/// Fixed-format double for byte-identical CSV output.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Manifest comment block: config echo, version and command name.
inline void write_manifest(std::ostream& os, const Config& cfg,
                           const std::string& command) {
  os << "# hypsmap version: " << kVersion << "\n";
  os << "# command: " << command << "\n";
  for (const auto& [k, v] : cfg.items()) os << "# " << k << ": " << v << "\n";
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ",";
    os << cells[i];
  }
  os << "\n";
}

}  // namespace hypsmap
