#pragma once

#include "achronal/minkowski.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace achronal {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// INI-style configuration: [section] headers, key = value lines, ';' or '#'
/// comments. Sections and keys outside the schema are rejected at load time.
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  /// Comma-separated numbers.
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;
  Vec3 get_vec3(const std::string& section, const std::string& key, const Vec3& fallback) const;

  /// Throws ConfigError naming section.key when absent.
  std::string require_string(const std::string& section, const std::string& key) const;

  /// section.key -> raw value, in sorted order.
  const std::map<std::string, std::string>& entries() const { return values_; }

  /// Accepted sections and keys.
  static const std::map<std::string, std::vector<std::string>>& schema();

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;

  const std::string* find(const std::string& section, const std::string& key) const;
};

/// Parses "a, b, c" into numbers; "inf" and "-inf" are accepted.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace achronal
