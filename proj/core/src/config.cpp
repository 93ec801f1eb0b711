#include "achronal/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace achronal {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, const std::string& what) {
  const std::string t = trim(raw);
  std::string lower = t;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "inf" || lower == "+inf") return std::numeric_limits<double>::infinity();
  if (lower == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + t + "' is not a number");
  }
}

}  // namespace

const std::map<std::string, std::vector<std::string>>& Config::schema() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"state", {"kind", "mass", "p_max", "center", "width"}},
      {"kernel", {"r"}},
      {"current", {"n", "events", "lattice_n", "lattice_half_width", "h", "divergence_tolerance"}},
      {"flux",
       {"n_6d", "n_strip_transverse", "n_strip_axis", "n_axis_cap", "window_start", "window_max", "tail_tolerance",
        "surface", "regions"}},
      {"chi", {"anchors", "n_transverse", "n_s3", "fft_length", "regions", "tolerance", "parseval_tolerance"}},
      {"normalize", {"rho", "tolerance_spacelike", "tolerance_lightlike", "tolerance_boosted"}},
      {"boost_limit", {"alpha", "beta", "rho", "gap_tolerance"}},
      {"mctc_c", {"alpha", "tolerance", "complement_tolerance"}},
      {"aet", {"alpha", "beta", "tolerance"}},
      {"contraction", {"delta", "direction", "rho", "threshold", "oracle_slack", "comoving_tolerance"}},
      {"output", {"csv", "json", "svg"}},
  };
  return s;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  boost::property_tree::ptree tree;
  std::stringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Config c;
  c.origin_ = origin;
  const auto& known = schema();
  // The INI reader drops sections without keys; check the headers directly.
  std::stringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const std::string t = trim(line);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') continue;
    const std::string name = trim(t.substr(1, t.size() - 2));
    if (!known.count(name)) throw ConfigError(origin + ": unknown section [" + name + "]");
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(origin + ": key '" + section + "' outside any section");
    }
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError(origin + ": unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
        throw ConfigError(origin + ": unknown key '" + section + "." + key + "'");
      }
      c.values_[section + "." + key] = trim(value.data());
    }
  }
  return c;
}

const std::string* Config::find(const std::string& section, const std::string& key) const {
  const auto it = values_.find(section + "." + key);
  return it == values_.end() ? nullptr : &it->second;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
  const std::string* v = find(section, key);
  return v ? *v : fallback;
}

std::string Config::require_string(const std::string& section, const std::string& key) const {
  const std::string* v = find(section, key);
  if (!v) throw ConfigError(origin_ + ": missing required key '" + section + "." + key + "'");
  return *v;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const std::string* v = find(section, key);
  return v ? parse_number(*v, section + "." + key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  const double d = parse_number(*v, section + "." + key);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(section + "." + key + ": expected an integer");
  return static_cast<int>(d);
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(section + "." + key + ": expected true or false");
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) throw ConfigError("list '" + text + "' has an empty item");
    out.push_back(parse_number(item, "list"));
  }
  return out;
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     const std::vector<double>& fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  try {
    return parse_number_list(*v);
  } catch (const ConfigError& e) {
    throw ConfigError(section + "." + key + ": " + e.what());
  }
}

Vec3 Config::get_vec3(const std::string& section, const std::string& key, const Vec3& fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  const std::vector<double> xs = get_list(section, key, {});
  if (xs.size() != 3) throw ConfigError(section + "." + key + ": expected three comma-separated numbers");
  return {xs[0], xs[1], xs[2]};
}

}  // namespace achronal
