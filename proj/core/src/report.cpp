#include "achronal/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace achronal {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

bool ExperimentReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

void ExperimentReport::check_at_most(const std::string& name, double measured, double tolerance) {
  verdicts.push_back({name, measured <= tolerance, measured, tolerance});
}

void ExperimentReport::check_at_least(const std::string& name, double measured, double threshold) {
  verdicts.push_back({name, measured >= threshold, measured, threshold});
}

std::size_t ExperimentReport::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

double ExperimentReport::number(std::size_t row, const std::string& name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
  throw std::invalid_argument("column '" + name + "' is not numeric");
}

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string to_csv(const ExperimentReport& r) {
  std::string out;
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    if (i) out += ',';
    out += format_cell(r.columns[i]);
  }
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : r.params) {
    if (const auto* d = std::get_if<double>(&value)) {
      params[key] = json_number(*d);
    } else if (const auto* i = std::get_if<long long>(&value)) {
      params[key] = *i;
    } else {
      params[key] = std::get<std::string>(value);
    }
  }
  j["params"] = params;
  nlohmann::ordered_json verdicts = nlohmann::ordered_json::array();
  for (const Verdict& v : r.verdicts) {
    nlohmann::ordered_json e;
    e["name"] = v.name;
    e["pass"] = v.pass;
    e["measured"] = json_number(v.measured);
    e["tolerance"] = json_number(v.tolerance);
    verdicts.push_back(e);
  }
  j["verdicts"] = verdicts;
  j["wall_ms"] = r.wall_ms;
  return j.dump(2) + "\n";
}

std::string to_svg(const ExperimentReport& r) {
  if (r.plot_x.empty() || r.plot_y.empty()) return {};
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const double x = r.number(i, r.plot_x);
    const double y = r.number(i, r.plot_y);
    if (std::isfinite(x) && std::isfinite(y)) pts.emplace_back(x, y);
  }
  if (pts.size() < 2) return {};
  std::sort(pts.begin(), pts.end());

  constexpr double width = 640, height = 400, margin = 60;
  double x0 = pts.front().first, x1 = pts.back().first;
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& [x, y] : pts) {
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y1))) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const auto sx = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
  const auto sy = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
    << height - margin << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
    << "\" stroke=\"black\"/>\n";
  s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (const auto& [x, y] : pts) s << sx(x) << ',' << sy(y) << ' ';
  s << "\"/>\n";
  s << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">" << r.plot_x
    << "</text>\n";
  s << "<text x=\"15\" y=\"" << height / 2 << "\" transform=\"rotate(-90 15 " << height / 2
    << ")\" text-anchor=\"middle\">" << r.plot_y << "</text>\n";
  s << "<text x=\"" << margin << "\" y=\"" << height - margin + 18 << "\" text-anchor=\"middle\">"
    << format_double(x0).substr(0, 8) << "</text>\n";
  s << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 18 << "\" text-anchor=\"middle\">"
    << format_double(x1).substr(0, 8) << "</text>\n";
  s << "<text x=\"" << margin - 5 << "\" y=\"" << height - margin << "\" text-anchor=\"end\">"
    << format_double(y0).substr(0, 8) << "</text>\n";
  s << "<text x=\"" << margin - 5 << "\" y=\"" << margin << "\" text-anchor=\"end\">" << format_double(y1).substr(0, 8)
    << "</text>\n";
  s << "<text x=\"" << width / 2 << "\" y=\"25\" text-anchor=\"middle\">" << r.experiment << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace achronal
