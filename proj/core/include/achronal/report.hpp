#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace achronal {

using Cell = std::variant<double, long long, std::string>;

struct Verdict {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<std::pair<std::string, Cell>> params;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Verdict> verdicts;
  double wall_ms = 0.0;
  /// Columns used for the optional SVG line plot.
  std::string plot_x;
  std::string plot_y;

  bool all_pass() const;
  /// Records measured <= tolerance.
  void check_at_most(const std::string& name, double measured, double tolerance);
  /// Records measured >= threshold.
  void check_at_least(const std::string& name, double measured, double threshold);
  /// Column index by name; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

/// Doubles as %.17g; integers and strings verbatim (strings quoted when they
/// contain a comma or quote).
std::string format_cell(const Cell& c);

std::string to_csv(const ExperimentReport& r);
/// {experiment, params, verdicts: [{name, pass, measured, tolerance}], wall_ms}
std::string to_json(const ExperimentReport& r);
/// Polyline of plot_y against plot_x with labelled axes; empty when either
/// column is unset or fewer than two finite points exist.
std::string to_svg(const ExperimentReport& r);

/// Throws std::runtime_error naming the path on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace achronal
