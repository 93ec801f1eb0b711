#include "achronal/config.hpp"
#include "achronal/report.hpp"

#include <nlohmann/json.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace achronal;

namespace {

std::string error_of(const std::string& text) {
  try {
    Config::parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config: typed getters and comments") {
  const Config c = Config::parse(
      "; leading comment\n"
      "[state]\n"
      "kind = gaussian\n"
      "mass = 1.25  \n"
      "center = 0.1, -0.2, 0.3\n"
      "# another comment\n"
      "[kernel]\n"
      "r = 2\n"
      "[flux]\n"
      "window_max = inf\n"
      "[contraction]\n"
      "rho = 0, 1.5, -inf\n");
  CHECK(c.get_string("state", "kind", "") == "gaussian");
  CHECK(c.get_double("state", "mass", 0.0) == 1.25);
  CHECK(c.get_double("state", "width", 7.0) == 7.0);
  CHECK(c.get_int("kernel", "r", 0) == 2);
  CHECK(c.get_vec3("state", "center", Vec3::Zero()) == Vec3(0.1, -0.2, 0.3));
  CHECK(std::isinf(c.get_double("flux", "window_max", 0.0)));
  const std::vector<double> rho = c.get_list("contraction", "rho", {});
  REQUIRE(rho.size() == 3);
  CHECK(rho[2] == -std::numeric_limits<double>::infinity());
  CHECK(c.has("kernel", "r"));
  CHECK_FALSE(c.has("kernel", "mass"));
  CHECK(c.entries().at("state.kind") == "gaussian");
}

TEST_CASE("config: unknown and malformed input is rejected by name") {
  CHECK(error_of("[state]\nmas = 1\n").find("state.mas") != std::string::npos);
  CHECK(error_of("[nope]\n").find("nope") != std::string::npos);
  CHECK_FALSE(error_of("mass = 1\n").empty());
  CHECK_FALSE(error_of("[state]\nmass\n").empty());
  CHECK_FALSE(error_of("[state\n").empty());
  const Config c = Config::parse("[state]\nmass = heavy\nkind = \n[flux]\n");
  CHECK_THROWS_AS(c.get_double("state", "mass", 1.0), ConfigError);
  try {
    c.require_string("flux", "surface");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("flux.surface") != std::string::npos);
  }
  CHECK_THROWS_AS(Config::load("/nonexistent/achronal.cfg"), ConfigError);
}

TEST_CASE("config: every schema key is accepted") {
  std::ostringstream text;
  for (const auto& [section, keys] : Config::schema()) {
    text << "[" << section << "]\n";
    for (const auto& key : keys) text << key << " = 1\n";
  }
  CHECK_NOTHROW(Config::parse(text.str()));
}

TEST_CASE("number lists") {
  CHECK(parse_number_list("1, 2.5e-3 ,-4") == std::vector<double>{1, 2.5e-3, -4});
  CHECK(parse_number_list("inf").front() == std::numeric_limits<double>::infinity());
  CHECK_THROWS(parse_number_list("1, x"));
  CHECK_THROWS(parse_number_list("1,,2"));
}

TEST_CASE("report: 17 significant digits round-trip") {
  const double x = 0.1 + 0.2;
  CHECK(format_cell(x) == "0.30000000000000004");
  CHECK(std::stod(format_cell(M_PI)) == M_PI);
  CHECK(format_cell(42LL) == "42");
  CHECK(format_cell(std::string("a,b")) == "\"a,b\"");
  CHECK(format_cell(std::string("say \"hi\"")) == "\"say \"\"hi\"\"\"");
}

TEST_CASE("report: csv, json and svg") {
  ExperimentReport r;
  r.experiment = "demo";
  r.params = {{"rho", 1.5}, {"n", 20LL}, {"surface", std::string("chi")}};
  r.columns = {"x", "value"};
  r.rows = {{0.0, 1.0}, {1.0, 0.5}, {2.0, std::numeric_limits<double>::quiet_NaN()}};
  r.check_at_most("small", 1e-4, 1e-3);
  r.check_at_least("large", 0.4, 0.5);
  r.wall_ms = 12.5;
  CHECK_FALSE(r.all_pass());
  CHECK(r.verdicts[0].pass);
  CHECK(r.number(1, "value") == 0.5);
  CHECK_THROWS_AS(r.column("missing"), std::out_of_range);

  const std::string csv = to_csv(r);
  CHECK(csv.rfind("x,value\n", 0) == 0);
  CHECK(csv.find("1,0.5\n") != std::string::npos);
  CHECK(csv.find("wall") == std::string::npos);

  const nlohmann::json j = nlohmann::json::parse(to_json(r));
  CHECK(j["experiment"] == "demo");
  CHECK(j["params"]["rho"] == 1.5);
  CHECK(j["params"]["n"] == 20);
  CHECK(j["params"]["surface"] == "chi");
  REQUIRE(j["verdicts"].size() == 2);
  CHECK(j["verdicts"][1]["name"] == "large");
  CHECK(j["verdicts"][1]["pass"] == false);
  CHECK(j["verdicts"][1]["measured"] == 0.4);
  CHECK(j["verdicts"][1]["tolerance"] == 0.5);
  CHECK(j["wall_ms"] == 12.5);

  CHECK(to_svg(r).empty());
  r.plot_x = "x";
  r.plot_y = "value";
  const std::string svg = to_svg(r);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
}
