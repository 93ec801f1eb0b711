#include "achronal/experiments.hpp"

#include "achronal/chi_localization.hpp"
#include "achronal/current.hpp"
#include "achronal/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

namespace achronal {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "name:1,2,3" -> {"name", {1, 2, 3}}
std::pair<std::string, std::vector<double>> split_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = trim(text.substr(0, colon));
  std::vector<double> args;
  if (colon != std::string::npos) args = parse_number_list(text.substr(colon + 1));
  return {name, args};
}

void expect_args(const std::string& text, const std::vector<double>& args, std::size_t n) {
  if (args.size() != n) {
    throw ConfigError("'" + text + "' expects " + std::to_string(n) + " numbers, got " + std::to_string(args.size()));
  }
}

int parse_axis(const std::string& text, double a) {
  if (a != 1.0 && a != 2.0 && a != 3.0) throw ConfigError("'" + text + "': axis must be 1, 2 or 3");
  return static_cast<int>(a) - 1;
}

std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_cell(xs[i]);
  }
  return out;
}

void add_common_params(ExperimentReport& r, const ExperimentSettings& s) {
  const StateProfile& f = s.state.profile();
  r.params.emplace_back("state.kind", f.kind == ProfileKind::bump ? "bump" : "gaussian");
  r.params.emplace_back("state.mass", s.state.mass());
  r.params.emplace_back("state.center", format_list({f.center[0], f.center[1], f.center[2]}));
  r.params.emplace_back("state.width", f.width);
  r.params.emplace_back("kernel.r", s.spec.r);
  r.params.emplace_back("reference_norm", s.state.reference_norm_squared());
  r.params.emplace_back("seed", static_cast<long long>(s.seed));
}

Cell route_cell(const FluxResult& f) { return to_string(f.route); }

// Rotation taking x3 to e.
SpinorMatrix rotation_to(const Vec3& e) {
  const Vec3 z = Vec3::UnitZ();
  const Vec3 axis = z.cross(e);
  const double angle = std::acos(std::clamp(z.dot(e), -1.0, 1.0));
  if (axis.norm() < 1e-14) return z.dot(e) > 0 ? SpinorMatrix::identity() : rotation(Vec3::UnitX(), std::numbers::pi);
  return rotation(axis.normalized(), angle);
}

}  // namespace

ExperimentSettings settings_from_config(const Config& c, std::uint64_t seed) {
  ExperimentSettings s;
  const std::string kind = c.get_string("state", "kind", "bump");
  const double mass = c.get_double("state", "mass", 1.0);
  const Vec3 center = c.get_vec3("state", "center", Vec3::Zero());
  const double width = c.get_double("state", "width", 2.0);
  try {
    if (kind == "bump") {
      s.state = bump_state(mass, c.get_double("state", "p_max", center.norm() + width), center, width);
    } else if (kind == "gaussian") {
      s.state = truncated_gaussian_state(mass, center, width);
    } else {
      throw ConfigError("state.kind: expected 'bump' or 'gaussian', got '" + kind + "'");
    }
    s.spec = KernelSpec(mass, c.get_double("kernel", "r", 1.5));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  s.flux.n_6d = c.get_int("flux", "n_6d", s.flux.n_6d);
  s.flux.n_strip_transverse = c.get_int("flux", "n_strip_transverse", s.flux.n_strip_transverse);
  s.flux.n_strip_axis = c.get_int("flux", "n_strip_axis", s.flux.n_strip_axis);
  s.flux.n_axis_cap = c.get_int("flux", "n_axis_cap", s.flux.n_axis_cap);
  s.flux.window_start = c.get_double("flux", "window_start", s.flux.window_start);
  s.flux.window_max = c.get_double("flux", "window_max", s.flux.window_max);
  s.flux.tail_tolerance = c.get_double("flux", "tail_tolerance", s.flux.tail_tolerance);
  if (s.flux.n_6d < 2 || s.flux.n_strip_transverse < 2 || s.flux.n_strip_axis < 2) {
    throw ConfigError("flux: node counts must be >= 2");
  }
  s.chi.anchors = c.get_int("chi", "anchors", s.chi.anchors);
  s.chi.n_transverse = c.get_int("chi", "n_transverse", s.chi.n_transverse);
  s.chi.n_s3 = c.get_int("chi", "n_s3", s.chi.n_s3);
  s.chi.fft_length = c.get_int("chi", "fft_length", s.chi.fft_length);
  if (s.chi.anchors < 1 || s.chi.n_transverse < 2 || s.chi.n_s3 < 2 || s.chi.fft_length < s.chi.n_s3) {
    throw ConfigError("chi: need anchors >= 1, n_transverse >= 2, n_s3 >= 2 and fft_length >= n_s3");
  }
  s.seed = seed;
  return s;
}

Projection parse_projection(const std::string& text) {
  const auto [name, args] = split_spec(text);
  if (name == "all") {
    expect_args(text, args, 0);
    return Projection::all();
  }
  if (name == "box") {
    expect_args(text, args, 6);
    return Projection::box(Vec3(args[0], args[1], args[2]), Vec3(args[3], args[4], args[5]));
  }
  if (name == "strip") {
    expect_args(text, args, 3);
    return Projection::strip(parse_axis(text, args[0]), args[1], args[2]);
  }
  if (name == "below" || name == "above") {
    expect_args(text, args, 2);
    return Projection::halfspace(parse_axis(text, args[0]), args[1], name == "below");
  }
  throw ConfigError("unknown region '" + text + "'");
}

std::vector<Projection> parse_projection_list(const std::string& text) {
  std::vector<Projection> out;
  for (const std::string& item : split(text, ';')) out.push_back(parse_projection(item));
  if (out.empty()) throw ConfigError("empty region list");
  return out;
}

AchronalSurface parse_surface(const std::string& text) {
  const auto [name, args] = split_spec(text);
  try {
    if (name == "time_slice") {
      expect_args(text, args, 1);
      return FlatPlane::time_slice(args[0]);
    }
    if (name == "plane") {
      expect_args(text, args, 4);
      return FlatPlane::spacelike(Vec3(args[0], args[1], args[2]), args[3]);
    }
    if (name == "light") {
      expect_args(text, args, 4);
      return FlatPlane::light(Vec3(args[0], args[1], args[2]), args[3]);
    }
    if (name == "chi") {
      expect_args(text, args, 0);
      return FlatPlane::chi();
    }
    if (name == "aet") {
      expect_args(text, args, 2);
      return aet_surface(args[0], args[1]);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("'" + text + "': " + e.what());
  }
  throw ConfigError("unknown surface '" + text + "'");
}

ExperimentReport run_normalization(const ExperimentSettings& s, const NormalizationParams& p) {
  const auto start = Clock::now();
  ExperimentReport r;
  r.experiment = "normalize-check";
  add_common_params(r, s);
  r.params.emplace_back("rho", p.rho);
  r.columns = {"surface", "value", "error_estimate", "route", "window", "relative_deviation"};

  struct Case {
    std::string name;
    FlatPlane plane;
    double tolerance;
  };
  const std::vector<Case> cases = {
      {"eps", FlatPlane::time_slice(0.0), p.tolerance_spacelike},
      {"chi", FlatPlane::chi(), p.tolerance_lightlike},
      {"boosted", FlatPlane::spacelike(Vec3(0.0, 0.0, std::tanh(p.rho)), 0.0), p.tolerance_boosted},
  };
  std::vector<FluxResult> results(cases.size());
  parallel_for(cases.size(), [&](std::size_t i) {
    results[i] = flux(s.state, Region{cases[i].plane, Projection::all()}, s.spec, s.flux);
  });
  const double norm = s.state.reference_norm_squared();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const double dev = std::abs(results[i].value / norm - 1.0);
    r.rows.push_back({cases[i].name, results[i].value, results[i].error_estimate, route_cell(results[i]),
                      results[i].window, dev});
    r.check_at_most("normalization_" + cases[i].name, dev, cases[i].tolerance);
  }
  r.wall_ms = elapsed_ms(start);
  return r;
}

ExperimentReport run_boost_limit(const ExperimentSettings& s, const BoostLimitParams& p) {
  const auto start = Clock::now();
  ExperimentReport r;
  r.experiment = "boost-limit";
  add_common_params(r, s);
  r.params.emplace_back("alpha", p.alpha);
  r.params.emplace_back("beta", p.beta);
  r.params.emplace_back("rho", format_list(p.rho));
  r.columns = {"rho", "value", "error_estimate", "route", "n_axis"};
  r.plot_x = "rho";
  r.plot_y = "value";

  std::vector<double> rhos = p.rho;
  std::sort(rhos.begin(), rhos.end());
  rhos.push_back(kInf);
  std::vector<FluxResult> results(rhos.size());
  parallel_for(rhos.size(), [&](std::size_t i) {
    results[i] = flux(s.state, boost_strip_image(rhos[i], p.alpha, p.beta).image, s.spec, s.flux);
  });
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    r.rows.push_back({rhos[i], results[i].value, results[i].error_estimate, route_cell(results[i]),
                      static_cast<long long>(results[i].n_axis)});
  }
  // Largest increase beyond twice the error of the pair; nonincreasing means <= 0.
  double excess = -kInf;
  for (std::size_t i = 0; i + 1 < rhos.size(); ++i) {
    const double allowance = 2.0 * std::max(results[i].error_estimate, results[i + 1].error_estimate);
    excess = std::max(excess, results[i + 1].value - results[i].value - allowance);
  }
  if (rhos.size() > 1) r.check_at_most("nonincreasing", std::max(excess, 0.0), 0.0);
  if (rhos.size() > 1) {
    const double gap = std::abs(results[rhos.size() - 2].value - results.back().value);
    r.check_at_most("high_boost_gap", gap, p.gap_tolerance);
  }
  r.wall_ms = elapsed_ms(start);
  return r;
}

ExperimentReport run_mctc_c(const ExperimentSettings& s, const MctcParams& p) {
  const auto start = Clock::now();
  ExperimentReport r;
  r.experiment = "mctc-c";
  add_common_params(r, s);
  r.params.emplace_back("alpha", format_list(p.alpha));
  r.columns = {"alpha",         "lightlike",          "lightlike_error", "spacelike", "spacelike_error",
               "lightlike_below", "lightlike_below_error", "difference",     "complement_sum"};
  const std::size_t n = p.alpha.size();
  std::vector<FluxResult> light(n), space(n), below(n);
  parallel_for(3 * n, [&](std::size_t k) {
    const std::size_t i = k / 3;
    const double a = p.alpha[i];
    switch (k % 3) {
      case 0:
        light[i] = flux(s.state, Region{FlatPlane::chi(), Projection::halfspace(2, a, false)}, s.spec, s.flux);
        break;
      case 1:
        space[i] = flux(s.state, Region{FlatPlane::time_slice(a), Projection::halfspace(2, a, false)}, s.spec, s.flux);
        break;
      default:
        below[i] = flux(s.state, Region{FlatPlane::chi(), Projection::halfspace(2, a, true)}, s.spec, s.flux);
    }
  });
  const double norm = s.state.reference_norm_squared();
  double worst = 0.0;
  double worst_complement = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = std::abs(light[i].value - space[i].value);
    const double sum = light[i].value + below[i].value;
    r.rows.push_back({p.alpha[i], light[i].value, light[i].error_estimate, space[i].value, space[i].error_estimate,
                      below[i].value, below[i].error_estimate, diff, sum});
    worst = std::max(worst, diff);
    worst_complement = std::max(worst_complement, std::abs(sum - norm));
  }
  r.check_at_most("lightlike_equals_spacelike", worst, p.tolerance);
  r.check_at_most("complement_sums_to_norm", worst_complement, p.complement_tolerance);
  r.wall_ms = elapsed_ms(start);
  return r;
}

ExperimentReport run_aet(const ExperimentSettings& s, const AetParams& p) {
  const auto start = Clock::now();
  ExperimentReport r;
  r.experiment = "aet";
  add_common_params(r, s);
  r.params.emplace_back("alpha", p.alpha);
  r.params.emplace_back("beta", p.beta);
  r.columns = {"piece", "value", "error_estimate", "route"};

  const PiecewiseFlat surface = aet_surface(p.alpha, p.beta);
  const Region delta{surface.pieces[0].plane, surface.pieces[0].cell};
  const Region delta_sigma = region_of_influence(delta, p.beta);
  std::vector<Region> regions;
  for (const auto& piece : surface.pieces) regions.push_back({piece.plane, piece.cell});
  regions.push_back(delta_sigma);
  std::vector<FluxResult> results(regions.size());
  parallel_for(regions.size(), [&](std::size_t i) { results[i] = flux(s.state, regions[i], s.spec, s.flux); });

  const std::vector<std::string> names = {"Delta", "X", "Gamma", "Delta_sigma"};
  for (std::size_t i = 0; i < results.size(); ++i) {
    r.rows.push_back({names[i], results[i].value, results[i].error_estimate, route_cell(results[i])});
  }
  const double total = results[0].value + results[1].value + results[2].value;
  const double total_err = results[0].error_estimate + results[1].error_estimate + results[2].error_estimate;
  r.rows.push_back({"total", total, total_err, "sum"});

  const double norm = s.state.reference_norm_squared();
  r.check_at_most("additivity", std::abs(total - norm), p.tolerance);
  r.check_at_most("influence_decomposition", std::abs(results[1].value - (results[3].value - results[0].value)),
                  p.tolerance);
  r.check_at_most("causality", results[0].value - results[3].value,
                  2.0 * std::max(results[0].error_estimate, results[3].error_estimate));
  r.wall_ms = elapsed_ms(start);
  return r;
}

ExperimentReport run_contraction(const ExperimentSettings& s, const ContractionParams& p) {
  const auto start = Clock::now();
  if (!(p.delta > 0.0)) throw std::invalid_argument("run_contraction: delta must be positive");
  if (std::abs(p.direction.norm() - 1.0) > 1e-9) throw std::invalid_argument("run_contraction: |e| must be 1");
  if (p.rho.empty()) throw std::invalid_argument("run_contraction: empty rho list");
  ExperimentReport r;
  r.experiment = "contraction";
  add_common_params(r, s);
  r.params.emplace_back("delta", p.delta);
  r.params.emplace_back("direction", format_list({p.direction[0], p.direction[1], p.direction[2]}));
  r.params.emplace_back("rho", format_list(p.rho));
  r.params.emplace_back("threshold", p.threshold);
  r.columns = {"rho", "strip_half_width", "value", "error_estimate", "comoving"};
  r.plot_x = "rho";
  r.plot_y = "value";

  // With R e3 = e and psi = W(R^-1) phi the strip can be taken across x3.
  const MassShellState psi = s.state.transformed(PoincareElement::pure_lorentz(rotation_to(p.direction).inverse()));
  const double m = psi.mass();
  const Region rest{FlatPlane::time_slice(0.0), Projection::strip(2, -p.delta, p.delta)};

  std::vector<double> rhos = p.rho;
  std::sort(rhos.begin(), rhos.end());
  const std::size_t n = rhos.size();

  // The comoving column uses the rest-frame strip grid, node-transported.
  const MomentumBox box = psi.support_box();
  const int rest_nodes = strip_axis_nodes(FlatPlane::time_slice(0.0), 2, box, m, p.delta, s.flux);
  const QuadratureGrid rest_grid = make_box_grid(m, box, s.flux.n_strip_transverse, rest_nodes, 2);

  std::vector<FluxResult> boosted(n);
  std::vector<double> comoving(n);
  std::vector<double> half_width(n);
  FluxResult oracle;
  const double rho_max = rhos.back();
  const double oracle_half_width = 0.5 * p.delta * std::exp(rho_max);
  parallel_for(n + 1, [&](std::size_t i) {
    if (i == n) {
      // High-boost limit: the strip |x3| <= delta e^rho / 2 on {x0 = -x3}.
      const Region limit{FlatPlane::light(-Vec3::UnitZ(), 0.0),
                         Projection::strip(2, -oracle_half_width, oracle_half_width)};
      oracle = flux(psi, limit, s.spec, s.flux);
      return;
    }
    const SpinorMatrix a = boost(Vec3::UnitZ(), rhos[i]);
    // <W(A) psi, T(S) W(A) psi> = <psi, T(A^-1 S) psi>
    const Region pulled = transform_region(PoincareElement::pure_lorentz(a.inverse()), rest);
    half_width[i] = pulled.projection.hi[2];
    boosted[i] = flux(psi, pulled, s.spec, s.flux);
    // <W(A) psi, T(A S) W(A) psi> on the transported grid
    const Region moved = transform_region(PoincareElement::pure_lorentz(a), rest);
    const auto& plane = std::get<FlatPlane>(moved.surface);
    comoving[i] = flux_strip_value(psi.transformed(PoincareElement::pure_lorentz(a)), plane, 2,
                                   moved.projection.lo[2], moved.projection.hi[2], transported(rest_grid, a), s.spec);
  });
  const double rest_value = flux_strip_value(psi, FlatPlane::time_slice(0.0), 2, -p.delta, p.delta, rest_grid, s.spec);

  for (std::size_t i = 0; i < n; ++i) {
    r.rows.push_back({rhos[i], half_width[i], boosted[i].value, boosted[i].error_estimate, comoving[i]});
  }
  r.rows.push_back({kInf, oracle_half_width, oracle.value, oracle.error_estimate,
                    std::numeric_limits<double>::quiet_NaN()});

  double deficit = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double allowance = 2.0 * std::max(boosted[i].error_estimate, boosted[i + 1].error_estimate);
    deficit = std::max(deficit, boosted[i].value - boosted[i + 1].value - allowance);
  }
  r.check_at_most("nondecreasing", deficit, 0.0);
  r.check_at_least("oracle_certifies_threshold", oracle.value, p.threshold);
  r.check_at_most("oracle_consistency", oracle.value - boosted.back().value, p.oracle_slack);
  r.check_at_least("high_boost_threshold", boosted.back().value, p.threshold);
  double drift = 0.0;
  for (std::size_t i = 0; i < n; ++i) drift = std::max(drift, std::abs(comoving[i] - rest_value));
  r.params.emplace_back("comoving_reference", rest_value);
  r.check_at_most("comoving_constant", drift, p.comoving_tolerance);
  r.wall_ms = elapsed_ms(start);
  return r;
}

ExperimentReport run_corollary_frame(const ExperimentSettings& s, const FourVector& origin, const ContractionParams& p) {
  ExperimentSettings shifted = s;
  const FourVector back{-origin.x0, -origin.x1, -origin.x2, -origin.x3};
  shifted.state = s.state.transformed(PoincareElement::pure_translation(back));
  ExperimentReport r = run_contraction(shifted, p);
  r.experiment = "corollary-frame";
  r.params.emplace_back("origin", format_list({origin.x0, origin.x1, origin.x2, origin.x3}));
  return r;
}

ExperimentReport run_current_eval(const ExperimentSettings& s, const CurrentEvalParams& p) {
  const auto start = Clock::now();
  ExperimentReport r;
  r.experiment = "current-eval";
  add_common_params(r, s);
  r.params.emplace_back("n", static_cast<long long>(p.n));
  r.params.emplace_back("h", p.h);
  r.params.emplace_back("lattice_n", static_cast<long long>(p.lattice_n));
  r.params.emplace_back("lattice_half_width", p.lattice_half_width);
  r.columns = {"x0", "x1", "x2", "x3", "J0", "J1", "J2", "J3", "margin", "imag_residue", "divergence"};

  std::vector<FourVector> events = p.events;
  if (p.lattice_n > 0) {
    const int k = p.lattice_n;
    const double w = p.lattice_half_width;
    const auto coord = [&](int i) { return k == 1 ? 0.0 : -w + 2.0 * w * i / (k - 1); };
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        for (int l = 0; l < k; ++l) events.emplace_back(coord((i + 3 * j + 7 * l) % k), coord(i), coord(j), coord(l));
      }
    }
  }
  const MomentumBox box = s.state.support_box();
  const QuadratureGrid grid = make_box_grid(s.state.mass(), box, p.n, p.n, 2);
  const CurrentEvaluator eval(s.state, grid, s.spec);
  const std::vector<CurrentValue> values = eval.evaluate(events);
  std::vector<double> div(events.size());
  parallel_for(events.size(), [&](std::size_t i) { div[i] = divergence(eval, events[i], p.h); });

  double worst_margin = kInf;
  double worst_imag = 0.0;
  double worst_div = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const CurrentValue& v = values[i];
    const double margin = v.J0 - v.J.norm();
    r.rows.push_back({events[i].x0, events[i].x1, events[i].x2, events[i].x3, v.J0, v.J[0], v.J[1], v.J[2], margin,
                      v.imag_residue, div[i]});
    worst_margin = std::min(worst_margin, margin / (1.0 + v.J0));
    worst_imag = std::max(worst_imag, v.imag_residue / (1.0 + v.J0));
    worst_div = std::max(worst_div, std::abs(div[i]));
  }
  if (!events.empty()) {
    r.check_at_least("causality", worst_margin, -1e-10);
    r.check_at_most("real_density", worst_imag, 1e-10);
    r.check_at_most("divergence", worst_div, p.divergence_tolerance);
  }
  r.wall_ms = elapsed_ms(start);
  return r;
}

ExperimentReport run_flux(const ExperimentSettings& s, const FluxRunParams& p) {
  const auto start = Clock::now();
  ExperimentReport r;
  r.experiment = "flux";
  add_common_params(r, s);
  r.params.emplace_back("surface", p.surface_text);
  r.columns = {"region", "value", "error_estimate", "route", "n_transverse", "n_axis", "window", "tail"};
  std::vector<FluxResult> results(p.regions.size());
  parallel_for(p.regions.size(),
               [&](std::size_t i) { results[i] = flux(s.state, Region{p.surface, p.regions[i]}, s.spec, s.flux); });
  const double norm = s.state.reference_norm_squared();
  double violation = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const FluxResult& f = results[i];
    r.rows.push_back({p.regions[i].describe(), f.value, f.error_estimate, route_cell(f),
                      static_cast<long long>(f.n_transverse), static_cast<long long>(f.n_axis), f.window, f.tail});
    const double slack = f.error_estimate + 1e-12;
    violation = std::max({violation, -f.value - slack, f.value - norm - slack});
  }
  r.check_at_most("within_zero_and_norm", violation, 0.0);
  r.wall_ms = elapsed_ms(start);
  return r;
}

ExperimentReport run_chi_compare(const ExperimentSettings& s, const ChiCompareParams& p) {
  const auto start = Clock::now();
  ExperimentReport r;
  r.experiment = "chi-compare";
  add_common_params(r, s);
  r.params.emplace_back("anchors", static_cast<long long>(s.chi.anchors));
  r.params.emplace_back("fft_length", static_cast<long long>(s.chi.fft_length));
  r.columns = {"region", "closed_form", "closed_form_error", "fourier", "fourier_error", "relative_difference"};

  const NystromFactor factor = default_nystrom(s.state, s.spec, static_cast<std::size_t>(s.chi.anchors), s.seed);
  const FourierGrid grid = make_fourier_grid(s.state, s.chi.n_transverse, s.chi.n_s3, s.chi.fft_length);
  const MomentumField field = embed_j(s.state, factor, grid);
  const std::vector<FluxResult> fourier = chi_probabilities(field, p.regions);
  std::vector<FluxResult> closed(p.regions.size());
  parallel_for(p.regions.size(),
               [&](std::size_t i) { closed[i] = flux(s.state, Region{FlatPlane::chi(), p.regions[i]}, s.spec, s.flux); });

  double worst = 0.0;
  for (std::size_t i = 0; i < p.regions.size(); ++i) {
    const double rel = std::abs(closed[i].value - fourier[i].value) / std::max(std::abs(closed[i].value), 1e-3);
    r.rows.push_back({p.regions[i].describe(), closed[i].value, closed[i].error_estimate, fourier[i].value,
                      fourier[i].error_estimate, rel});
    worst = std::max(worst, rel);
  }
  r.check_at_most("routes_agree", worst, p.tolerance);
  r.wall_ms = elapsed_ms(start);
  return r;
}

namespace {

struct CliOptions {
  std::string subcommand;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string csv;
  std::string json;
  std::string svg;
};

std::vector<FourVector> parse_events(const std::string& text) {
  std::vector<FourVector> out;
  for (const std::string& item : split(text, ';')) {
    const std::vector<double> xs = parse_number_list(item);
    if (xs.size() != 4) throw ConfigError("current.events: '" + item + "' is not a four-vector");
    out.emplace_back(xs[0], xs[1], xs[2], xs[3]);
  }
  return out;
}

ExperimentReport dispatch(const CliOptions& o, const Config& c) {
  const ExperimentSettings s = settings_from_config(c, o.seed);
  const std::string& cmd = o.subcommand;
  if (cmd == "normalize-check") {
    NormalizationParams p;
    p.rho = c.get_double("normalize", "rho", p.rho);
    p.tolerance_spacelike = c.get_double("normalize", "tolerance_spacelike", p.tolerance_spacelike);
    p.tolerance_lightlike = c.get_double("normalize", "tolerance_lightlike", p.tolerance_lightlike);
    p.tolerance_boosted = c.get_double("normalize", "tolerance_boosted", p.tolerance_boosted);
    return run_normalization(s, p);
  }
  if (cmd == "boost-limit") {
    BoostLimitParams p;
    p.alpha = c.get_double("boost_limit", "alpha", p.alpha);
    p.beta = c.get_double("boost_limit", "beta", p.beta);
    p.rho = c.get_list("boost_limit", "rho", p.rho);
    p.gap_tolerance = c.get_double("boost_limit", "gap_tolerance", p.gap_tolerance);
    for (double rho : p.rho) {
      if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("boost_limit.rho: values must be finite and >= 0");
    }
    return run_boost_limit(s, p);
  }
  if (cmd == "mctc-c") {
    MctcParams p;
    p.alpha = c.get_list("mctc_c", "alpha", p.alpha);
    p.tolerance = c.get_double("mctc_c", "tolerance", p.tolerance);
    p.complement_tolerance = c.get_double("mctc_c", "complement_tolerance", p.complement_tolerance);
    return run_mctc_c(s, p);
  }
  if (cmd == "aet") {
    AetParams p;
    p.alpha = c.get_double("aet", "alpha", p.alpha);
    p.beta = c.get_double("aet", "beta", p.beta);
    p.tolerance = c.get_double("aet", "tolerance", p.tolerance);
    if (!(p.alpha < p.beta)) throw ConfigError("aet: alpha must be below beta");
    return run_aet(s, p);
  }
  if (cmd == "contraction") {
    ContractionParams p;
    p.delta = c.get_double("contraction", "delta", p.delta);
    p.direction = c.get_vec3("contraction", "direction", p.direction);
    p.rho = c.get_list("contraction", "rho", p.rho);
    p.threshold = c.get_double("contraction", "threshold", p.threshold);
    p.oracle_slack = c.get_double("contraction", "oracle_slack", p.oracle_slack);
    p.comoving_tolerance = c.get_double("contraction", "comoving_tolerance", p.comoving_tolerance);
    if (!(p.delta > 0.0)) throw ConfigError("contraction.delta must be positive");
    if (std::abs(p.direction.norm() - 1.0) > 1e-9) throw ConfigError("contraction.direction must be a unit vector");
    if (p.rho.empty()) throw ConfigError("contraction.rho must not be empty");
    return run_contraction(s, p);
  }
  if (cmd == "current-eval") {
    CurrentEvalParams p;
    p.n = c.get_int("current", "n", p.n);
    if (c.has("current", "events")) p.events = parse_events(c.get_string("current", "events", ""));
    p.lattice_n = c.get_int("current", "lattice_n", p.lattice_n);
    p.lattice_half_width = c.get_double("current", "lattice_half_width", p.lattice_half_width);
    p.h = c.get_double("current", "h", p.h);
    p.divergence_tolerance = c.get_double("current", "divergence_tolerance", p.divergence_tolerance);
    if (p.n < 2) throw ConfigError("current.n must be >= 2");
    if (p.lattice_n < 0) throw ConfigError("current.lattice_n must be >= 0");
    return run_current_eval(s, p);
  }
  if (cmd == "flux") {
    FluxRunParams p;
    p.surface_text = c.require_string("flux", "surface");
    p.surface = parse_surface(p.surface_text);
    p.regions = parse_projection_list(c.require_string("flux", "regions"));
    return run_flux(s, p);
  }
  if (cmd == "chi-compare") {
    ChiCompareParams p;
    p.regions = parse_projection_list(
        c.get_string("chi", "regions", "all; strip:3,-0.5,0.5; strip:3,-1,1; below:3,0; box:-1,-1,-1,1,1,1"));
    p.tolerance = c.get_double("chi", "tolerance", p.tolerance);
    return run_chi_compare(s, p);
  }
  throw ConfigError("unknown subcommand '" + cmd + "'");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  static const std::vector<std::string> subcommands = {"current-eval", "flux",        "normalize-check", "boost-limit",
                                                       "mctc-c",       "aet",         "contraction",     "chi-compare"};
  CliOptions o;
  CLI::App app{"Localization probabilities on achronal surfaces"};
  app.require_subcommand(1);
  for (const std::string& name : subcommands) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", o.config_path, "INI configuration file")->required();
    sub->add_option("--seed", o.seed, "seed for randomized anchor placement");
    sub->add_option("--csv", o.csv, "CSV output path");
    sub->add_option("--json", o.json, "JSON summary path");
    sub->add_option("--svg", o.svg, "SVG plot path");
    sub->callback([&o, name] { o.subcommand = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  ExperimentReport report;
  try {
    const Config config = Config::load(o.config_path);
    if (o.csv.empty()) o.csv = config.get_string("output", "csv", o.subcommand + ".csv");
    if (o.json.empty()) o.json = config.get_string("output", "json", o.subcommand + ".json");
    if (o.svg.empty()) o.svg = config.get_string("output", "svg", "");
    const auto start = Clock::now();
    report = dispatch(o, config);
    report.wall_ms = elapsed_ms(start);
    write_text_file(o.csv, to_csv(report));
    write_text_file(o.json, to_json(report));
    if (!o.svg.empty()) {
      const std::string svg = to_svg(report);
      if (svg.empty()) {
        std::cerr << "warning: " << o.subcommand << " has no plottable series; no SVG written\n";
      } else {
        write_text_file(o.svg, svg);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const Verdict& v : report.verdicts) {
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << " measured=" << format_cell(v.measured)
              << " tolerance=" << format_cell(v.tolerance) << "\n";
  }
  std::cout << report.experiment << ": " << report.rows.size() << " rows, " << report.wall_ms << " ms\n";
  return report.all_pass() ? 0 : 2;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("achronal");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace achronal
