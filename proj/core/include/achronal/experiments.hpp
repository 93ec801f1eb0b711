#pragma once

#include "achronal/config.hpp"
#include "achronal/flux.hpp"
#include "achronal/kernels.hpp"
#include "achronal/report.hpp"
#include "achronal/states.hpp"
#include "achronal/surfaces.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace achronal {

struct ChiSettings {
  int anchors = 512;
  int n_transverse = 20;
  int n_s3 = 128;
  int fft_length = 4096;
};

/// Everything shared by the experiment runners.
struct ExperimentSettings {
  MassShellState state = reference_state();
  KernelSpec spec{};
  FluxOptions flux{};
  ChiSettings chi{};
  std::uint64_t seed = 0;
};

/// [state], [kernel], [flux] and [chi] sections; absent keys keep the defaults.
ExperimentSettings settings_from_config(const Config& config, std::uint64_t seed = 0);

/// Parses "all", "box:lo1,lo2,lo3,hi1,hi2,hi3", "strip:axis,a,b",
/// "below:axis,bound" and "above:axis,bound" (axis in 1..3).
Projection parse_projection(const std::string& text);
/// ';'-separated list of projections.
std::vector<Projection> parse_projection_list(const std::string& text);
/// "time_slice:t", "plane:v1,v2,v3,t0", "light:e1,e2,e3,tau0", "chi" or
/// "aet:alpha,beta".
AchronalSurface parse_surface(const std::string& text);

struct NormalizationParams {
  double rho = 1.0;
  double tolerance_spacelike = 1e-3;
  double tolerance_lightlike = 1e-2;
  double tolerance_boosted = 1e-2;
};
/// flux(All) on {x0 = 0}, chi and the plane of slope tanh(rho) along x3.
ExperimentReport run_normalization(const ExperimentSettings& s, const NormalizationParams& p = {});

struct BoostLimitParams {
  double alpha = 1.0;
  double beta = 1.0;
  std::vector<double> rho{0, 1, 2, 3, 4, 5, 6};
  double gap_tolerance = 1e-2;
};
/// P(rho) over l_rho(Gamma), Gamma = {x0 = 0, -alpha <= x3 <= beta}, plus the
/// chi limit.
ExperimentReport run_boost_limit(const ExperimentSettings& s, const BoostLimitParams& p = {});

struct MctcParams {
  std::vector<double> alpha{0.0, 0.7};
  double tolerance = 1e-2;
  double complement_tolerance = 2e-2;
};
/// chi half-plane {x0 = x3 >= alpha} against {x0 = alpha, x3 >= alpha}.
ExperimentReport run_mctc_c(const ExperimentSettings& s, const MctcParams& p = {});

struct AetParams {
  double alpha = -1.0;
  double beta = 1.0;
  double tolerance = 1e-2;
};
ExperimentReport run_aet(const ExperimentSettings& s, const AetParams& p = {});

struct ContractionParams {
  double delta = 0.25;
  Vec3 direction = Vec3::UnitZ();
  std::vector<double> rho{0, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6};
  double threshold = 0.9;
  double oracle_slack = 1e-2;
  double comoving_tolerance = 1e-3;
};
/// P(rho) = <W(A_{rho e}) phi, T({x0 = 0, |x.e| <= delta}) W(A_{rho e}) phi>,
/// the comoving column and the rho = inf oracle.
ExperimentReport run_contraction(const ExperimentSettings& s, const ContractionParams& p = {});

/// run_contraction for the plane {x0 = origin.x0} and strips centred at the
/// origin, reduced to the rest frame by a translation.
ExperimentReport run_corollary_frame(const ExperimentSettings& s, const FourVector& origin,
                                     const ContractionParams& p = {});

struct CurrentEvalParams {
  int n = 16;
  std::vector<FourVector> events;
  /// lattice_n^3 events in [-w, w]^4 appended to `events`: a spatial lattice
  /// whose time coordinate runs through the same levels, skewed per node.
  int lattice_n = 10;
  double lattice_half_width = 2.0;
  double h = 1e-3;
  double divergence_tolerance = 1e-6;
};
ExperimentReport run_current_eval(const ExperimentSettings& s, const CurrentEvalParams& p = {});

struct FluxRunParams {
  AchronalSurface surface = FlatPlane::time_slice(0.0);
  std::string surface_text = "time_slice:0";
  std::vector<Projection> regions{Projection::all()};
};
ExperimentReport run_flux(const ExperimentSettings& s, const FluxRunParams& p);

struct ChiCompareParams {
  std::vector<Projection> regions;
  double tolerance = 1e-2;
};
/// Probabilities on chi by the closed-form route and by the Fourier route.
ExperimentReport run_chi_compare(const ExperimentSettings& s, const ChiCompareParams& p);

/// achronal <subcommand> --config FILE [--seed N] [--csv F] [--json F] [--svg F].
/// Returns 0 when all verdicts pass, 2 on a failed verdict, 1 on usage or
/// configuration errors.
int cli_main(int argc, const char* const* argv);
/// Same, with the arguments after the program name.
int cli_main(const std::vector<std::string>& args);

}  // namespace achronal
