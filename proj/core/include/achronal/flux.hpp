#pragma once

#include "achronal/kernels.hpp"
#include "achronal/states.hpp"
#include "achronal/surfaces.hpp"

#include <string>
#include <vector>

namespace achronal {

enum class FluxRoute { closed_form_6d, strip_reduced_4d, generic_x_quadrature, brute_force, chi_fourier };

std::string to_string(FluxRoute r);

struct FluxResult {
  double value = 0.0;
  /// |value(n) - value(coarser)| plus any certified truncation tail
  double error_estimate = 0.0;
  FluxRoute route = FluxRoute::closed_form_6d;
  int n_transverse = 0;
  int n_axis = 0;
  /// Half-width L of the truncation window, 0 when none was needed.
  double window = 0.0;
  /// Certified mass outside the window.
  double tail = 0.0;
  bool converged = true;
};

struct FluxOptions {
  /// Nodes per axis for the 6D route.
  int n_6d = 20;
  /// Transverse and minimum longitudinal nodes for the strip route.
  int n_strip_transverse = 20;
  int n_strip_axis = 48;
  int n_axis_cap = 512;
  /// Window doubling for unbounded intervals.
  double window_start = 4.0;
  double window_max = 64.0;
  double tail_tolerance = 1e-3;
  /// Longitudinal nodes per unit of (phase range * max|x|).
  double alias_factor = 0.8;
  bool estimate_error = true;
};

/// (2pi)^-3 int_B exp(i (k - p).(tau(x), x)) d^3x for a bounded box B on a
/// flat plane, as a product of per-axis closed forms.
Complex region_factor(const Projection& box, const Vec3& k, const Vec3& p, const FlatPlane& plane, double mass);

/// 6D pairwise sum with the closed-form region factor on an explicit grid.
double flux_box_value(const MassShellState& phi, const FlatPlane& plane, const Projection& box,
                      const QuadratureGrid& grid, const KernelSpec& spec);

/// Transverse-delta reduction for a ≤ x_axis ≤ b on a plane whose slope is
/// parallel to `axis`. The grid must carry fibers along `axis`. With
/// a = -inf and b = +inf the delta in the longitudinal variable is taken
/// exactly and the grid norm is returned.
double flux_strip_value(const MassShellState& phi, const FlatPlane& plane, int axis, double a, double b,
                        const QuadratureGrid& grid, const KernelSpec& spec);

/// Nodes along the fiber axis needed to resolve |x| <= x_max for the phase
/// variable p_axis - v_axis eps(p) over the momentum box.
int strip_axis_nodes(const FlatPlane& plane, int axis, const MomentumBox& box, double mass, double x_max,
                     const FluxOptions& opts);

/// Strip region, unbounded transversally, finite interval.
FluxResult flux_strip(const MassShellState& phi, const Region& region, const KernelSpec& spec,
                      const FluxOptions& opts = {});

/// Half-space or All (transverse-invariant with an infinite end): window
/// doubling with a certified tail.
FluxResult flux_halfspace(const MassShellState& phi, const Region& region, const KernelSpec& spec,
                          const FluxOptions& opts = {});

/// One result per piece of the surface, intersected with `projection`.
std::vector<FluxResult> flux_piecewise(const MassShellState& phi, const PiecewiseFlat& surface,
                                       const KernelSpec& spec, const FluxOptions& opts = {},
                                       const Projection& projection = Projection::all());

/// Direct quadrature of J0 - grad(tau).J over the projection with n_x
/// Gauss-Legendre nodes per axis (dilated projections by indicator). The
/// projection must be bounded.
FluxResult flux_bruteforce(const MassShellState& phi, const Region& region, const QuadratureGrid& grid,
                           const KernelSpec& spec, const Eigen::Vector3i& n_x);

/// Dispatches to the route matching the region.
FluxResult flux(const MassShellState& phi, const Region& region, const KernelSpec& spec,
                const FluxOptions& opts = {});

/// Intersection of two axis-aligned projections (neither dilated).
Projection intersect(const Projection& a, const Projection& b);

}  // namespace achronal
