#include "achronal/flux.hpp"

#include "achronal/current.hpp"
#include "achronal/parallel.hpp"
#include "achronal/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace achronal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sinc(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

/// e^{i w c} (b - a)/(2 pi) sinc(w (b - a)/2) = (2pi)^-1 int_a^b e^{i w x} dx
Complex z1(double w, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  return std::polar((b - a) / kTwoPi * sinc(w * h), w * c);
}

struct Packed {
  std::vector<Complex> c;
  std::vector<double> n;  // eps - v.p
  std::vector<double> e;
  std::vector<Vec3> p;
  std::vector<Vec3> theta;  // p - v eps
};

/// Hermitian form sum_{k,l} conj(c_k) c_l (n_k + n_l)/2 g(k.l) s(k, l) with a
/// real symmetric s, s(k, k) = diag. Diagonal plus twice the upper triangle.
template <class PairWeight>
double hermitian_form(const Packed& q, const KernelSpec& spec, double diag, PairWeight&& s) {
  const std::size_t n = q.c.size();
  if (n == 0) return 0.0;
  std::vector<double> rows(n, 0.0);
  parallel_for(n, [&](std::size_t k) {
    double acc = std::norm(q.c[k]) * q.n[k] * diag;
    double off = 0.0;
    for (std::size_t l = k + 1; l < n; ++l) {
      const double re = q.c[k].real() * q.c[l].real() + q.c[k].imag() * q.c[l].imag();
      const double t = q.e[k] * q.e[l] - q.p[k].dot(q.p[l]);
      off += re * 0.5 * (q.n[k] + q.n[l]) * spec(t) * s(k, l);
    }
    rows[k] = acc + 2.0 * off;
  });
  return tree_sum(rows);
}

void require_flat_strip(const FlatPlane& plane, int axis) {
  for (int d = 0; d < 3; ++d) {
    if (d != axis && plane.v[d] != 0.0) {
      throw std::invalid_argument("strip route: plane slope must be parallel to the strip axis");
    }
  }
}

MomentumBox grid_box(const MassShellState& phi) { return phi.support_box(); }

double finite_max_abs(double a, double b) {
  double x = 0.0;
  if (std::isfinite(a)) x = std::max(x, std::abs(a));
  if (std::isfinite(b)) x = std::max(x, std::abs(b));
  return x;
}

}  // namespace

std::string to_string(FluxRoute r) {
  switch (r) {
    case FluxRoute::closed_form_6d: return "closed_form_6d";
    case FluxRoute::strip_reduced_4d: return "strip_reduced_4d";
    case FluxRoute::generic_x_quadrature: return "generic_x_quadrature";
    case FluxRoute::brute_force: return "brute_force";
    case FluxRoute::chi_fourier: return "chi_fourier";
  }
  return "unknown";
}

Complex region_factor(const Projection& box, const Vec3& k, const Vec3& p, const FlatPlane& plane, double mass) {
  if (!box.bounded() || box.dilation != 0.0) throw std::invalid_argument("region_factor: bounded boxes only");
  if (box.empty()) return {0.0, 0.0};
  const double ek = energy(k, mass);
  const double ep = energy(p, mass);
  const Vec3 w = (p - plane.v * ep) - (k - plane.v * ek);
  Complex z = std::polar(1.0, (ek - ep) * plane.t0);
  for (int d = 0; d < 3; ++d) z *= z1(w[d], box.lo[d], box.hi[d]);
  return z;
}

double flux_box_value(const MassShellState& phi, const FlatPlane& plane, const Projection& box,
                      const QuadratureGrid& grid, const KernelSpec& spec) {
  if (!box.bounded() || box.dilation != 0.0) throw std::invalid_argument("flux_box_value: bounded boxes only");
  if (box.empty()) return 0.0;
  const Vec3 centre = 0.5 * (box.lo + box.hi);
  const Vec3 half = 0.5 * (box.hi - box.lo);
  double volume = 1.0;
  for (int d = 0; d < 3; ++d) volume *= (box.hi[d] - box.lo[d]) / kTwoPi;
  if (volume == 0.0) return 0.0;
  Packed q;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex f = phi.amplitude(grid.nodes[i]);
    if (f == Complex{0.0, 0.0}) continue;
    const auto ii = static_cast<Eigen::Index>(i);
    const double e = grid.energies[ii];
    const Vec3& p = grid.nodes[i];
    const Vec3 theta = p - plane.v * e;
    q.c.push_back(grid.weights[ii] * f * std::polar(1.0, -e * plane.t0 + theta.dot(centre)));
    q.n.push_back(e - plane.v.dot(p));
    q.e.push_back(e);
    q.p.push_back(p);
    q.theta.push_back(theta);
  }
  return volume * hermitian_form(q, spec, 1.0, [&](std::size_t k, std::size_t l) {
           const Vec3 w = q.theta[l] - q.theta[k];
           return sinc(w[0] * half[0]) * sinc(w[1] * half[1]) * sinc(w[2] * half[2]);
         });
}

double flux_strip_value(const MassShellState& phi, const FlatPlane& plane, int axis, double a, double b,
                        const QuadratureGrid& grid, const KernelSpec& spec) {
  require_flat_strip(plane, axis);
  if (grid.fiber_axis != axis) throw std::invalid_argument("flux_strip_value: grid fibers must run along the strip axis");
  if (std::isinf(a) && std::isinf(b) && a < 0.0 && b > 0.0) return norm_squared(phi, grid);
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("flux_strip_value: interval must be finite or all of R");
  if (!(b > a)) return 0.0;
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double length = (b - a) / kTwoPi;
  const double va = plane.v[axis];
  std::vector<double> fibers(grid.fibers.size(), 0.0);
  for (std::size_t f = 0; f < grid.fibers.size(); ++f) {
    const Fiber& fib = grid.fibers[f];
    Packed q;
    std::vector<double> th;
    for (std::size_t j = 0; j < fib.count; ++j) {
      const std::size_t i = fib.begin + j;
      const Complex amp = phi.amplitude(grid.nodes[i]);
      if (amp == Complex{0.0, 0.0}) continue;
      const double e = grid.energies[static_cast<Eigen::Index>(i)];
      const Vec3& p = grid.nodes[i];
      const double theta = p[axis] - va * e;
      q.c.push_back(fib.line_weights[j] * amp * std::polar(1.0, -e * plane.t0 + theta * centre));
      q.n.push_back(e - va * p[axis]);
      q.e.push_back(e);
      q.p.push_back(p);
      th.push_back(theta);
    }
    fibers[f] = fib.transverse_weight * length *
                hermitian_form(q, spec, 1.0, [&](std::size_t k, std::size_t l) { return sinc((th[l] - th[k]) * half); });
  }
  return tree_sum(fibers);
}

int strip_axis_nodes(const FlatPlane& plane, int axis, const MomentumBox& box, double mass, double x_max,
                     const FluxOptions& opts) {
  double lo = kInf;
  double hi = -kInf;
  constexpr int s = 10;
  for (int i = 0; i <= s; ++i) {
    for (int j = 0; j <= s; ++j) {
      for (int k = 0; k <= s; ++k) {
        const Vec3 p(box.lo[0] + (box.hi[0] - box.lo[0]) * i / s, box.lo[1] + (box.hi[1] - box.lo[1]) * j / s,
                     box.lo[2] + (box.hi[2] - box.lo[2]) * k / s);
        const double e = std::sqrt(mass * mass + p.squaredNorm());
        const double theta = p[axis] - plane.v[axis] * e;
        lo = std::min(lo, theta);
        hi = std::max(hi, theta);
      }
    }
  }
  const int need = static_cast<int>(std::ceil(opts.alias_factor * (hi - lo) * x_max));
  return std::clamp(need, opts.n_strip_axis, std::max(opts.n_strip_axis, opts.n_axis_cap));
}

FluxResult flux_strip(const MassShellState& phi, const Region& region, const KernelSpec& spec, const FluxOptions& opts) {
  const auto* plane = std::get_if<FlatPlane>(&region.surface);
  if (plane == nullptr) throw std::invalid_argument("flux_strip: flat surfaces only");
  const Projection& proj = region.projection;
  if (proj.dilation != 0.0) throw std::invalid_argument("flux_strip: dilated projections unsupported");
  const int axis = proj.strip_axis();
  if (axis < 0) throw std::invalid_argument("flux_strip: region is not transverse-invariant");
  const double a = proj.lo[axis];
  const double b = proj.hi[axis];
  if (!std::isfinite(a) || !std::isfinite(b)) return flux_halfspace(phi, region, spec, opts);
  require_flat_strip(*plane, axis);

  FluxResult r;
  r.route = FluxRoute::strip_reduced_4d;
  if (!(b > a)) {
    r.error_estimate = 0.0;
    return r;
  }
  const MomentumBox box = grid_box(phi);
  const double x_max = finite_max_abs(a, b) + std::abs(plane->t0);
  r.n_transverse = opts.n_strip_transverse;
  r.n_axis = strip_axis_nodes(*plane, axis, box, phi.mass(), x_max, opts);
  const QuadratureGrid grid = make_box_grid(phi.mass(), box, r.n_transverse, r.n_axis, axis);
  r.value = flux_strip_value(phi, *plane, axis, a, b, grid, spec);
  if (opts.estimate_error) {
    const QuadratureGrid coarse = make_box_grid(phi.mass(), box, std::max(2, r.n_transverse / 2), r.n_axis, axis);
    r.error_estimate = std::abs(r.value - flux_strip_value(phi, *plane, axis, a, b, coarse, spec));
  }
  return r;
}

FluxResult flux_halfspace(const MassShellState& phi, const Region& region, const KernelSpec& spec,
                          const FluxOptions& opts) {
  const auto* plane = std::get_if<FlatPlane>(&region.surface);
  if (plane == nullptr) throw std::invalid_argument("flux_halfspace: flat surfaces only");
  const Projection& proj = region.projection;
  if (proj.dilation != 0.0) throw std::invalid_argument("flux_halfspace: dilated projections unsupported");
  int axis = proj.strip_axis();
  if (axis < 0 && proj.is_all()) {
    axis = 2;
    for (int d = 0; d < 3; ++d) {
      if (plane->v[d] != 0.0) axis = d;
    }
  }
  if (axis < 0) throw std::invalid_argument("flux_halfspace: region is not transverse-invariant");
  require_flat_strip(*plane, axis);
  const double a = proj.lo[axis];
  const double b = proj.hi[axis];

  FluxResult r;
  r.route = FluxRoute::strip_reduced_4d;
  r.n_transverse = opts.n_strip_transverse;
  const MomentumBox box = grid_box(phi);
  r.converged = false;
  for (double L = opts.window_start; L <= opts.window_max * (1.0 + 1e-12); L *= 2.0) {
    const double x_max = L + std::abs(plane->t0);
    const int n_axis = strip_axis_nodes(*plane, axis, box, phi.mass(), x_max, opts);
    const QuadratureGrid grid = make_box_grid(phi.mass(), box, r.n_transverse, n_axis, axis);
    const double lo = std::max(a, -L);
    const double hi = std::min(b, L);
    const double full = flux_strip_value(phi, *plane, axis, -L, L, grid, spec);
    const double norm = norm_squared(phi, grid);
    r.value = (lo == -L && hi == L) ? full : flux_strip_value(phi, *plane, axis, lo, hi, grid, spec);
    r.tail = std::abs(norm - full);
    r.window = L;
    r.n_axis = n_axis;
    if (r.tail < opts.tail_tolerance) {
      r.converged = true;
      if (opts.estimate_error) {
        const QuadratureGrid coarse = make_box_grid(phi.mass(), box, std::max(2, r.n_transverse / 2), n_axis, axis);
        const double coarse_value = (lo == -L && hi == L) ? flux_strip_value(phi, *plane, axis, -L, L, coarse, spec)
                                                          : flux_strip_value(phi, *plane, axis, lo, hi, coarse, spec);
        r.error_estimate = std::abs(r.value - coarse_value);
      }
      break;
    }
  }
  r.error_estimate += r.tail;
  return r;
}

Projection intersect(const Projection& a, const Projection& b) {
  if (a.dilation != 0.0 || b.dilation != 0.0) throw std::invalid_argument("intersect: dilated projections unsupported");
  Projection out;
  out.lo = a.lo.cwiseMax(b.lo);
  out.hi = a.hi.cwiseMin(b.hi);
  return out;
}

std::vector<FluxResult> flux_piecewise(const MassShellState& phi, const PiecewiseFlat& surface, const KernelSpec& spec,
                                       const FluxOptions& opts, const Projection& projection) {
  std::vector<FluxResult> out;
  out.reserve(surface.pieces.size());
  for (const PiecewiseFlat::Piece& piece : surface.pieces) {
    out.push_back(flux(phi, Region{piece.plane, intersect(piece.cell, projection)}, spec, opts));
  }
  return out;
}

FluxResult flux_bruteforce(const MassShellState& phi, const Region& region, const QuadratureGrid& grid,
                           const KernelSpec& spec, const Eigen::Vector3i& n_x) {
  FluxResult r;
  r.route = std::holds_alternative<GraphSurface>(region.surface) ? FluxRoute::generic_x_quadrature
                                                                 : FluxRoute::brute_force;
  const Projection& proj = region.projection;
  if (proj.empty()) return r;
  if (!proj.bounded()) throw std::invalid_argument("flux_bruteforce: projection must be bounded");
  const Vec3 lo = proj.lo.array() - proj.dilation;
  const Vec3 hi = proj.hi.array() + proj.dilation;
  const Rule1d r1 = gauss_legendre(n_x[0], lo[0], hi[0]);
  const Rule1d r2 = gauss_legendre(n_x[1], lo[1], hi[1]);
  const Rule1d r3 = gauss_legendre(n_x[2], lo[2], hi[2]);

  std::vector<FourVector> events;
  std::vector<Vec3> normals;
  std::vector<double> weights;
  for (int i = 0; i < n_x[0]; ++i) {
    for (int j = 0; j < n_x[1]; ++j) {
      for (int k = 0; k < n_x[2]; ++k) {
        const Vec3 x(r1.nodes[i], r2.nodes[j], r3.nodes[k]);
        if (proj.dilation != 0.0 && !proj.contains(x)) continue;
        Vec3 grad;
        double t = 0.0;
        if (const auto* fp = std::get_if<FlatPlane>(&region.surface)) {
          t = fp->tau(x);
          grad = fp->v;
        } else if (const auto* gs = std::get_if<GraphSurface>(&region.surface)) {
          t = gs->tau(x);
          grad = gs->grad(x);
        } else {
          const auto& pw = std::get<PiecewiseFlat>(region.surface);
          const auto it = std::find_if(pw.pieces.begin(), pw.pieces.end(),
                                       [&](const PiecewiseFlat::Piece& p) { return p.cell.contains(x); });
          if (it == pw.pieces.end()) continue;
          t = it->plane.tau(x);
          grad = it->plane.v;
        }
        events.emplace_back(t, x);
        normals.push_back(grad);
        weights.push_back(r1.weights[i] * r2.weights[j] * r3.weights[k]);
      }
    }
  }
  const CurrentEvaluator eval(phi, grid, spec);
  const std::vector<CurrentValue> values = eval.evaluate(events);
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    terms[i] = weights[i] * (values[i].J0 - normals[i].dot(values[i].J));
  }
  r.value = tree_sum(terms);
  r.n_axis = n_x[2];
  r.n_transverse = n_x[0];
  return r;
}

FluxResult flux(const MassShellState& phi, const Region& region, const KernelSpec& spec, const FluxOptions& opts) {
  const Projection& proj = region.projection;
  if (proj.empty()) return {};
  if (const auto* pw = std::get_if<PiecewiseFlat>(&region.surface)) {
    FluxResult total;
    const std::vector<FluxResult> parts = flux_piecewise(phi, *pw, spec, opts, proj);
    for (const FluxResult& part : parts) {
      total.value += part.value;
      total.error_estimate += part.error_estimate;
      total.tail += part.tail;
      total.converged = total.converged && part.converged;
      total.route = part.route;
    }
    return total;
  }
  if (std::holds_alternative<GraphSurface>(region.surface)) {
    if (!proj.bounded()) throw std::invalid_argument("flux: graph surfaces need a bounded projection");
    const QuadratureGrid grid = make_box_grid(phi.mass(), phi.support_box(), 16, 16);
    return flux_bruteforce(phi, region, grid, spec, Eigen::Vector3i(16, 16, 16));
  }
  const auto& plane = std::get<FlatPlane>(region.surface);
  if (proj.dilation != 0.0) {
    throw std::invalid_argument("flux: dilated projections have no closed form; use flux_bruteforce");
  }
  if (proj.bounded()) {
    FluxResult r;
    r.route = FluxRoute::closed_form_6d;
    r.n_transverse = r.n_axis = opts.n_6d;
    const MomentumBox box = grid_box(phi);
    r.value = flux_box_value(phi, plane, proj, make_box_grid(phi.mass(), box, opts.n_6d, opts.n_6d), spec);
    if (opts.estimate_error) {
      const int coarse = std::max(2, opts.n_6d / 2);
      r.error_estimate =
          std::abs(r.value - flux_box_value(phi, plane, proj, make_box_grid(phi.mass(), box, coarse, coarse), spec));
    }
    return r;
  }
  const int axis = proj.strip_axis();
  if (axis >= 0 && std::isfinite(proj.lo[axis]) && std::isfinite(proj.hi[axis])) {
    return flux_strip(phi, region, spec, opts);
  }
  if (axis >= 0 || proj.is_all()) return flux_halfspace(phi, region, spec, opts);
  throw std::invalid_argument("flux: unsupported region " + proj.describe());
}

}  // namespace achronal
