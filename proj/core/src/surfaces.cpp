#include "achronal/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace achronal {

namespace {

std::string bound_text(double lo, double hi) {
  std::ostringstream s;
  s << "[" << lo << "," << hi << "]";
  return s.str();
}

bool boost_along_x3(const Mat4& l) {
  Mat4 pattern = l;
  pattern(0, 0) = pattern(3, 3) = 1.0;
  pattern(0, 3) = pattern(3, 0) = 0.0;
  return pattern.isIdentity(1e-12);
}

}  // namespace

FlatPlane FlatPlane::spacelike(const Vec3& slope, double offset) {
  if (!(slope.norm() < 1.0)) throw std::invalid_argument("spacelike plane needs |v| < 1");
  return {slope, offset};
}

FlatPlane FlatPlane::light(const Vec3& e, double tau0) {
  if (std::abs(e.norm() - 1.0) > 1e-9) throw std::invalid_argument("light plane needs a unit direction");
  return {e.normalized(), tau0};
}

Projection Projection::box(const Vec3& lo, const Vec3& hi) {
  Projection p;
  p.lo = lo;
  p.hi = hi;
  return p;
}

Projection Projection::strip(int axis, double a, double b) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("strip axis must be 0, 1 or 2");
  Projection p;
  p.lo[axis] = a;
  p.hi[axis] = b;
  return p;
}

Projection Projection::halfspace(int axis, double bound, bool below) {
  return below ? strip(axis, -kInf, bound) : strip(axis, bound, kInf);
}

bool Projection::empty() const { return dilation <= 0.0 && (lo.array() > hi.array()).any(); }

bool Projection::bounded() const { return lo.allFinite() && hi.allFinite(); }

bool Projection::is_all() const {
  return (lo.array() == -kInf).all() && (hi.array() == kInf).all();
}

bool Projection::transverse_invariant(int axis) const {
  for (int d = 0; d < 3; ++d) {
    if (d == axis) continue;
    if (lo[d] != -kInf || hi[d] != kInf) return false;
  }
  return true;
}

int Projection::strip_axis() const {
  int found = -1;
  for (int d = 0; d < 3; ++d) {
    if (lo[d] != -kInf || hi[d] != kInf) {
      if (found >= 0) return -1;
      found = d;
    }
  }
  return found;
}

bool Projection::contains(const Vec3& x) const {
  if (dilation <= 0.0) return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  const Vec3 nearest = x.cwiseMax(lo).cwiseMin(hi);
  return (x - nearest).norm() <= dilation;
}

std::string Projection::describe() const {
  std::string s = "x1" + bound_text(lo[0], hi[0]) + " x2" + bound_text(lo[1], hi[1]) + " x3" +
                  bound_text(lo[2], hi[2]);
  if (dilation > 0.0) s += " +ball(" + std::to_string(dilation) + ")";
  return s;
}

double PiecewiseFlat::tau(const Vec3& x) const {
  for (const Piece& p : pieces) {
    if (p.cell.contains(x)) return p.plane.tau(x);
  }
  throw std::domain_error("PiecewiseFlat: point outside every cell");
}

double surface_tau(const AchronalSurface& s, const Vec3& x) {
  return std::visit([&](const auto& surf) { return surf.tau(x); }, s);
}

double lipschitz_estimate(const AchronalSurface& s, int pairs, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  double worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const Vec3 x(u(rng), u(rng), u(rng));
    const Vec3 y(u(rng), u(rng), u(rng));
    const double d = (x - y).norm();
    if (d == 0.0) continue;
    worst = std::max(worst, std::abs(surface_tau(s, x) - surface_tau(s, y)) / d);
  }
  return worst;
}

FourVector l_rho(double rho, const Vec3& x) {
  if (rho < 0.0) throw std::invalid_argument("l_rho: rho must be >= 0");
  if (std::isinf(rho)) return l_infty(x);
  const double q = std::exp(-2.0 * rho);
  return {0.5 * (1.0 - q) * x[2], x[0], x[1], 0.5 * (1.0 + q) * x[2]};
}

FourVector l_infty(const Vec3& x) { return {0.5 * x[2], x[0], x[1], 0.5 * x[2]}; }

StripImage boost_strip_image(double rho, double alpha, double beta) {
  if (rho < 0.0) throw std::invalid_argument("boost_strip_image: rho must be >= 0");
  if (std::isinf(rho)) {
    Region r{FlatPlane::chi(), Projection::strip(2, -0.5 * alpha, 0.5 * beta)};
    return {r, r};
  }
  const double scale = std::exp(-rho);
  const double image_scale = 0.5 * (1.0 + std::exp(-2.0 * rho));
  Region image{FlatPlane::spacelike(Vec3(0.0, 0.0, std::tanh(rho)), 0.0),
               Projection::strip(2, -alpha * image_scale, beta * image_scale)};
  Region pre{FlatPlane::time_slice(0.0), Projection::strip(2, -alpha * scale, beta * scale)};
  return {image, pre};
}

Region region_of_influence(const Region& delta, double beta) {
  const auto* plane = std::get_if<FlatPlane>(&delta.surface);
  if (plane == nullptr || plane->v.norm() != 0.0) {
    throw std::invalid_argument("region_of_influence: only constant-time planes are supported");
  }
  const double r = beta - plane->t0;
  if (r < 0.0) throw std::invalid_argument("region_of_influence: sigma must not precede Delta");
  Region out{FlatPlane::time_slice(beta), delta.projection};
  Projection& p = out.projection;
  if (p.dilation == 0.0 && (p.strip_axis() >= 0 || p.is_all())) {
    p.lo.array() -= r;
    p.hi.array() += r;
  } else {
    p.dilation += r;
  }
  return out;
}

PiecewiseFlat aet_surface(double alpha, double beta) {
  if (!(alpha < beta)) throw std::invalid_argument("aet_surface: need alpha < beta");
  PiecewiseFlat s;
  s.pieces.push_back({"Delta", FlatPlane::time_slice(alpha), Projection::halfspace(2, alpha, true)});
  s.pieces.push_back({"X", FlatPlane::chi(), Projection::strip(2, alpha, beta)});
  s.pieces.push_back({"Gamma", FlatPlane::time_slice(beta), Projection::halfspace(2, beta, false)});
  return s;
}

Region transform_region(const PoincareElement& g, const Region& region) {
  const auto* plane = std::get_if<FlatPlane>(&region.surface);
  if (plane == nullptr) throw std::invalid_argument("transform_region: flat regions only");
  const Mat4 l = covering_map(g.spinor);
  if (!boost_along_x3(l)) throw std::invalid_argument("transform_region: only boosts along x3 are supported");
  FlatPlane out = *plane;
  Projection proj = region.projection;
  if (!l.isIdentity(1e-15)) {
    if (plane->v[0] != 0.0 || plane->v[1] != 0.0) {
      throw std::invalid_argument("transform_region: plane slope must be parallel to x3");
    }
    if (proj.dilation != 0.0) throw std::invalid_argument("transform_region: dilated projections unsupported");
    const double c = l(0, 0);
    const double s = l(0, 3);
    const double v3 = plane->v[2];
    const double k = s * v3 + c;
    const double v3n = (c * v3 + s) / k;
    out.v = Vec3(0.0, 0.0, v3n);
    out.t0 = c * plane->t0 - v3n * s * plane->t0;
    proj.lo[2] = s * plane->t0 + k * proj.lo[2];
    proj.hi[2] = s * plane->t0 + k * proj.hi[2];
  }
  const FourVector& a = g.translation;
  out.t0 += a.x0 - out.v.dot(a.spatial());
  proj.lo += a.spatial();
  proj.hi += a.spatial();
  return {out, proj};
}

AffineMap3 projected_action(const PoincareElement& g, const FlatPlane& plane) {
  const Mat4 l = covering_map(g.spinor);
  AffineMap3 s;
  s.m = l.block<3, 3>(1, 1) + l.block<3, 1>(1, 0) * plane.v.transpose();
  s.b = l.block<3, 1>(1, 0) * plane.t0 + g.translation.spatial();
  return s;
}

}  // namespace achronal
