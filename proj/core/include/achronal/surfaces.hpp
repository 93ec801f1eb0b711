#pragma once

#include "achronal/minkowski.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace achronal {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// The flat surface x0 = t0 + v.x. Spacelike for |v| < 1, lightlike
/// ({x.(1,e) = t0}) for |v| = 1.
struct FlatPlane {
  Vec3 v = Vec3::Zero();
  double t0 = 0.0;

  static FlatPlane spacelike(const Vec3& slope, double offset);
  static FlatPlane light(const Vec3& e, double tau0);
  /// {x0 = t}
  static FlatPlane time_slice(double t) { return spacelike(Vec3::Zero(), t); }
  /// {x0 = x3}
  static FlatPlane chi() { return light(Vec3::UnitZ(), 0.0); }

  bool lightlike() const { return std::abs(v.norm() - 1.0) <= 1e-12; }
  double tau(const Vec3& x) const { return t0 + v.dot(x); }
};

/// x0 = tau(x) with |grad tau| <= 1.
struct GraphSurface {
  std::function<double(const Vec3&)> tau;
  std::function<Vec3(const Vec3&)> grad;
};

/// Axis-aligned set lo <= x <= hi (bounds may be infinite), optionally
/// dilated by a Euclidean ball of radius `dilation`.
struct Projection {
  Vec3 lo = Vec3::Constant(-kInf);
  Vec3 hi = Vec3::Constant(kInf);
  double dilation = 0.0;

  static Projection all() { return {}; }
  static Projection box(const Vec3& lo, const Vec3& hi);
  /// a <= x_axis <= b, unbounded transversally
  static Projection strip(int axis, double a, double b);
  /// x_axis <= bound (below = true) or x_axis >= bound
  static Projection halfspace(int axis, double bound, bool below);

  bool empty() const;
  bool bounded() const;
  bool is_all() const;
  /// Finite along at most `axis`, unbounded on the two others.
  bool transverse_invariant(int axis) const;
  /// The only axis with a finite bound, or -1 (none or several).
  int strip_axis() const;
  bool contains(const Vec3& x) const;
  std::string describe() const;
};

struct PiecewiseFlat {
  struct Piece {
    std::string name;
    FlatPlane plane;
    Projection cell;
  };
  std::vector<Piece> pieces;

  double tau(const Vec3& x) const;
};

using AchronalSurface = std::variant<FlatPlane, GraphSurface, PiecewiseFlat>;

double surface_tau(const AchronalSurface& s, const Vec3& x);

struct Region {
  AchronalSurface surface;
  Projection projection;
};

/// Largest |tau(x) - tau(y)| / |x - y| over random pairs in [-scale, scale]^3.
double lipschitz_estimate(const AchronalSurface& s, int pairs, double scale, std::uint64_t seed);

/// (1/2(1 - e^{-2 rho}) x3, x1, x2, 1/2(1 + e^{-2 rho}) x3)
FourVector l_rho(double rho, const Vec3& x);
/// (x3/2, x1, x2, x3/2)
FourVector l_infty(const Vec3& x);

struct StripImage {
  /// l_rho(Gamma): on the plane of slope tanh(rho) (chi for rho = inf).
  Region image;
  /// The strip on {x0 = 0} whose A_rho image is l_rho(Gamma); equals
  /// `image` for rho = inf.
  Region preimage;
};

/// Gamma = {x0 = 0, -alpha <= x3 <= beta}; rho may be +inf.
StripImage boost_strip_image(double rho, double alpha, double beta);

/// Delta_sigma for Delta on {x0 = alpha}, sigma = {x0 = beta}, beta >= alpha.
Region region_of_influence(const Region& delta, double beta);

/// Delta = {x0 = alpha, x3 <= alpha}, X = {x in chi: alpha < x3 <= beta},
/// Gamma = {x0 = beta, x3 > beta}.
PiecewiseFlat aet_surface(double alpha, double beta);

/// g.Delta for a flat region, g a translation composed with a boost along x3
/// (the plane slope must be parallel to x3 when a boost is present).
Region transform_region(const PoincareElement& g, const Region& region);

/// Affine S(x) = M x + b with S(x) = spatial(g.(tau(x), x)) on a flat plane.
struct AffineMap3 {
  Eigen::Matrix3d m;
  Vec3 b;
  Vec3 operator()(const Vec3& x) const { return m * x + b; }
};
AffineMap3 projected_action(const PoincareElement& g, const FlatPlane& plane);

}  // namespace achronal
