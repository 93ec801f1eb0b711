#include "achronal/states.hpp"

#include "achronal/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace achronal {

namespace {

// ln(1e16): a Gaussian exp(-r^2/2s^2) is below 1e-16 beyond s*sqrt(2*ln 1e16).
constexpr double kGaussianCutoffSigmas = 8.5834;

void require_same_mass(double a, double b) {
  if (std::abs(a - b) > 1e-14 * std::max(1.0, std::abs(a))) {
    throw std::invalid_argument("mass mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

double StateProfile::operator()(const Vec3& p) const {
  const double r2 = (p - center).squaredNorm();
  if (kind == ProfileKind::bump) {
    const double u2 = r2 / (width * width);
    if (u2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u2));
  }
  if (r2 > cutoff * cutoff) return 0.0;
  return std::exp(-0.5 * r2 / (width * width));
}

MassShellState::MassShellState(double mass, double p_max, StateProfile profile)
    : mass_(mass), p_max_(p_max), profile_(profile) {
  if (!(mass > 0.0)) throw std::invalid_argument("state mass must be positive");
  if (!(profile.width > 0.0)) throw std::invalid_argument("state width must be positive");
  if (profile.center.norm() + profile.cutoff > p_max * (1.0 + 1e-12)) {
    throw std::invalid_argument("state support |p0| + width exceeds P_max");
  }
}

Complex MassShellState::amplitude(const Vec3& p) const {
  const double e = std::sqrt(mass_ * mass_ + p.squaredNorm());
  Vec3 q = p;
  if (lorentz_) {
    q = inverse_lambda_.block<3, 1>(1, 0) * e + inverse_lambda_.block<3, 3>(1, 1) * p;
  }
  const double f = profile_(q);
  if (f == 0.0) return {0.0, 0.0};
  const FourVector& a = history_.translation;
  const double phase = a.x0 * e - a.x1 * p[0] - a.x2 * p[1] - a.x3 * p[2];
  return scale_ * std::polar(f, phase);
}

MassShellState MassShellState::transformed(const PoincareElement& g) const {
  MassShellState out = *this;
  out.history_ = compose(g, history_);
  out.inverse_lambda_ = covering_map(out.history_.spinor.inverse());
  out.lorentz_ = !out.inverse_lambda_.isIdentity(1e-15);
  return out;
}

MassShellState MassShellState::scaled(Complex c) const {
  MassShellState out = *this;
  out.scale_ *= c;
  return out;
}

double MassShellState::reference_norm_squared() const {
  static const Rule1d radial = gauss_legendre(64, 0.0, 1.0);
  static const Rule1d polar = gauss_legendre(48, -1.0, 1.0);
  constexpr int n_phi = 64;
  const double radius = profile_.cutoff;
  double total = 0.0;
  for (int ir = 0; ir < 64; ++ir) {
    const double r = radius * radial.nodes[ir];
    const double wr = radius * radial.weights[ir] * r * r;
    double shell = 0.0;
    for (int it = 0; it < 48; ++it) {
      const double c = polar.nodes[it];
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      double ring = 0.0;
      for (int ip = 0; ip < n_phi; ++ip) {
        const double phi = 2.0 * std::numbers::pi * ip / n_phi;
        const Vec3 p = profile_.center + r * Vec3(s * std::cos(phi), s * std::sin(phi), c);
        const double f = profile_(p);
        ring += f * f / std::sqrt(mass_ * mass_ + p.squaredNorm());
      }
      shell += polar.weights[it] * ring * (2.0 * std::numbers::pi / n_phi);
    }
    total += wr * shell;
  }
  return std::norm(scale_) * total;
}

std::vector<Vec3> MassShellState::support_boundary(int count) const {
  const Vec3 c = profile_.center;
  const double r = profile_.cutoff;
  const Mat4 lambda = covering_map(history_.spinor);
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    // Fibonacci sphere
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double s = std::sqrt(1.0 - z * z);
    const double phi = i * std::numbers::pi * (3.0 - std::sqrt(5.0));
    const Vec3 q = c + r * Vec3(s * std::cos(phi), s * std::sin(phi), z);
    if (!lorentz_) {
      out.push_back(q);
      continue;
    }
    const double e = std::sqrt(mass_ * mass_ + q.squaredNorm());
    out.push_back(lambda.block<3, 1>(1, 0) * e + lambda.block<3, 3>(1, 1) * q);
  }
  return out;
}

MomentumBox MassShellState::support_box() const {
  MomentumBox box;
  if (!lorentz_) {
    box.lo = profile_.center - Vec3::Constant(profile_.cutoff);
    box.hi = profile_.center + Vec3::Constant(profile_.cutoff);
  } else {
    // The on-shell Lorentz map is a homeomorphism of R^3, so the image of the
    // ball is bounded by the image of its boundary sphere.
    box.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    box.hi = -box.lo;
    for (const Vec3& p : support_boundary()) {
      box.lo = box.lo.cwiseMin(p);
      box.hi = box.hi.cwiseMax(p);
    }
  }
  const Vec3 pad = 0.02 * (box.hi - box.lo);
  box.lo -= pad;
  box.hi += pad;
  return box;
}

std::pair<Vec3, double> MassShellState::support_ball() const {
  if (!lorentz_) return {profile_.center, profile_.cutoff};
  const MomentumBox box = support_box();
  const Vec3 c = 0.5 * (box.lo + box.hi);
  double r = 0.0;
  for (const Vec3& p : support_boundary()) r = std::max(r, (p - c).norm());
  return {c, 1.02 * r};
}

MassShellState bump_state(double mass, double p_max, const Vec3& center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("bump_state: width must be positive");
  if (center.norm() + width > p_max * (1.0 + 1e-12)) {
    throw std::invalid_argument("bump_state: |p0| + width exceeds P_max");
  }
  StateProfile f;
  f.kind = ProfileKind::bump;
  f.center = center;
  f.width = width;
  f.cutoff = width;
  return normalize(MassShellState(mass, p_max, f));
}

MassShellState truncated_gaussian_state(double mass, const Vec3& center, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("truncated_gaussian_state: sigma must be positive");
  StateProfile f;
  f.kind = ProfileKind::truncated_gaussian;
  f.center = center;
  f.width = sigma;
  f.cutoff = kGaussianCutoffSigmas * sigma;
  return normalize(MassShellState(mass, center.norm() + f.cutoff, f));
}

MassShellState reference_state() { return bump_state(1.0, 2.0, Vec3::Zero(), 2.0); }

MassShellState normalize(const MassShellState& phi) {
  const double n2 = phi.reference_norm_squared();
  if (!(n2 > 0.0)) throw std::invalid_argument("normalize: state has zero norm");
  return phi.scaled(1.0 / std::sqrt(n2));
}

MassShellState apply_rep(const PoincareElement& g, const MassShellState& phi) { return phi.transformed(g); }

QuadratureGrid make_box_grid(double mass, const MomentumBox& box, int n_transverse, int n_axis, int axis) {
  if (n_transverse < 2 || n_axis < 2) throw std::invalid_argument("make_box_grid: need >= 2 nodes per axis");
  if (axis < 0 || axis > 2) throw std::invalid_argument("make_box_grid: axis must be 0, 1 or 2");
  const int t1 = (axis + 1) % 3;
  const int t2 = (axis + 2) % 3;
  const Rule1d r1 = gauss_legendre(n_transverse, box.lo[t1], box.hi[t1]);
  const Rule1d r2 = gauss_legendre(n_transverse, box.lo[t2], box.hi[t2]);
  const Rule1d ra = gauss_legendre(n_axis, box.lo[axis], box.hi[axis]);

  QuadratureGrid g;
  g.mass = mass;
  g.fiber_axis = axis;
  const std::size_t total = static_cast<std::size_t>(n_transverse) * n_transverse * n_axis;
  g.nodes.reserve(total);
  g.weights.resize(static_cast<Eigen::Index>(total));
  g.energies.resize(static_cast<Eigen::Index>(total));
  std::size_t idx = 0;
  for (int i = 0; i < n_transverse; ++i) {
    for (int j = 0; j < n_transverse; ++j) {
      Fiber fiber;
      fiber.begin = idx;
      fiber.count = static_cast<std::size_t>(n_axis);
      fiber.transverse_weight = r1.weights[i] * r2.weights[j];
      fiber.line_weights.resize(n_axis);
      for (int k = 0; k < n_axis; ++k) {
        Vec3 p;
        p[t1] = r1.nodes[i];
        p[t2] = r2.nodes[j];
        p[axis] = ra.nodes[k];
        const double e = energy(p, mass);
        fiber.line_weights[k] = ra.weights[k] / e;
        g.nodes.push_back(p);
        g.energies[static_cast<Eigen::Index>(idx)] = e;
        g.weights[static_cast<Eigen::Index>(idx)] = fiber.transverse_weight * fiber.line_weights[k];
        ++idx;
      }
      g.fibers.push_back(std::move(fiber));
    }
  }
  return g;
}

QuadratureGrid make_grid(double mass, double p_max, int n_per_axis) {
  if (n_per_axis < 2) throw std::invalid_argument("make_grid: n_per_axis must be >= 2");
  if (!(p_max > 0.0)) throw std::invalid_argument("make_grid: P_max must be positive");
  MomentumBox box{Vec3::Constant(-p_max), Vec3::Constant(p_max)};
  return make_box_grid(mass, box, n_per_axis, n_per_axis, 2);
}

QuadratureGrid transported(const QuadratureGrid& grid, const SpinorMatrix& a) {
  const Mat4 l = covering_map(a);
  QuadratureGrid out = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Eigen::Vector4d k(grid.energies[ii], grid.nodes[i][0], grid.nodes[i][1], grid.nodes[i][2]);
    const Eigen::Vector4d image = l * k;
    out.nodes[i] = image.tail<3>();
    out.energies[ii] = image[0];
  }
  if (grid.fiber_axis >= 0) {
    const int ax = grid.fiber_axis + 1;
    bool compatible = true;
    for (int t = 1; t <= 3; ++t) {
      if (t == ax) continue;
      compatible = compatible && std::abs(l(t, 0)) < 1e-12 && std::abs(l(0, t)) < 1e-12 &&
                   std::abs(l(t, ax)) < 1e-12 && std::abs(l(ax, t)) < 1e-12;
    }
    if (!compatible) {
      out.fiber_axis = -1;
      out.fibers.clear();
    }
  }
  return out;
}

Eigen::VectorXcd sample(const MassShellState& phi, const QuadratureGrid& grid) {
  require_same_mass(phi.mass(), grid.mass);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = phi.amplitude(grid.nodes[i]);
  return v;
}

Complex inner_product(const MassShellState& phi, const MassShellState& psi, const QuadratureGrid& grid) {
  require_same_mass(phi.mass(), psi.mass());
  const Eigen::VectorXcd a = sample(phi, grid);
  const Eigen::VectorXcd b = sample(psi, grid);
  return (a.conjugate().array() * b.array() * grid.weights.array()).sum();
}

double norm_squared(const MassShellState& phi, const QuadratureGrid& grid) {
  const Eigen::VectorXcd a = sample(phi, grid);
  return (a.array().abs2() * grid.weights.array()).sum();
}

}  // namespace achronal
