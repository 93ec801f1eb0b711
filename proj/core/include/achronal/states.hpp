#pragma once

#include "achronal/minkowski.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace achronal {

enum class ProfileKind { bump, truncated_gaussian };

/// Untransformed momentum profile f(p), centred at p0.
struct StateProfile {
  ProfileKind kind = ProfileKind::bump;
  Vec3 center = Vec3::Zero();
  /// Bump radius, or the Gaussian standard deviation.
  double width = 2.0;
  /// f vanishes (or is below 1e-16) for |p - p0| > cutoff.
  double cutoff = 2.0;

  double operator()(const Vec3& p) const;
};

/// Axis-aligned momentum box.
struct MomentumBox {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
};

/// A wavefunction on the mass shell: phi(p) = c e^{i a.p} f(spatial(A^-1 p)),
/// with (a, A) the accumulated representation history. Transformations are
/// stored, never resampled.
class MassShellState {
 public:
  MassShellState(double mass, double p_max, StateProfile profile);

  double mass() const { return mass_; }
  /// Support radius of the untransformed profile about the origin.
  double p_max() const { return p_max_; }
  const StateProfile& profile() const { return profile_; }
  const PoincareElement& history() const { return history_; }
  Complex scale() const { return scale_; }

  Complex amplitude(const Vec3& p) const;

  /// W(g) applied on top of the stored history.
  MassShellState transformed(const PoincareElement& g) const;
  MassShellState scaled(Complex c) const;

  /// ||phi||^2 at the spherical reference quadrature (64 x 48 x 64 about the
  /// profile centre). W is unitary, so the history does not enter.
  double reference_norm_squared() const;

  /// Bounding box of the momentum support, padded by 2 %.
  MomentumBox support_box() const;
  /// Points on the boundary of the momentum support (the image of the
  /// profile's cutoff sphere under the stored Lorentz history).
  std::vector<Vec3> support_boundary(int count = 4096) const;
  /// Ball containing the momentum support.
  std::pair<Vec3, double> support_ball() const;

 private:
  double mass_;
  double p_max_;
  StateProfile profile_;
  PoincareElement history_;
  Complex scale_{1.0, 0.0};
  Mat4 inverse_lambda_ = Mat4::Identity();
  bool lorentz_ = false;
};

/// Normalized smooth bump exp(-1/(1 - |(p - p0)/width|^2)).
/// Requires width > 0 and |p0| + width <= P_max.
MassShellState bump_state(double mass, double p_max, const Vec3& center, double width);

/// Normalized Gaussian exp(-|p - p0|^2 / (2 sigma^2)), truncated where it
/// drops below 1e-16.
MassShellState truncated_gaussian_state(double mass, const Vec3& center, double sigma);

/// The default state: m = 1, p0 = 0, width 2, P_max 2.
MassShellState reference_state();

MassShellState normalize(const MassShellState& phi);
MassShellState apply_rep(const PoincareElement& g, const MassShellState& phi);

/// Nodes sharing transverse coordinates along `fiber_axis`, contiguous in the
/// node list. Weights factor as transverse_weight * line_weights[k].
struct Fiber {
  std::size_t begin = 0;
  std::size_t count = 0;
  double transverse_weight = 0.0;
  /// dp_axis / eps(p) quadrature weights
  std::vector<double> line_weights;
};

/// Quadrature rule for integrals against d^3p / eps(p).
struct QuadratureGrid {
  double mass = 1.0;
  std::vector<Vec3> nodes;
  /// w_i, the 1/eps factor already included
  Eigen::VectorXd weights;
  /// eps(p_i)
  Eigen::VectorXd energies;
  /// -1 when the grid carries no fiber structure
  int fiber_axis = -1;
  std::vector<Fiber> fibers;

  std::size_t size() const { return nodes.size(); }
};

/// Tensor Gauss-Legendre grid on [-P_max, P_max]^3, fibers along x3.
QuadratureGrid make_grid(double mass, double p_max, int n_per_axis);

/// Tensor Gauss-Legendre grid on a box: n_transverse nodes on each transverse
/// axis, n_axis along `axis` (the fiber direction).
QuadratureGrid make_box_grid(double mass, const MomentumBox& box, int n_transverse, int n_axis, int axis = 2);

/// Nodes mapped to the spatial part of Lambda(A)(eps, p), same weights. Fibers
/// survive when Lambda(A) does not mix the fiber axis with the transverse
/// plane (boosts along and rotations about that axis).
QuadratureGrid transported(const QuadratureGrid& grid, const SpinorMatrix& a);

/// phi(p_i) for every node.
Eigen::VectorXcd sample(const MassShellState& phi, const QuadratureGrid& grid);

/// sum_i w_i conj(phi_i) psi_i
Complex inner_product(const MassShellState& phi, const MassShellState& psi, const QuadratureGrid& grid);
double norm_squared(const MassShellState& phi, const QuadratureGrid& grid);

}  // namespace achronal
