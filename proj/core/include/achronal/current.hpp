#pragma once

#include "achronal/kernels.hpp"
#include "achronal/minkowski.hpp"
#include "achronal/states.hpp"

#include <Eigen/Dense>

#include <vector>

namespace achronal {

struct CurrentValue {
  double J0 = 0.0;
  Vec3 J = Vec3::Zero();
  /// |Im u^* G u|, zero up to rounding since G is real symmetric
  double imag_residue = 0.0;

  FourVector four() const { return {J0, J}; }
};

/// Evaluates the current of one state on one grid at many events. The kernel
/// matrix G_ij = g(k_i.p_j) over nodes where phi is nonzero is built once; an
/// event batch then costs two real GEMMs.
class CurrentEvaluator {
 public:
  CurrentEvaluator(const MassShellState& phi, const QuadratureGrid& grid, const KernelSpec& spec);

  CurrentValue operator()(const FourVector& x) const;
  std::vector<CurrentValue> evaluate(const std::vector<FourVector>& events) const;

  /// Number of nodes carrying a nonzero amplitude.
  std::size_t active_nodes() const { return static_cast<std::size_t>(a_.size()); }

 private:
  Eigen::VectorXcd a_;  // w_i phi(p_i)
  Eigen::VectorXd e_;
  Eigen::MatrixXd p_;  // 3 x N
  Eigen::MatrixXd g_;
};

CurrentValue current(const MassShellState& phi, const FourVector& x, const QuadratureGrid& grid,
                     const KernelSpec& spec);

/// Central-difference four-divergence d0 J0 + d1 J1 + d2 J2 + d3 J3 at x.
double divergence(const MassShellState& phi, const FourVector& x, const QuadratureGrid& grid,
                  const KernelSpec& spec, double h);
double divergence(const CurrentEvaluator& eval, const FourVector& x, double h);

/// J0 - |J|
double causality_margin(const MassShellState& phi, const FourVector& x, const QuadratureGrid& grid,
                        const KernelSpec& spec);

/// max_mu |J(W(g)phi, x)_mu - (Lambda(A) J(phi, g^-1 x))_mu|, the left side on
/// the node-transported grid, the right side on `grid`.
double covariance_residual(const MassShellState& phi, const PoincareElement& g, const FourVector& x,
                           const QuadratureGrid& grid, const KernelSpec& spec);

}  // namespace achronal
