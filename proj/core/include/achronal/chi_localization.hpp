#pragma once

#include "achronal/flux.hpp"
#include "achronal/kernels.hpp"
#include "achronal/quadrature.hpp"
#include "achronal/states.hpp"
#include "achronal/surfaces.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace achronal {

/// H(p) = (p1, p2, p3 - eps(p)); the third component is always negative.
Vec3 H_map(const Vec3& p, double mass);
/// H^-1(s) = (s1, s2, (s3^2 - m^2 - s1^2 - s2^2) / (2 s3)); requires s3 < 0.
Vec3 H_inverse(const Vec3& s, double mass);
/// |det DH^-1|(s) = (m^2 + |s|^2) / (2 s3^2)
double H_inverse_jacobian(const Vec3& s, double mass);

/// Sample grid in s-space: Gauss-Legendre transverse nodes (s_perp = p_perp)
/// times midpoints of n_s3 uniform cells along s3, zero-padded to fft_length
/// for the transform to x3.
struct FourierGrid {
  double mass = 1.0;
  Rule1d s1;
  Rule1d s2;
  double s3_lo = 0.0;
  double s3_hi = 0.0;
  int n_s3 = 0;
  int fft_length = 0;

  double ds3() const { return (s3_hi - s3_lo) / n_s3; }
  double s3(int j) const { return s3_lo + (j + 0.5) * ds3(); }
  /// Position cell 2 pi / (fft_length ds3).
  double dx3() const;
};

/// Grid covering H(support box of phi), padded by 2 % along s3.
FourierGrid make_fourier_grid(const MassShellState& phi, int n_transverse = 20, int n_s3 = 128, int fft_length = 4096);

/// Grid with an explicit s3 range, which must stay below 0.
FourierGrid make_fourier_grid(double mass, const MomentumBox& transverse, double s3_lo, double s3_hi,
                              int n_transverse, int n_s3, int fft_length);

/// The embedded field j phi = Y V X phi on the Fourier grid: at node s with
/// p = H^-1(s), value c(s) v(p) with c = phi(p) (eps(p) - p3)^-1/2. Only
/// nodes where phi is nonzero are stored, one block per transverse node.
struct MomentumField {
  struct FieldFiber {
    int i1 = 0;
    int i2 = 0;
    double weight = 0.0;  // transverse Gauss weight
    std::vector<int> s3_index;
    Eigen::VectorXcd coeff;
    Eigen::MatrixXd v;  // rank x nodes
  };

  FourierGrid grid;
  std::size_t rank = 0;
  std::vector<FieldFiber> fibers;
  /// sup |<v(k), v(p)> - normalized K_chi(k, p)| over probe pairs in the support.
  double kernel_error = 0.0;
  /// ||phi||^2 at the reference quadrature.
  double state_norm = 0.0;

  /// sum_fibers w sum_j ds3 |c_j|^2 |v_j|^2
  double norm_squared() const;
};

/// Throws std::runtime_error naming the leaked mass when H(supp phi) is not
/// covered by the grid.
MomentumField embed_j(const MassShellState& phi, const NystromFactor& factor, const FourierGrid& grid);

/// Replaces v by Q v for an orthogonal Q (a change of basis of the RKHS).
MomentumField remix(const MomentumField& field, const Eigen::MatrixXd& q);

/// Probabilities of regions on chi: transverse-invariant projections along
/// x3 by transverse Parseval and a zero-padded 1D FFT per transverse node,
/// bounded boxes by direct Fourier quadrature at Gauss nodes of the box.
std::vector<FluxResult> chi_probabilities(const MomentumField& field, const std::vector<Projection>& regions);

FluxResult chi_probability_fft(const MomentumField& field, const Region& region);
FluxResult chi_probability_fft(const MassShellState& phi, const Region& region, const NystromFactor& factor,
                               const FourierGrid& grid);

/// The position density sum_fibers w |F(x3)|^2 at x3_k = (k - N/2) dx3.
Eigen::VectorXd chi_line_density(const MomentumField& field);

/// Nystrom factor with M Halton anchors in the support ball of phi.
NystromFactor default_nystrom(const MassShellState& phi, const KernelSpec& spec, std::size_t anchors = 512,
                              std::uint64_t seed = 0);

/// Norms after each stage: ||phi||^2, ||X phi||^2, ||V X phi||^2, ||j phi||^2.
struct StageNorms {
  double phi = 0.0;
  double x = 0.0;
  double vx = 0.0;
  double yvx = 0.0;
};
StageNorms stage_norms(const MassShellState& phi, const NystromFactor& factor, const FourierGrid& grid,
                       int n_momentum = 24);

/// Both sides of int e^{i(p.x - eps(p) x3)} f(p) d^3p = int_{s3<0} e^{i s.x}
/// |det DH^-1| f(H^-1(s)) d^3s, each by its own Gauss-Legendre quadrature.
/// f must vanish outside |p| <= radius.
struct IdentitySides {
  Complex lhs;
  Complex rhs;
};
IdentitySides change_of_variables_sides(const std::function<double(const Vec3&)>& f, double radius, const Vec3& x,
                                        double mass, int n = 48);

}  // namespace achronal
