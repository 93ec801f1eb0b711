#include "achronal/current.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace achronal {

namespace {

constexpr double kPrefactor = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi);
constexpr Eigen::Index kEventBlock = 256;

}  // namespace

CurrentEvaluator::CurrentEvaluator(const MassShellState& phi, const QuadratureGrid& grid, const KernelSpec& spec) {
  if (std::abs(phi.mass() - grid.mass) > 1e-14 || std::abs(spec.mass - grid.mass) > 1e-14) {
    throw std::invalid_argument("current: state, grid and kernel masses differ");
  }
  std::vector<Eigen::Index> active;
  std::vector<Complex> amp;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex v = phi.amplitude(grid.nodes[i]);
    if (v != Complex{0.0, 0.0}) {
      active.push_back(static_cast<Eigen::Index>(i));
      amp.push_back(v);
    }
  }
  const auto n = static_cast<Eigen::Index>(active.size());
  a_.resize(n);
  e_.resize(n);
  p_.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index k = active[static_cast<std::size_t>(i)];
    a_[i] = grid.weights[k] * amp[static_cast<std::size_t>(i)];
    e_[i] = grid.energies[k];
    p_.col(i) = grid.nodes[static_cast<std::size_t>(k)];
  }
  g_.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double t = e_[i] * e_[j] - p_.col(i).dot(p_.col(j));
      g_(i, j) = spec(t);
      g_(j, i) = g_(i, j);
    }
  }
}

std::vector<CurrentValue> CurrentEvaluator::evaluate(const std::vector<FourVector>& events) const {
  std::vector<CurrentValue> out(events.size());
  const Eigen::Index n = a_.size();
  if (n == 0) return out;
  const auto total = static_cast<Eigen::Index>(events.size());
  for (Eigen::Index b0 = 0; b0 < total; b0 += kEventBlock) {
    const Eigen::Index nb = std::min(kEventBlock, total - b0);
    Eigen::MatrixXd ure(n, nb), uim(n, nb);
    for (Eigen::Index e = 0; e < nb; ++e) {
      const FourVector& x = events[static_cast<std::size_t>(b0 + e)];
      const Eigen::Vector3d xs = x.spatial();
      for (Eigen::Index i = 0; i < n; ++i) {
        // u_i = a_i exp(-i p_i.x)
        const double phase = -(e_[i] * x.x0 - p_.col(i).dot(xs));
        const Complex u = a_[i] * Complex(std::cos(phase), std::sin(phase));
        ure(i, e) = u.real();
        uim(i, e) = u.imag();
      }
    }
    const Eigen::MatrixXd yre = g_ * ure;
    const Eigen::MatrixXd yim = g_ * uim;
    for (Eigen::Index e = 0; e < nb; ++e) {
      // conj(u_i) y_i; the k <-> p swap contributes the complex conjugate.
      const Eigen::ArrayXd re = ure.col(e).array() * yre.col(e).array() + uim.col(e).array() * yim.col(e).array();
      const Eigen::ArrayXd im = ure.col(e).array() * yim.col(e).array() - uim.col(e).array() * yre.col(e).array();
      CurrentValue& v = out[static_cast<std::size_t>(b0 + e)];
      v.J0 = kPrefactor * (e_.array() * re).sum();
      v.J = kPrefactor * (p_ * re.matrix());
      // u^* G u is real for symmetric G; its imaginary part measures rounding.
      v.imag_residue = kPrefactor * std::abs(im.sum());
    }
  }
  return out;
}

CurrentValue CurrentEvaluator::operator()(const FourVector& x) const { return evaluate({x}).front(); }

CurrentValue current(const MassShellState& phi, const FourVector& x, const QuadratureGrid& grid,
                     const KernelSpec& spec) {
  return CurrentEvaluator(phi, grid, spec)(x);
}

double divergence(const CurrentEvaluator& eval, const FourVector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("divergence: h must be positive");
  std::vector<FourVector> events;
  for (int mu = 0; mu < 4; ++mu) {
    FourVector d;
    (mu == 0 ? d.x0 : mu == 1 ? d.x1 : mu == 2 ? d.x2 : d.x3) = h;
    events.push_back(x + d);
    events.push_back(x - d);
  }
  const std::vector<CurrentValue> v = eval.evaluate(events);
  double div = (v[0].J0 - v[1].J0) / (2.0 * h);
  for (int i = 0; i < 3; ++i) div += (v[2 + 2 * i].J[i] - v[3 + 2 * i].J[i]) / (2.0 * h);
  return div;
}

double divergence(const MassShellState& phi, const FourVector& x, const QuadratureGrid& grid,
                  const KernelSpec& spec, double h) {
  return divergence(CurrentEvaluator(phi, grid, spec), x, h);
}

double causality_margin(const MassShellState& phi, const FourVector& x, const QuadratureGrid& grid,
                        const KernelSpec& spec) {
  const CurrentValue v = current(phi, x, grid, spec);
  return v.J0 - v.J.norm();
}

double covariance_residual(const MassShellState& phi, const PoincareElement& g, const FourVector& x,
                           const QuadratureGrid& grid, const KernelSpec& spec) {
  const QuadratureGrid moved = transported(grid, g.spinor);
  const CurrentValue lhs = current(apply_rep(g, phi), x, moved, spec);
  const CurrentValue base = current(phi, act(inverse(g), x), grid, spec);
  const FourVector rhs = lorentz_act(g.spinor, base.four());
  const FourVector d = lhs.four() - rhs;
  return std::max({std::abs(d.x0), std::abs(d.x1), std::abs(d.x2), std::abs(d.x3)});
}

}  // namespace achronal
