#include "achronal/chi_localization.hpp"

#include "achronal/parallel.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

namespace achronal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex, FftwFree>;

/// Overlap of [c - h, c + h] with [a, b].
double overlap(double c, double h, double a, double b) {
  return std::max(0.0, std::min(c + h, b) - std::max(c - h, a));
}

void require_chi(const Region& region) {
  const auto* plane = std::get_if<FlatPlane>(&region.surface);
  if (plane == nullptr || !plane->lightlike() || std::abs(plane->v[2] - 1.0) > 1e-12 || plane->t0 != 0.0) {
    throw std::invalid_argument("chi route: region must lie on {x0 = x3}");
  }
}

/// Sum over fibers of w |F(x3)|^2 on the FFT lattice.
Eigen::VectorXd line_density(const MomentumField& field) {
  const FourierGrid& g = field.grid;
  const int n = g.fft_length;
  const double ds = g.ds3();
  const double dx = g.dx3();
  const double x_min = -0.5 * n * dx;
  std::vector<Eigen::VectorXd> per_fiber(field.fibers.size());

  FftwBuffer probe(fftw_alloc_complex(static_cast<std::size_t>(n)));
  FftwBuffer probe_out(fftw_alloc_complex(static_cast<std::size_t>(n)));
  const fftw_plan plan = fftw_plan_dft_1d(n, probe.get(), probe_out.get(), FFTW_BACKWARD, FFTW_ESTIMATE);

  parallel_for(field.fibers.size(), [&](std::size_t f) {
    const MomentumField::FieldFiber& fib = field.fibers[f];
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(n);
    const auto k = static_cast<Eigen::Index>(fib.s3_index.size());
    if (k == 0) {
      per_fiber[f] = rho;
      return;
    }
    // |sum_j c_j v_j e^{i s_j x}|^2 = |Lambda^1/2 Q^T (c e^{i s x})|^2 with
    // V^T V = Q Lambda Q^T: a unitary change of basis in the RKHS.
    const Eigen::MatrixXd gram = fib.v.transpose() * fib.v;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    const double cut = 1e-13 * std::max(lambda.maxCoeff(), 0.0);
    FftwBuffer in(fftw_alloc_complex(static_cast<std::size_t>(n)));
    FftwBuffer out(fftw_alloc_complex(static_cast<std::size_t>(n)));
    for (Eigen::Index r = 0; r < k; ++r) {
      if (!(lambda[r] > cut)) continue;
      std::fill_n(&in.get()[0][0], 2 * static_cast<std::size_t>(n), 0.0);
      const double root = std::sqrt(lambda[r]);
      for (Eigen::Index j = 0; j < k; ++j) {
        const int idx = fib.s3_index[static_cast<std::size_t>(j)];
        const Complex d = root * eig.eigenvectors()(j, r) * fib.coeff[j] * std::polar(1.0, idx * ds * x_min);
        in.get()[idx][0] = d.real();
        in.get()[idx][1] = d.imag();
      }
      fftw_execute_dft(plan, in.get(), out.get());
      for (int x = 0; x < n; ++x) rho[x] += out.get()[x][0] * out.get()[x][0] + out.get()[x][1] * out.get()[x][1];
    }
    per_fiber[f] = fib.weight * ds * ds / kTwoPi * rho;
  });
  fftw_destroy_plan(plan);

  Eigen::VectorXd total = Eigen::VectorXd::Zero(n);
  for (const Eigen::VectorXd& r : per_fiber) total += r;
  return total;
}

double cell_sum(const Eigen::VectorXd& rho, double dx, double a, double b) {
  const Eigen::Index n = rho.size();
  const double x_min = -0.5 * static_cast<double>(n) * dx;
  std::vector<double> terms(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    terms[static_cast<std::size_t>(k)] = rho[k] * overlap(x_min + static_cast<double>(k) * dx, 0.5 * dx, a, b);
  }
  return tree_sum(terms);
}

int box_nodes(double spread, double half_width) {
  return std::clamp(static_cast<int>(std::ceil(1.5 * spread * half_width)) + 12, 16, 128);
}

/// (2pi)^-3 int_B |sum_s w(s) c(s) v(s) e^{i s.x}|^2 d^3x at Gauss nodes of B.
double box_probability(const MomentumField& field, const Projection& box) {
  const FourierGrid& g = field.grid;
  const auto m = static_cast<Eigen::Index>(field.rank);
  const double ds = g.ds3();
  const double s1_spread = g.s1.nodes.back() - g.s1.nodes.front();
  const double s2_spread = g.s2.nodes.back() - g.s2.nodes.front();
  const double s3_spread = g.s3_hi - g.s3_lo;
  const Rule1d x1 = gauss_legendre(box_nodes(s1_spread, 0.5 * (box.hi[0] - box.lo[0])), box.lo[0], box.hi[0]);
  const Rule1d x2 = gauss_legendre(box_nodes(s2_spread, 0.5 * (box.hi[1] - box.lo[1])), box.lo[1], box.hi[1]);
  const Rule1d x3 = gauss_legendre(box_nodes(s3_spread, 0.5 * (box.hi[2] - box.lo[2])), box.lo[2], box.hi[2]);
  const auto n1 = static_cast<Eigen::Index>(x1.nodes.size());
  const auto n2 = static_cast<Eigen::Index>(x2.nodes.size());
  const auto n3 = static_cast<Eigen::Index>(x3.nodes.size());
  const auto t1 = static_cast<Eigen::Index>(g.s1.nodes.size());

  // T[i1][b] = sum_{i2} w2 e^{i s2 x2_b} A_{i1 i2}, A = sum_j ds c_j v_j e^{i s3_j x3}.
  std::vector<std::vector<Eigen::MatrixXcd>> t(static_cast<std::size_t>(t1),
                                               std::vector<Eigen::MatrixXcd>(static_cast<std::size_t>(n2),
                                                                             Eigen::MatrixXcd::Zero(m, n3)));
  parallel_for(static_cast<std::size_t>(t1), [&](std::size_t i1) {
    for (const MomentumField::FieldFiber& fib : field.fibers) {
      if (static_cast<std::size_t>(fib.i1) != i1 || fib.s3_index.empty()) continue;
      const auto k = static_cast<Eigen::Index>(fib.s3_index.size());
      Eigen::MatrixXd cre(k, n3), cim(k, n3);
      for (Eigen::Index j = 0; j < k; ++j) {
        const double s3 = g.s3(fib.s3_index[static_cast<std::size_t>(j)]);
        for (Eigen::Index c = 0; c < n3; ++c) {
          const Complex z = ds * fib.coeff[j] * std::polar(1.0, s3 * x3.nodes[static_cast<std::size_t>(c)]);
          cre(j, c) = z.real();
          cim(j, c) = z.imag();
        }
      }
      Eigen::MatrixXcd a(m, n3);
      a.real() = fib.v * cre;
      a.imag() = fib.v * cim;
      const double s2 = g.s2.nodes[static_cast<std::size_t>(fib.i2)];
      const double w2 = g.s2.weights[static_cast<std::size_t>(fib.i2)];
      for (Eigen::Index b = 0; b < n2; ++b) {
        t[i1][static_cast<std::size_t>(b)] += (w2 * std::polar(1.0, s2 * x2.nodes[static_cast<std::size_t>(b)])) * a;
      }
    }
  });

  std::vector<double> slabs(static_cast<std::size_t>(n1), 0.0);
  parallel_for(static_cast<std::size_t>(n1), [&](std::size_t a) {
    double acc = 0.0;
    for (Eigen::Index b = 0; b < n2; ++b) {
      Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(m, n3);
      for (Eigen::Index i1 = 0; i1 < t1; ++i1) {
        const double s1 = g.s1.nodes[static_cast<std::size_t>(i1)];
        const double w1 = g.s1.weights[static_cast<std::size_t>(i1)];
        f += (w1 * std::polar(1.0, s1 * x1.nodes[a])) * t[static_cast<std::size_t>(i1)][static_cast<std::size_t>(b)];
      }
      const Eigen::RowVectorXd col_norms = f.cwiseAbs2().colwise().sum();
      double line = 0.0;
      for (Eigen::Index c = 0; c < n3; ++c) line += x3.weights[static_cast<std::size_t>(c)] * col_norms[c];
      acc += x2.weights[static_cast<std::size_t>(b)] * line;
    }
    slabs[a] = x1.weights[a] * acc;
  });
  return tree_sum(slabs) / (kTwoPi * kTwoPi * kTwoPi);
}

}  // namespace

Vec3 H_map(const Vec3& p, double mass) { return {p[0], p[1], p[2] - energy(p, mass)}; }

Vec3 H_inverse(const Vec3& s, double mass) {
  if (!(s[2] < 0.0)) throw std::domain_error("H_inverse: requires s3 < 0");
  const double q = mass * mass + s[0] * s[0] + s[1] * s[1];
  return {s[0], s[1], (s[2] * s[2] - q) / (2.0 * s[2])};
}

double H_inverse_jacobian(const Vec3& s, double mass) {
  if (!(s[2] < 0.0)) throw std::domain_error("H_inverse_jacobian: requires s3 < 0");
  return (mass * mass + s.squaredNorm()) / (2.0 * s[2] * s[2]);
}

double FourierGrid::dx3() const { return kTwoPi / (fft_length * ds3()); }

FourierGrid make_fourier_grid(double mass, const MomentumBox& transverse, double s3_lo, double s3_hi, int n_transverse,
                              int n_s3, int fft_length) {
  if (!(s3_lo < s3_hi) || !(s3_hi < 0.0)) throw std::invalid_argument("make_fourier_grid: need s3_lo < s3_hi < 0");
  if (n_transverse < 2 || n_s3 < 2 || fft_length < n_s3) {
    throw std::invalid_argument("make_fourier_grid: need n_transverse, n_s3 >= 2 and fft_length >= n_s3");
  }
  FourierGrid g;
  g.mass = mass;
  g.s1 = gauss_legendre(n_transverse, transverse.lo[0], transverse.hi[0]);
  g.s2 = gauss_legendre(n_transverse, transverse.lo[1], transverse.hi[1]);
  g.s3_lo = s3_lo;
  g.s3_hi = s3_hi;
  g.n_s3 = n_s3;
  g.fft_length = fft_length;
  return g;
}

FourierGrid make_fourier_grid(const MassShellState& phi, int n_transverse, int n_s3, int fft_length) {
  double lo = kInf;
  double hi = -kInf;
  for (const Vec3& p : phi.support_boundary()) {
    const double s3 = H_map(p, phi.mass())[2];
    lo = std::min(lo, s3);
    hi = std::max(hi, s3);
  }
  const double pad = 0.02 * (hi - lo);
  // The image of a compact support stays below s3 = 0; keep the padding there.
  hi = std::min(hi + pad, 0.5 * hi);
  lo -= pad;
  return make_fourier_grid(phi.mass(), phi.support_box(), lo, hi, n_transverse, n_s3, fft_length);
}

double MomentumField::norm_squared() const {
  std::vector<double> terms;
  terms.reserve(fibers.size());
  const double ds = grid.ds3();
  for (const FieldFiber& f : fibers) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < f.coeff.size(); ++j) acc += std::norm(f.coeff[j]) * f.v.col(j).squaredNorm();
    terms.push_back(f.weight * ds * acc);
  }
  return tree_sum(terms);
}

MomentumField embed_j(const MassShellState& phi, const NystromFactor& factor, const FourierGrid& grid) {
  const double m = phi.mass();
  if (std::abs(m - grid.mass) > 1e-14 || std::abs(m - factor.spec().mass) > 1e-14) {
    throw std::invalid_argument("embed_j: state, kernel and grid masses differ");
  }
  // Coverage: mass of phi whose H-image falls outside the sampled s-box.
  {
    const QuadratureGrid probe = make_box_grid(m, phi.support_box(), 16, 16);
    const double s1_lo = grid.s1.nodes.front(), s1_hi = grid.s1.nodes.back();
    const double s2_lo = grid.s2.nodes.front(), s2_hi = grid.s2.nodes.back();
    const double h1 = 0.5 * (s1_hi - s1_lo) / grid.s1.nodes.size();
    const double h2 = 0.5 * (s2_hi - s2_lo) / grid.s2.nodes.size();
    double leaked = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const Complex a = phi.amplitude(probe.nodes[i]);
      if (a == Complex{0.0, 0.0}) continue;
      const Vec3 s = H_map(probe.nodes[i], m);
      const bool inside = s[0] >= s1_lo - 2 * h1 && s[0] <= s1_hi + 2 * h1 && s[1] >= s2_lo - 2 * h2 &&
                          s[1] <= s2_hi + 2 * h2 && s[2] >= grid.s3_lo && s[2] <= grid.s3_hi;
      if (!inside) leaked += probe.weights[static_cast<Eigen::Index>(i)] * std::norm(a);
    }
    if (leaked > 0.0) {
      throw std::runtime_error("embed_j: Fourier grid does not cover H(supp phi); leaked mass " + std::to_string(leaked));
    }
  }

  MomentumField field;
  field.grid = grid;
  field.rank = factor.rank();
  field.state_norm = phi.reference_norm_squared();
  const auto n_t = static_cast<int>(grid.s1.nodes.size());
  field.fibers.resize(static_cast<std::size_t>(n_t) * n_t);
  parallel_for(field.fibers.size(), [&](std::size_t f) {
    MomentumField::FieldFiber& fib = field.fibers[f];
    fib.i1 = static_cast<int>(f) / n_t;
    fib.i2 = static_cast<int>(f) % n_t;
    fib.weight = grid.s1.weights[static_cast<std::size_t>(fib.i1)] * grid.s2.weights[static_cast<std::size_t>(fib.i2)];
    std::vector<Vec3> points;
    std::vector<Complex> coeff;
    for (int j = 0; j < grid.n_s3; ++j) {
      const Vec3 s(grid.s1.nodes[static_cast<std::size_t>(fib.i1)], grid.s2.nodes[static_cast<std::size_t>(fib.i2)],
                   grid.s3(j));
      const Vec3 p = H_inverse(s, m);
      const Complex a = phi.amplitude(p);
      if (a == Complex{0.0, 0.0}) continue;
      fib.s3_index.push_back(j);
      points.push_back(p);
      coeff.push_back(a / std::sqrt(energy(p, m) - p[2]));
    }
    fib.coeff = Eigen::Map<Eigen::VectorXcd>(coeff.data(), static_cast<Eigen::Index>(coeff.size()));
    fib.v = points.empty() ? Eigen::MatrixXd(factor.rank(), 0) : factor.rkhs_vectors(points);
  });

  // Reconstruction error of the finite-rank kernel on probe pairs from the field.
  std::vector<Vec3> probes;
  for (const MomentumField::FieldFiber& fib : field.fibers) {
    for (std::size_t j = 0; j < fib.s3_index.size(); j += 7) {
      const Vec3 s(grid.s1.nodes[static_cast<std::size_t>(fib.i1)], grid.s2.nodes[static_cast<std::size_t>(fib.i2)],
                   grid.s3(fib.s3_index[j]));
      probes.push_back(H_inverse(s, m));
    }
  }
  const std::size_t stride = std::max<std::size_t>(1, probes.size() / 48);
  std::vector<Vec3> chosen;
  for (std::size_t i = 0; i < probes.size(); i += stride) chosen.push_back(probes[i]);
  if (!chosen.empty()) {
    const Eigen::MatrixXd v = factor.rkhs_vectors(chosen);
    for (std::size_t a = 0; a < chosen.size(); ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        const double k = kernel_Kchi_normalized(factor.spec(), chosen[a], chosen[b]);
        const double e = std::abs(v.col(static_cast<Eigen::Index>(a)).dot(v.col(static_cast<Eigen::Index>(b))) - k);
        field.kernel_error = std::max(field.kernel_error, e);
      }
    }
  }
  return field;
}

MomentumField remix(const MomentumField& field, const Eigen::MatrixXd& q) {
  if (q.rows() != static_cast<Eigen::Index>(field.rank) || q.cols() != q.rows()) {
    throw std::invalid_argument("remix: matrix must be rank x rank");
  }
  MomentumField out = field;
  for (MomentumField::FieldFiber& f : out.fibers) f.v = q * f.v;
  return out;
}

Eigen::VectorXd chi_line_density(const MomentumField& field) { return line_density(field); }

std::vector<FluxResult> chi_probabilities(const MomentumField& field, const std::vector<Projection>& regions) {
  std::vector<FluxResult> out(regions.size());
  const double norm = field.norm_squared();
  const double defect = std::abs(norm - field.state_norm);
  Eigen::VectorXd rho;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Projection& proj = regions[i];
    FluxResult& r = out[i];
    r.route = FluxRoute::chi_fourier;
    r.n_transverse = static_cast<int>(field.grid.s1.nodes.size());
    r.n_axis = field.grid.n_s3;
    if (proj.empty()) continue;
    if (proj.dilation != 0.0) throw std::invalid_argument("chi route: dilated projections unsupported");
    if (proj.transverse_invariant(2)) {
      if (rho.size() == 0) rho = line_density(field);
      const double dx = field.grid.dx3();
      r.value = cell_sum(rho, dx, proj.lo[2], proj.hi[2]);
      r.window = 0.5 * field.grid.fft_length * dx;
    } else if (proj.bounded()) {
      r.value = box_probability(field, proj);
    } else {
      throw std::invalid_argument("chi route: unsupported projection " + proj.describe());
    }
    r.error_estimate = defect + field.kernel_error * std::abs(r.value);
  }
  return out;
}

FluxResult chi_probability_fft(const MomentumField& field, const Region& region) {
  require_chi(region);
  return chi_probabilities(field, {region.projection}).front();
}

FluxResult chi_probability_fft(const MassShellState& phi, const Region& region, const NystromFactor& factor,
                               const FourierGrid& grid) {
  require_chi(region);
  return chi_probability_fft(embed_j(phi, factor, grid), region);
}

NystromFactor default_nystrom(const MassShellState& phi, const KernelSpec& spec, std::size_t anchors,
                              std::uint64_t seed) {
  const auto [centre, radius] = phi.support_ball();
  return NystromFactor(spec, halton_ball(centre, radius, anchors, seed));
}

StageNorms stage_norms(const MassShellState& phi, const NystromFactor& factor, const FourierGrid& grid, int n_momentum) {
  StageNorms s;
  s.phi = phi.reference_norm_squared();
  const QuadratureGrid q = make_box_grid(phi.mass(), phi.support_box(), n_momentum, n_momentum);
  std::vector<Vec3> points;
  std::vector<double> weights;  // Lebesgue weight |phi|^2 / eps
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Complex a = phi.amplitude(q.nodes[i]);
    if (a == Complex{0.0, 0.0}) continue;
    points.push_back(q.nodes[i]);
    // do-weight w = W / eps, and |X phi|^2 = |phi|^2 / eps against d^3p
    weights.push_back(q.weights[static_cast<Eigen::Index>(i)] * std::norm(a));
  }
  const Eigen::MatrixXd v = points.empty() ? Eigen::MatrixXd() : factor.rkhs_vectors(points);
  std::vector<double> xs(points.size()), vxs(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    xs[i] = weights[i];
    vxs[i] = weights[i] * v.col(static_cast<Eigen::Index>(i)).squaredNorm();
  }
  s.x = tree_sum(xs);
  s.vx = tree_sum(vxs);
  s.yvx = embed_j(phi, factor, grid).norm_squared();
  return s;
}

IdentitySides change_of_variables_sides(const std::function<double(const Vec3&)>& f, double radius, const Vec3& x,
                                        double mass, int n) {
  const Rule1d r = gauss_legendre(n, -radius, radius);
  std::vector<Complex> lhs_terms;
  lhs_terms.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const Vec3 p(r.nodes[i], r.nodes[j], r.nodes[k]);
        const double w = r.weights[i] * r.weights[j] * r.weights[k] * f(p);
        if (w == 0.0) continue;
        lhs_terms.push_back(w * std::polar(1.0, p.dot(x) - energy(p, mass) * x[2]));
      }
    }
  }
  // Image of the ball |p| <= radius lies in s3 in [-radius - eps(radius), -m^2 / (eps(radius) + radius)].
  const double er = std::sqrt(mass * mass + radius * radius);
  const Rule1d r3 = gauss_legendre(n, -radius - er, -mass * mass / (er + radius));
  std::vector<Complex> rhs_terms;
  rhs_terms.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const Vec3 s(r.nodes[i], r.nodes[j], r3.nodes[k]);
        const double w = r.weights[i] * r.weights[j] * r3.weights[k] * f(H_inverse(s, mass));
        if (w == 0.0) continue;
        rhs_terms.push_back(w * H_inverse_jacobian(s, mass) * std::polar(1.0, s.dot(x)));
      }
    }
  }
  IdentitySides out{};
  for (const Complex& t : lhs_terms) out.lhs += t;
  for (const Complex& t : rhs_terms) out.rhs += t;
  return out;
}

}  // namespace achronal
