#include "achronal/chi_localization.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace achronal;

namespace {

struct Pipeline {
  MassShellState phi = reference_state();
  KernelSpec spec;
  NystromFactor factor = default_nystrom(phi, spec);
  FourierGrid grid = make_fourier_grid(phi);
  MomentumField field = embed_j(phi, factor, grid);
};

const Pipeline& pipeline() {
  static const Pipeline p;
  return p;
}

Eigen::MatrixXd random_orthogonal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("H map basics") {
  CHECK((H_map(Vec3::Zero(), 1.0) - Vec3(0, 0, -1)).norm() == 0.0);
  CHECK(H_inverse(Vec3(0, 0, -1), 1.0).norm() < 1e-15);
  CHECK_THROWS_AS(H_inverse(Vec3(0.1, 0, 0.0), 1.0), std::domain_error);
  CHECK_THROWS_AS(H_inverse(Vec3(0.1, 0, 0.3), 1.0), std::domain_error);

  std::mt19937_64 rng(61);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 + 0.01 * i;
    const Vec3 p = oracle::random_vec(rng, 5.0);
    const Vec3 s = H_map(p, m);
    CHECK(s[2] < 0.0);
    CHECK((H_inverse(s, m) - p).norm() <= 1e-12 * std::max(1.0, p.norm()));
    const double e = energy(p, m);
    CHECK(std::abs(m * m + s.squaredNorm() - 2 * e * (e - p[2])) <= 1e-12 * e * e);
  }
}

TEST_CASE("H inverse Jacobian against finite differences") {
  std::mt19937_64 rng(62);
  for (int i = 0; i < 20; ++i) {
    Vec3 s = oracle::random_vec(rng, 2.0);
    s[2] = -0.3 - std::abs(s[2]);
    Eigen::Matrix3d d;
    const double h = 1e-6;
    for (int c = 0; c < 3; ++c) {
      Vec3 a = s, b = s;
      a[c] += h;
      b[c] -= h;
      d.col(c) = (H_inverse(a, 1.0) - H_inverse(b, 1.0)) / (2 * h);
    }
    CHECK(std::abs(std::abs(d.determinant()) - H_inverse_jacobian(s, 1.0)) <= 1e-6 * H_inverse_jacobian(s, 1.0));
  }
}

TEST_CASE("change of variables identity by independent quadratures") {
  const auto f = [](const Vec3& p) {
    const double u = p.squaredNorm() / (1.5 * 1.5);
    return u < 1.0 ? std::exp(-1.0 / (1.0 - u)) : 0.0;
  };
  for (const Vec3& x : {Vec3(0, 0, 0), Vec3(0.5, -0.3, 0.8), Vec3(-1.0, 0.4, -0.6)}) {
    const IdentitySides sides = change_of_variables_sides(f, 1.5, x, 1.0);
    CHECK(std::abs(sides.lhs - sides.rhs) <= 1e-4 * std::abs(sides.lhs));
  }
}

TEST_CASE("each stage of the embedding preserves the norm") {
  const Pipeline& p = pipeline();
  const StageNorms n = stage_norms(p.phi, p.factor, p.grid);
  CHECK(std::abs(n.phi - 1.0) <= 1e-3);
  CHECK(std::abs(n.x - n.phi) <= 1e-3);
  CHECK(std::abs(n.vx - n.x) <= 1e-3);
  CHECK(std::abs(n.yvx - n.vx) <= 1e-3);
}

TEST_CASE("embedding: isometry, support and zero state") {
  const Pipeline& p = pipeline();
  CHECK(std::abs(p.field.norm_squared() / p.field.state_norm - 1.0) <= 1e-3);
  CHECK(p.field.rank == 512);
  const double p_max = p.phi.p_max();
  const double edge = -1.0 / (energy(Vec3(0, 0, p_max), 1.0) + p_max);
  for (const auto& fiber : p.field.fibers) {
    for (int j : fiber.s3_index) CHECK(p.grid.s3(j) < edge);
  }
  const MomentumField zero = embed_j(p.phi.scaled(0.0), p.factor, p.grid);
  CHECK(zero.norm_squared() == 0.0);
  CHECK(chi_probability_fft(zero, {FlatPlane::chi(), Projection::all()}).value == 0.0);
}

TEST_CASE("a grid that misses the support is rejected") {
  const Pipeline& p = pipeline();
  const FourierGrid narrow = make_fourier_grid(1.0, {Vec3(-2, -2, 0), Vec3(2, 2, 0)}, -2.0, -0.5, 12, 64, 1024);
  CHECK_THROWS_AS(embed_j(p.phi, p.factor, narrow), std::runtime_error);
}

TEST_CASE("Parseval and complements") {
  const Pipeline& p = pipeline();
  const std::vector<FluxResult> r = chi_probabilities(
      p.field, {Projection::all(), Projection::strip(2, -0.5, 0.5), Projection::halfspace(2, -0.5, true),
                Projection::halfspace(2, 0.5, false), Projection::box(Vec3(-1, -1, -1), Vec3(1, 1, 1)),
                Projection::box(Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5))});
  CHECK(std::abs(r[0].value - 1.0) <= 1e-3);
  CHECK(std::abs(r[1].value + r[2].value + r[3].value - r[0].value) <= 1e-3);
  for (const FluxResult& x : r) CHECK(x.value >= 0.0);
  CHECK(r[5].value <= r[4].value);
  CHECK(r[4].value <= r[1].value + r[2].value + r[3].value);
  const Eigen::VectorXd density = chi_line_density(p.field);
  CHECK(std::abs(density.sum() * p.grid.dx3() - r[0].value) <= 1e-10);
}

TEST_CASE("FFT route agrees with the flux engine on chi") {
  const Pipeline& p = pipeline();
  const KernelSpec spec;
  for (const Projection& proj : {Projection::strip(2, -0.5, 0.5), Projection::halfspace(2, 0.3, true),
                                 Projection::box(Vec3(-1, -1, -1), Vec3(1, 1, 1))}) {
    const double fft = chi_probability_fft(p.field, {FlatPlane::chi(), proj}).value;
    const double moc = flux(p.phi, {FlatPlane::chi(), proj}, spec).value;
    CHECK(std::abs(fft - moc) <= 1e-2 * moc);
  }
}

TEST_CASE("orthogonal remixing of the kernel space is unobservable") {
  const Pipeline& p = pipeline();
  const MomentumField mixed = remix(p.field, random_orthogonal(p.field.rank, 63));
  const std::vector<Projection> regions = {Projection::strip(2, -0.5, 0.5),
                                           Projection::box(Vec3(-1, 0, -1), Vec3(1, 1, 2))};
  const auto a = chi_probabilities(p.field, regions);
  const auto b = chi_probabilities(mixed, regions);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i].value - b[i].value) <= 1e-12);
}
