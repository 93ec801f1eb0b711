#include "achronal/current.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace achronal;

namespace {

std::vector<FourVector> lattice4(int n, double w) {
  std::vector<FourVector> out;
  const auto c = [&](int i) { return -w + 2.0 * w * i / (n - 1); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) out.emplace_back(c((i + 3 * j + 7 * l) % n), c(i), c(j), c(l));
  return out;
}

double rel_diff(const CurrentValue& v, const std::array<double, 4>& o) {
  double d = std::abs(v.J0 - o[0]);
  for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(v.J[k] - o[k + 1]));
  return d / std::abs(o[0]);
}

}  // namespace

TEST_CASE("zero state has zero current") {
  const QuadratureGrid grid = make_grid(1.0, 2.0, 8);
  const MassShellState zero = reference_state().scaled(0.0);
  const CurrentValue v = current(zero, {0.3, 0.1, 0, 0}, grid, KernelSpec());
  CHECK(v.J0 == 0.0);
  CHECK(v.J.norm() == 0.0);
  CHECK(divergence(zero, {}, grid, KernelSpec(), 1e-3) == 0.0);
  CHECK(causality_margin(zero, {}, grid, KernelSpec()) == 0.0);
}

TEST_CASE("evaluator matches the naive double loop") {
  const MassShellState phi =
      apply_rep(PoincareElement::pure_translation({0.2, 0.3, -0.1, 0.5}), bump_state(1.0, 2.0, Vec3(0.3, 0, -0.2), 1.5));
  const QuadratureGrid grid = make_grid(1.0, 2.0, 12);
  for (double r : {1.5, 2.0}) {
    const KernelSpec spec(1.0, r);
    const CurrentEvaluator eval(phi, grid, spec);
    for (const FourVector& x : {FourVector{}, FourVector{0.5, 1, -1, 0.2}, FourVector{-1, 0, 2, -1.5}}) {
      CHECK(rel_diff(eval(x), oracle::current(phi, grid, r, x)) <= 1e-12);
    }
  }
}

TEST_CASE("reference state at the origin against the coarse oracle") {
  const MassShellState phi = reference_state();
  const QuadratureGrid grid = make_grid(1.0, 2.0, 12);
  const auto o = oracle::current(phi, grid, 1.5, {});
  CHECK(current(phi, {}, grid, KernelSpec()).J0 == doctest::Approx(o[0]).epsilon(1e-6));
}

TEST_CASE("spatial current vanishes on the symmetry axis of an isotropic state") {
  const MassShellState phi = reference_state();
  const QuadratureGrid grid = make_grid(1.0, 2.0, 14);
  for (double t : {0.0, 0.7, -1.3}) {
    const CurrentValue v = current(phi, {t, 0, 0, 0}, grid, KernelSpec());
    CHECK(v.J.norm() <= 1e-10 * v.J0);
    CHECK(v.imag_residue <= 1e-10 * v.J0);
  }
}

TEST_CASE("divergence decays at second order") {
  const MassShellState phi = reference_state();
  const QuadratureGrid grid = make_grid(1.0, 2.0, 16);
  const CurrentEvaluator eval(phi, grid, KernelSpec());
  // At x = 0 the residual of this state vanishes by symmetry, so the order is
  // measured at a generic event.
  const FourVector x{0.3, 0.2, -0.1, 0.4};
  const double r4 = divergence(eval, x, 4e-3);
  const double r2 = divergence(eval, x, 2e-3);
  const double r1 = divergence(eval, x, 1e-3);
  CHECK(std::abs(r4) > 0.0);
  CHECK(std::abs(r4 / r2) == doctest::Approx(4.0).epsilon(0.25));
  CHECK(std::abs(r2 / r1) == doctest::Approx(4.0).epsilon(0.25));
  const double c = std::abs(r4) / (4e-3 * 4e-3);
  CHECK(std::abs(divergence(eval, {}, 1e-3)) <= c * 1e-6);
  CHECK(divergence(phi, x, grid, KernelSpec(), 2e-3) == r2);
}

TEST_CASE("causality margin on the event lattice") {
  const MassShellState phi = reference_state();
  const QuadratureGrid grid = make_grid(1.0, 2.0, 12);
  const std::vector<FourVector> events = lattice4(10, 2.0);
  CHECK(events.size() == 1000);
  for (double r : {1.5, 2.0}) {
    const CurrentEvaluator eval(phi, grid, KernelSpec(1.0, r));
    double worst = 1.0;
    for (const CurrentValue& v : eval.evaluate(events)) worst = std::min(worst, (v.J0 - v.J.norm()) / (1.0 + v.J0));
    CHECK(worst >= -1e-10);
  }
  CHECK(causality_margin(phi, {0.5, 0.2, 0.1, 0.3}, grid, KernelSpec()) > 0.0);
}

TEST_CASE("a non-positive kernel breaks causality somewhere on the lattice") {
  const MassShellState phi = bump_state(1.0, 2.0, Vec3(0.5, 0, 0), 1.5);
  const QuadratureGrid grid = make_grid(1.0, 2.0, 12);
  const CurrentEvaluator eval(phi, grid, KernelSpec::cosine(1.0));
  double worst = 1.0;
  for (const CurrentValue& v : eval.evaluate(lattice4(10, 2.0))) worst = std::min(worst, v.J0 - v.J.norm());
  CHECK(worst < 0.0);
}

TEST_CASE("covariance under node transport") {
  const MassShellState phi = bump_state(1.0, 2.0, Vec3(0.2, -0.1, 0.3), 1.4);
  const QuadratureGrid grid = make_grid(1.0, 2.0, 10);
  const KernelSpec spec;
  const FourVector x{0.4, 0.3, -0.2, 0.6};
  const double j0 = current(phi, x, grid, spec).J0;

  CHECK(covariance_residual(phi, PoincareElement::identity(), x, grid, spec) == 0.0);
  CHECK(covariance_residual(phi, PoincareElement::pure_translation({0.3, 1, 2, -1}), x, grid, spec) <= 1e-10 * j0);
  CHECK(covariance_residual(phi, PoincareElement::pure_lorentz(rotation(Vec3(1, 1, 0).normalized(), 0.8)), x, grid,
                            spec) <= 1e-9 * j0);
  CHECK(covariance_residual(phi, PoincareElement::pure_lorentz(boost(Vec3::UnitZ(), 1.0)), x, grid, spec) <= 1e-9 * j0);
  const PoincareElement mixed{{0.1, -0.2, 0.3, 0.5}, boost(Vec3(0, 1, 0), 0.7) * rotation(Vec3::UnitX(), 0.4)};
  CHECK(covariance_residual(phi, mixed, x, grid, spec) <= 1e-9 * j0);
}

TEST_CASE("mass mismatch is rejected") {
  const QuadratureGrid grid = make_grid(2.0, 2.0, 6);
  CHECK_THROWS_AS(current(reference_state(), {}, grid, KernelSpec()), std::invalid_argument);
}
