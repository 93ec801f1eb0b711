#include "achronal/minkowski.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace achronal;

namespace {

const Mat4 eta = Eigen::Vector4d(1, -1, -1, -1).asDiagonal();

bool near(const FourVector& a, const FourVector& b, double tol) {
  return (a.as_vector() - b.as_vector()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

TEST_CASE("minkowski product") {
  CHECK(minkowski_product({1, 0, 0, 0}, {1, 0, 0, 0}) == 1.0);
  CHECK(minkowski_product({1, 0, 0, 1}, {1, 0, 0, 1}) == 0.0);
  CHECK(minkowski_product({1, 2, 3, 4}, {5, 6, 7, 8}) == -60.0);
}

TEST_CASE("covering map of fixed elements") {
  CHECK(covering_map(SpinorMatrix::identity()).isApprox(Mat4::Identity(), 1e-15));
  CHECK(covering_map(-SpinorMatrix::identity()).isApprox(Mat4::Identity(), 1e-15));

  const double rho = 0.8;
  const SpinorMatrix a(std::exp(rho / 2), 0.0, 0.0, std::exp(-rho / 2));
  Mat4 expected = Mat4::Identity();
  expected(0, 0) = expected(3, 3) = std::cosh(rho);
  expected(0, 3) = expected(3, 0) = std::sinh(rho);
  CHECK((covering_map(a) - expected).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((covering_map(boost(Vec3::UnitZ(), rho)) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("spinor determinant is enforced") {
  CHECK_THROWS_AS(SpinorMatrix(2.0, 0.0, 0.0, 1.0), std::invalid_argument);
  CHECK_NOTHROW(SpinorMatrix(2.0, 0.0, 0.0, 0.5));
}

TEST_CASE("action of translations and boosts") {
  const FourVector a{1, 2, 3, 4};
  const FourVector x{0.5, -1, 0.25, 2};
  CHECK(near(act(PoincareElement::pure_translation(a), x), x + a, 0.0));

  const double rho = 1.3;
  const FourVector y = act(PoincareElement::pure_lorentz(boost(Vec3::UnitZ(), rho)), {0, 0, 0, 1});
  CHECK(near(y, {std::sinh(rho), 0, 0, std::cosh(rho)}, 1e-14));
}

TEST_CASE("group laws on random elements") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const PoincareElement g{FourVector(0.0, oracle::random_vec(rng, 2.0)) + FourVector{0.7, 0, 0, 0},
                            oracle::random_spinor(rng)};
    const PoincareElement h{FourVector(-0.3, oracle::random_vec(rng, 2.0)), oracle::random_spinor(rng)};
    const FourVector x(0.4, oracle::random_vec(rng, 3.0));

    CHECK(near(act(compose(g, h), x), act(g, act(h, x)), 1e-10));
    CHECK(near(act(inverse(g), act(g, x)), x, 1e-10));
    const PoincareElement e = compose(g, inverse(g));
    CHECK(near(e.translation, {}, 1e-12));
    CHECK((e.spinor.matrix() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    const PoincareElement same = compose(g, PoincareElement::identity());
    CHECK(near(same.translation, g.translation, 0.0));

    // (a, A)(a', A') x = a + A.(a' + A'.x)
    const FourVector direct = g.translation + lorentz_act(g.spinor, h.translation + lorentz_act(h.spinor, x));
    CHECK(near(act(compose(g, h), x), direct, 1e-10));
  }
}

TEST_CASE("Lorentz matrices preserve the metric and form a homomorphism") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const SpinorMatrix a = oracle::random_spinor(rng);
    const SpinorMatrix b = oracle::random_spinor(rng);
    const Mat4 la = covering_map(a);
    CHECK((la.transpose() * eta * la - eta).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(la(0, 0) >= 1.0);
    CHECK(la.determinant() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((covering_map(a * b) - la * covering_map(b)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(covering_map(-a) == la);
  }
}

TEST_CASE("boost one-parameter group and validation") {
  const Vec3 e = Vec3(1, 2, 2).normalized();
  const SpinorMatrix ab = boost(e, 0.4) * boost(e, 0.9);
  CHECK((ab.matrix() - boost(e, 1.3).matrix()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(boost(Vec3(1, 1, 0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rotation(Vec3(0, 0, 2), 1.0), std::invalid_argument);
}

TEST_CASE("energy") {
  CHECK(energy(Vec3::Zero(), 1.7) == 1.7);
  CHECK(energy(Vec3(3, 0, 4), 12.0) == doctest::Approx(13.0).epsilon(1e-15));
  CHECK_THROWS_AS(energy(Vec3::Zero(), 0.0), std::invalid_argument);
  const FourVector p = on_shell(Vec3(0.3, -0.2, 1.1), 1.0);
  CHECK(minkowski_product(p, p) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("boosted time slice is the plane x0 = tanh(rho) x3") {
  std::mt19937_64 rng(13);
  for (double rho : {0.5, 1.0, 3.0}) {
    const PoincareElement g = PoincareElement::pure_lorentz(boost(Vec3::UnitZ(), rho));
    for (int i = 0; i < 20; ++i) {
      const FourVector y = act(g, FourVector(0.0, oracle::random_vec(rng, 5.0)));
      CHECK(y.x0 == doctest::Approx(std::tanh(rho) * y.x3).epsilon(1e-12));
    }
  }
}

TEST_CASE("rotation turns x3 into x1 about x2") {
  const FourVector y = lorentz_act(rotation(Vec3::UnitY(), std::numbers::pi / 2), {0, 0, 0, 1});
  CHECK(near(y, {0, 1, 0, 0}, 1e-14));
}
