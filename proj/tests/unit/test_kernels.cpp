#include "achronal/kernels.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace achronal;

TEST_CASE("g at the mass shell threshold and a fixed point") {
  for (double m : {0.5, 1.0, 2.0}) {
    for (double r : {1.5, 2.0, 3.7}) CHECK(g_eval(KernelSpec(m, r), m * m) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(g_eval(KernelSpec(1.0, 1.5), 3.0) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
  CHECK(g_eval(KernelSpec(2.0, 1.5), 12.0) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
  CHECK(g_eval(KernelSpec(1.0, 2.5), 5.0) == doctest::Approx(oracle::g_power(1.0, 2.5, 5.0)).epsilon(1e-15));
}

TEST_CASE("g range, monotonicity and domination by r = 3/2") {
  const KernelSpec g32(1.3, 1.5), g2(1.3, 2.0), g5(1.3, 5.0);
  double prev = 2.0;
  for (double t = 1.69; t < 500.0; t *= 1.3) {
    const double v = g_eval(g32, t);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    CHECK(v < prev);
    prev = v;
    CHECK(g_eval(g2, t) <= v);
    CHECK(g_eval(g5, t) <= v);
  }
}

TEST_CASE("g rejects arguments below m^2 and exponents below 3/2") {
  CHECK_THROWS_AS(g_eval(KernelSpec(1.0, 1.5), 0.9), std::domain_error);
  CHECK_NOTHROW(g_eval(KernelSpec(1.0, 1.5), 1.0 - 1e-14));
  CHECK_THROWS_AS(KernelSpec(1.0, 1.2), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec(0.0, 1.5), std::invalid_argument);
}

TEST_CASE("kernel diagonals and symmetry") {
  const KernelSpec spec(1.0, 1.5);
  std::mt19937_64 rng(31);
  CHECK(kernel_K(spec, Vec3::Zero(), Vec3::Zero()) == doctest::Approx(1.0));
  CHECK(kernel_Kchi(spec, Vec3::Zero(), Vec3::Zero()) == doctest::Approx(1.0));
  for (int i = 0; i < 100; ++i) {
    const Vec3 k = oracle::random_vec(rng, 3.0);
    const Vec3 p = oracle::random_vec(rng, 3.0);
    CHECK(kernel_K(spec, p, p) == doctest::Approx(energy(p, 1.0)).epsilon(1e-14));
    CHECK(kernel_Kchi(spec, p, p) == doctest::Approx(energy(p, 1.0) - p[2]).epsilon(1e-13));
    CHECK(kernel_K(spec, k, p) == kernel_K(spec, p, k));
    CHECK(kernel_Kchi(spec, k, p) == kernel_Kchi(spec, p, k));
    CHECK(kernel_Kchi_normalized(spec, p, p) == doctest::Approx(1.0).epsilon(1e-14));
    const double direct = 0.5 * (oracle::eps(k, 1.0) + oracle::eps(p, 1.0)) *
                          oracle::g_power(1.0, 1.5, oracle::shell_dot(k, p, 1.0));
    CHECK(kernel_K(spec, k, p) == doctest::Approx(direct).epsilon(1e-13));
  }
}

TEST_CASE("chi diagonal decays along +x3") {
  const KernelSpec spec(1.0, 1.5);
  double prev = 1.0;
  for (double q : {1.0, 10.0, 100.0}) {
    const double d = kernel_Kchi(spec, Vec3(0, 0, q), Vec3(0, 0, q));
    CHECK(d < prev);
    CHECK(d == doctest::Approx(1.0 / (std::sqrt(1.0 + q * q) + q)).epsilon(1e-9));
    prev = d;
  }
}

TEST_CASE("positive definiteness on random point sets") {
  std::mt19937_64 rng(32);
  for (double r : {1.5, 2.0}) {
    const KernelSpec spec(1.0, r);
    for (int set = 0; set < 20; ++set) {
      std::vector<Vec3> pts;
      while (pts.size() < 50) {
        const Vec3 p = oracle::random_vec(rng, 3.0);
        if (p.norm() <= 3.0) pts.push_back(p);
      }
      const PsdReport k = psd_check([&](const Vec3& a, const Vec3& b) { return kernel_K(spec, a, b); }, pts);
      const PsdReport c =
          psd_check([&](const Vec3& a, const Vec3& b) { return kernel_Kchi_normalized(spec, a, b); }, pts);
      CHECK(k.accepted);
      CHECK(c.accepted);
      CHECK(k.lambda_min >= -1e-8 * k.trace);
      CHECK(c.lambda_min >= -1e-8 * c.trace);
    }
  }
}

TEST_CASE("repeated point gives a rank-one Gram matrix") {
  const KernelSpec spec(1.0, 1.5);
  const std::vector<Vec3> pts(6, Vec3(0.3, 0.1, -0.2));
  const PsdReport rep = psd_check([&](const Vec3& a, const Vec3& b) { return kernel_K(spec, a, b); }, pts);
  CHECK(std::abs(rep.lambda_min) <= 1e-12 * rep.trace);
  CHECK(rep.accepted);
}

TEST_CASE("the cosine kernel is not positive definite") {
  const KernelSpec spec = KernelSpec::cosine(1.0);
  std::mt19937_64 rng(33);
  std::vector<Vec3> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(oracle::random_vec(rng, 3.0));
  const PsdReport rep = psd_check(
      [&](const Vec3& a, const Vec3& b) { return 0.5 * (energy(a, 1.0) + energy(b, 1.0)) * spec(oracle::shell_dot(a, b, 1.0)); },
      pts);
  CHECK_FALSE(rep.accepted);
}

TEST_CASE("Halton points stay in the ball and depend on the seed") {
  const Vec3 c(0.5, 0, -1);
  const auto a = halton_ball(c, 2.0, 200, 0);
  const auto b = halton_ball(c, 2.0, 200, 0);
  const auto s = halton_ball(c, 2.0, 200, 9);
  CHECK(a.size() == 200);
  for (const Vec3& p : a) CHECK((p - c).norm() <= 2.0);
  CHECK(a == b);
  CHECK(a != s);
}

TEST_CASE("Nystrom factor reproduces the normalized kernel") {
  const KernelSpec spec(1.0, 1.5);
  const std::vector<Vec3> anchors = halton_ball(Vec3::Zero(), 2.0, 512, 0);
  const NystromFactor f = nystrom_factor(spec, anchors);
  CHECK(f.rank() == 512);
  const Eigen::MatrixXd v = f.rkhs_vectors(anchors);
  for (Eigen::Index j = 0; j < v.cols(); ++j) CHECK(std::abs(v.col(j).norm() - 1.0) < 1e-8);
  double on_anchor = 0.0;
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 40; ++j) {
      on_anchor = std::max(on_anchor, std::abs(v.col(i).dot(v.col(j)) - kernel_Kchi_normalized(spec, anchors[i], anchors[j])));
    }
  }
  CHECK(on_anchor <= 1e-6);

  std::mt19937_64 rng(34);
  double off_anchor = 0.0;
  for (int i = 0; i < 200; ++i) {
    Vec3 k = oracle::random_vec(rng, 2.0), p = oracle::random_vec(rng, 2.0);
    if (k.norm() > 2.0 || p.norm() > 2.0) continue;
    off_anchor = std::max(off_anchor, std::abs(rkhs_vector(f, k).dot(rkhs_vector(f, p)) - kernel_Kchi_normalized(spec, k, p)));
  }
  CHECK(off_anchor <= 1e-3);
}

TEST_CASE("Nystrom reports a kernel that is not positive definite") {
  std::vector<Vec3> anchors = halton_ball(Vec3::Zero(), 3.0, 60, 0);
  CHECK_THROWS_AS(NystromFactor(KernelSpec::cosine(1.0), anchors), KernelNotPsd);
}
