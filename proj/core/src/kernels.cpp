#include "achronal/kernels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <random>
#include <string>

namespace achronal {

namespace {

double dot_on_shell(const Vec3& k, const Vec3& p, double m) {
  return std::sqrt(m * m + k.squaredNorm()) * std::sqrt(m * m + p.squaredNorm()) - k.dot(p);
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double x = 0.0;
  while (i > 0) {
    x += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return x;
}

}  // namespace

KernelSpec::KernelSpec(double m, double r_, KernelFamily f) : mass(m), r(r_), family(f) {
  if (!(m > 0.0)) throw std::invalid_argument("KernelSpec: mass must be positive");
  if (f == KernelFamily::power && !(r_ >= 1.5)) {
    throw std::invalid_argument("KernelSpec: r must be >= 3/2, got " + std::to_string(r_));
  }
}

double KernelSpec::cos_eval(double t) const { return std::cos(t / (mass * mass)); }

double g_eval(const KernelSpec& spec, double t) {
  const double m2 = spec.mass * spec.mass;
  if (t < m2 * (1.0 - 1e-12)) {
    throw std::domain_error("g_eval: t = " + std::to_string(t) + " is below m^2");
  }
  return spec(t);
}

double kernel_K(const KernelSpec& spec, const Vec3& k, const Vec3& p) {
  const double m = spec.mass;
  const double ek = energy(k, m);
  const double ep = energy(p, m);
  return 0.5 * (ek + ep) * spec(ek * ep - k.dot(p));
}

double kernel_Kchi(const KernelSpec& spec, const Vec3& k, const Vec3& p) {
  const double m = spec.mass;
  const double ek = energy(k, m);
  const double ep = energy(p, m);
  return 0.5 * ((ek - k[2]) + (ep - p[2])) * spec(ek * ep - k.dot(p));
}

double kernel_Kchi_normalized(const KernelSpec& spec, const Vec3& k, const Vec3& p) {
  const double m = spec.mass;
  const double nk = energy(k, m) - k[2];
  const double np = energy(p, m) - p[2];
  return 0.5 * (nk + np) / std::sqrt(nk * np) * spec(dot_on_shell(k, p, m));
}

PsdReport psd_check(const KernelFunction& kernel, const std::vector<Vec3>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      gram(i, j) = kernel(points[i], points[j]);
      gram(j, i) = gram(i, j);
    }
  }
  PsdReport out;
  out.trace = gram.trace();
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  out.lambda_min = eig.eigenvalues().minCoeff();
  out.accepted = out.lambda_min >= -1e-8 * out.trace;
  return out;
}

std::vector<Vec3> halton_ball(const Vec3& center, double radius, std::size_t count, std::uint64_t seed) {
  Vec3 shift = Vec3::Zero();
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    shift = Vec3(u(rng), u(rng), u(rng));
  }
  std::vector<Vec3> out;
  out.reserve(count);
  for (std::uint64_t i = 1; out.size() < count; ++i) {
    Vec3 h(radical_inverse(i, 2), radical_inverse(i, 3), radical_inverse(i, 5));
    h += shift;
    for (int d = 0; d < 3; ++d) h[d] -= std::floor(h[d]);
    const Vec3 x = 2.0 * h - Vec3::Ones();
    if (x.squaredNorm() <= 1.0) out.push_back(center + radius * x);
  }
  return out;
}

NystromFactor::NystromFactor(const KernelSpec& spec, std::vector<Vec3> anchors)
    : spec_(spec), anchors_(std::move(anchors)) {
  const auto m = static_cast<Eigen::Index>(anchors_.size());
  if (m == 0) throw std::invalid_argument("nystrom_factor: no anchors");
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      gram(i, j) = kernel_Kchi_normalized(spec_, anchors_[i], anchors_[j]);
      gram(j, i) = gram(i, j);
    }
  }
  const double trace = gram.trace();
  for (double rel = 1e-12; rel <= 1e-6 * (1.0 + 1e-9); rel *= 10.0) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += rel * trace;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success && (llt.matrixLLT().diagonal().array() > 0.0).all()) {
      l_ = llt.matrixL();
      jitter_ = rel * trace;
      return;
    }
  }
  throw KernelNotPsd("nystrom_factor: Cholesky failed at jitter 1e-6 * trace; kernel is not PSD on the anchors");
}

Eigen::VectorXd NystromFactor::rkhs_vector(const Vec3& p) const {
  const auto m = static_cast<Eigen::Index>(anchors_.size());
  Eigen::VectorXd col(m);
  for (Eigen::Index j = 0; j < m; ++j) col[j] = kernel_Kchi_normalized(spec_, anchors_[j], p);
  l_.triangularView<Eigen::Lower>().solveInPlace(col);
  return col;
}

Eigen::MatrixXd NystromFactor::rkhs_vectors(const std::vector<Vec3>& points) const {
  const auto m = static_cast<Eigen::Index>(anchors_.size());
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd cols(m, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) cols(j, i) = kernel_Kchi_normalized(spec_, anchors_[j], points[i]);
  }
  l_.triangularView<Eigen::Lower>().solveInPlace(cols);
  return cols;
}

NystromFactor nystrom_factor(const KernelSpec& spec, const std::vector<Vec3>& anchors) {
  return NystromFactor(spec, anchors);
}

Eigen::VectorXd rkhs_vector(const NystromFactor& factor, const Vec3& p) { return factor.rkhs_vector(p); }

}  // namespace achronal
