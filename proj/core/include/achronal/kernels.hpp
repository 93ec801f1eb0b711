#pragma once

#include "achronal/minkowski.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace achronal {

enum class KernelFamily {
  /// g_r(t) = (2m^2)^r (m^2 + t)^-r
  power,
  /// g(t) = cos(t / m^2); not positive definite, kept for negative tests
  cosine,
};

struct KernelSpec {
  double mass = 1.0;
  double r = 1.5;
  KernelFamily family = KernelFamily::power;

  /// Validates m > 0 and r >= 3/2 for the power family.
  KernelSpec(double m = 1.0, double r_ = 1.5, KernelFamily f = KernelFamily::power);
  static KernelSpec cosine(double m) { return KernelSpec(m, 1.5, KernelFamily::cosine); }

  /// g at t = k.p without the range check; t is clamped to m^2 from below.
  double operator()(double t) const {
    const double m2 = mass * mass;
    if (t < m2) t = m2;
    if (family == KernelFamily::cosine) return cos_eval(t);
    const double x = 2.0 * m2 / (m2 + t);
    if (r == 1.5) return x * std::sqrt(x);
    if (r == 2.0) return x * x;
    return std::pow(x, r);
  }

 private:
  double cos_eval(double t) const;
};

/// g(t); rejects t < m^2 (beyond a relative rounding slack of 1e-12).
double g_eval(const KernelSpec& spec, double t);

/// 1/2 (eps(k) + eps(p)) g(k.p)
double kernel_K(const KernelSpec& spec, const Vec3& k, const Vec3& p);

/// 1/2 (eps(k) - k3 + eps(p) - p3) g(k.p)
double kernel_Kchi(const KernelSpec& spec, const Vec3& k, const Vec3& p);

/// K_chi(k, p) / sqrt((eps(k) - k3)(eps(p) - p3)); unit diagonal.
double kernel_Kchi_normalized(const KernelSpec& spec, const Vec3& k, const Vec3& p);

using KernelFunction = std::function<double(const Vec3&, const Vec3&)>;

struct PsdReport {
  double lambda_min = 0.0;
  double trace = 0.0;
  /// lambda_min >= -1e-8 * trace
  bool accepted = false;
};

/// Smallest eigenvalue of the Gram matrix of `kernel` on `points`.
PsdReport psd_check(const KernelFunction& kernel, const std::vector<Vec3>& points);

/// Scrambled Halton points inside the ball |p - center| <= radius. The seed
/// selects a random Cranley-Patterson shift; seed 0 leaves the sequence as is.
std::vector<Vec3> halton_ball(const Vec3& center, double radius, std::size_t count, std::uint64_t seed);

class KernelNotPsd : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite-rank realization of the normalized K_chi: Gram on anchors = L L^T,
/// v(p) = L^-1 (normalized kernel column at p).
class NystromFactor {
 public:
  NystromFactor(const KernelSpec& spec, std::vector<Vec3> anchors);

  const KernelSpec& spec() const { return spec_; }
  const std::vector<Vec3>& anchors() const { return anchors_; }
  std::size_t rank() const { return anchors_.size(); }
  const Eigen::MatrixXd& factor() const { return l_; }
  double jitter() const { return jitter_; }

  Eigen::VectorXd rkhs_vector(const Vec3& p) const;
  /// Columns v(p_i).
  Eigen::MatrixXd rkhs_vectors(const std::vector<Vec3>& points) const;

 private:
  KernelSpec spec_;
  std::vector<Vec3> anchors_;
  Eigen::MatrixXd l_;
  double jitter_ = 0.0;
};

NystromFactor nystrom_factor(const KernelSpec& spec, const std::vector<Vec3>& anchors);
Eigen::VectorXd rkhs_vector(const NystromFactor& factor, const Vec3& p);

}  // namespace achronal
