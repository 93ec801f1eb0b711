#pragma once

#include <Eigen/Dense>

#include <complex>

namespace achronal {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat4 = Eigen::Matrix4d;

/// Event or momentum in Minkowski space, natural units (c = 1).
struct FourVector {
  double x0 = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  FourVector() = default;
  FourVector(double t, double a, double b, double c) : x0(t), x1(a), x2(b), x3(c) {}
  FourVector(double t, const Vec3& x) : x0(t), x1(x[0]), x2(x[1]), x3(x[2]) {}

  /// Spatial projection (x1, x2, x3).
  Vec3 spatial() const { return {x1, x2, x3}; }
  Eigen::Vector4d as_vector() const { return {x0, x1, x2, x3}; }
  static FourVector from_vector(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

  double operator[](int mu) const;

  FourVector operator+(const FourVector& o) const { return {x0 + o.x0, x1 + o.x1, x2 + o.x2, x3 + o.x3}; }
  FourVector operator-(const FourVector& o) const { return {x0 - o.x0, x1 - o.x1, x2 - o.x2, x3 - o.x3}; }
  FourVector operator-() const { return {-x0, -x1, -x2, -x3}; }
  FourVector operator*(double s) const { return {s * x0, s * x1, s * x2, s * x3}; }
};

/// a0 b0 - a.b
double minkowski_product(const FourVector& a, const FourVector& b);

/// Element of SL(2,C). Construction rejects |det - 1| > 1e-9.
class SpinorMatrix {
 public:
  static constexpr double kDeterminantTolerance = 1e-9;

  SpinorMatrix();
  explicit SpinorMatrix(const Eigen::Matrix2cd& m);
  SpinorMatrix(Complex a, Complex b, Complex c, Complex d);

  static SpinorMatrix identity() { return SpinorMatrix(); }

  const Eigen::Matrix2cd& matrix() const { return m_; }
  Complex determinant() const { return m_.determinant(); }
  SpinorMatrix inverse() const;
  SpinorMatrix operator*(const SpinorMatrix& o) const;
  SpinorMatrix operator-() const;

 private:
  struct Unchecked {};
  SpinorMatrix(const Eigen::Matrix2cd& m, Unchecked) : m_(m) {}

  Eigen::Matrix2cd m_;
};

/// Lambda(A): the proper orthochronous Lorentz matrix covered by A, via
/// X -> A X A^dagger on X = x0 I + x.sigma.
Mat4 covering_map(const SpinorMatrix& a);

/// Lambda(A) x
FourVector lorentz_act(const SpinorMatrix& a, const FourVector& x);

/// The momentum p' with (eps(p'), p') = Lambda(A)(eps(p), p).
Vec3 lorentz_act_on_shell(const SpinorMatrix& a, const Vec3& p, double mass);

/// g = (a, A) in ISL(2,C), acting by x -> a + Lambda(A) x.
struct PoincareElement {
  FourVector translation;
  SpinorMatrix spinor;

  static PoincareElement identity() { return {}; }
  static PoincareElement pure_translation(const FourVector& a) { return {a, SpinorMatrix::identity()}; }
  static PoincareElement pure_lorentz(const SpinorMatrix& a) { return {FourVector{}, a}; }
};

FourVector act(const PoincareElement& g, const FourVector& x);

/// (a, A)(a', A') = (a + A.a', A A')
PoincareElement compose(const PoincareElement& g, const PoincareElement& h);

/// (a, A)^-1 = (-A^-1.a, A^-1)
PoincareElement inverse(const PoincareElement& g);

/// exp(rho/2 e.sigma); e must be a unit vector (tolerance 1e-9).
SpinorMatrix boost(const Vec3& direction, double rapidity);

/// exp(-i angle/2 n.sigma); rotates by `angle` about the unit axis n.
SpinorMatrix rotation(const Vec3& axis, double angle);

/// sqrt(m^2 + p^2); rejects m <= 0.
double energy(const Vec3& p, double mass);

/// (eps(p), p)
FourVector on_shell(const Vec3& p, double mass);

}  // namespace achronal
