#include "achronal/minkowski.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace achronal {

namespace {

const std::array<Eigen::Matrix2cd, 4>& pauli() {
  static const std::array<Eigen::Matrix2cd, 4> s = [] {
    const Complex i{0.0, 1.0};
    std::array<Eigen::Matrix2cd, 4> out;
    out[0] << 1, 0, 0, 1;
    out[1] << 0, 1, 1, 0;
    out[2] << 0, -i, i, 0;
    out[3] << 1, 0, 0, -1;
    return out;
  }();
  return s;
}

void require_unit(const Vec3& v, const char* what) {
  if (std::abs(v.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(what) + " must be a unit vector, |v| = " + std::to_string(v.norm()));
  }
}

}  // namespace

double FourVector::operator[](int mu) const {
  switch (mu) {
    case 0: return x0;
    case 1: return x1;
    case 2: return x2;
    case 3: return x3;
    default: throw std::out_of_range("FourVector index " + std::to_string(mu));
  }
}

double minkowski_product(const FourVector& a, const FourVector& b) {
  return a.x0 * b.x0 - a.x1 * b.x1 - a.x2 * b.x2 - a.x3 * b.x3;
}

SpinorMatrix::SpinorMatrix() : m_(Eigen::Matrix2cd::Identity()) {}

SpinorMatrix::SpinorMatrix(const Eigen::Matrix2cd& m) : m_(m) {
  const Complex det = m_.determinant();
  if (std::abs(det - Complex{1.0, 0.0}) > kDeterminantTolerance) {
    throw std::invalid_argument("SpinorMatrix: determinant " + std::to_string(det.real()) + "+" +
                                std::to_string(det.imag()) + "i is not 1");
  }
}

SpinorMatrix::SpinorMatrix(Complex a, Complex b, Complex c, Complex d)
    : SpinorMatrix((Eigen::Matrix2cd() << a, b, c, d).finished()) {}

SpinorMatrix SpinorMatrix::inverse() const {
  // det = 1, so the adjugate is the inverse.
  Eigen::Matrix2cd inv;
  inv << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
  return SpinorMatrix(inv, Unchecked{});
}

SpinorMatrix SpinorMatrix::operator*(const SpinorMatrix& o) const {
  return SpinorMatrix(m_ * o.m_, Unchecked{});
}

SpinorMatrix SpinorMatrix::operator-() const { return SpinorMatrix(-m_, Unchecked{}); }

Mat4 covering_map(const SpinorMatrix& a) {
  const auto& s = pauli();
  const Eigen::Matrix2cd& A = a.matrix();
  const Eigen::Matrix2cd Ad = A.adjoint();
  Mat4 lambda;
  for (int nu = 0; nu < 4; ++nu) {
    const Eigen::Matrix2cd image = A * s[nu] * Ad;
    for (int mu = 0; mu < 4; ++mu) {
      // sigma_mu are Hermitian and trace-orthogonal: tr(s_mu s_nu) = 2 delta.
      lambda(mu, nu) = 0.5 * (s[mu] * image).trace().real();
    }
  }
  return lambda;
}

FourVector lorentz_act(const SpinorMatrix& a, const FourVector& x) {
  return FourVector::from_vector(covering_map(a) * x.as_vector());
}

Vec3 lorentz_act_on_shell(const SpinorMatrix& a, const Vec3& p, double mass) {
  const Mat4 l = covering_map(a);
  const double e = energy(p, mass);
  return l.block<3, 1>(1, 0) * e + l.block<3, 3>(1, 1) * p;
}

FourVector act(const PoincareElement& g, const FourVector& x) {
  return g.translation + lorentz_act(g.spinor, x);
}

PoincareElement compose(const PoincareElement& g, const PoincareElement& h) {
  return {g.translation + lorentz_act(g.spinor, h.translation), g.spinor * h.spinor};
}

PoincareElement inverse(const PoincareElement& g) {
  const SpinorMatrix inv = g.spinor.inverse();
  return {-lorentz_act(inv, g.translation), inv};
}

SpinorMatrix boost(const Vec3& direction, double rapidity) {
  require_unit(direction, "boost direction");
  const auto& s = pauli();
  const Eigen::Matrix2cd es = direction[0] * s[1] + direction[1] * s[2] + direction[2] * s[3];
  // (e.sigma)^2 = I
  const Eigen::Matrix2cd m = std::cosh(0.5 * rapidity) * s[0] + std::sinh(0.5 * rapidity) * es;
  return SpinorMatrix(m);
}

SpinorMatrix rotation(const Vec3& axis, double angle) {
  require_unit(axis, "rotation axis");
  const auto& s = pauli();
  const Complex i{0.0, 1.0};
  const Eigen::Matrix2cd ns = axis[0] * s[1] + axis[1] * s[2] + axis[2] * s[3];
  const Eigen::Matrix2cd m = std::cos(0.5 * angle) * s[0] - i * std::sin(0.5 * angle) * ns;
  return SpinorMatrix(m);
}

double energy(const Vec3& p, double mass) {
  if (!(mass > 0.0)) {
    throw std::invalid_argument("mass must be positive");
  }
  return std::sqrt(mass * mass + p.squaredNorm());
}

FourVector on_shell(const Vec3& p, double mass) { return FourVector(energy(p, mass), p); }

}  // namespace achronal
