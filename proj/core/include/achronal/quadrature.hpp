#pragma once

#include <vector>

namespace achronal {

struct Rule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]. Newton iteration on P_n; nodes
/// ascending, exact for polynomials of degree 2n - 1.
Rule1d gauss_legendre(int n, double a, double b);

}  // namespace achronal
