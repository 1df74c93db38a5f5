#pragma once

#include <vector>

namespace dimers {

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [a,b].
QuadRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

}  // namespace dimers
