#pragma once
// Independent reference values used by the tests. Nothing here calls the library.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

// Complete elliptic integrals of parameter m by the arithmetic-geometric mean.
inline double agm_K(double m) {
  double a = 1.0, b = std::sqrt(1.0 - m);
  for (int i = 0; i < 60 && std::abs(a - b) > 1e-17 * a; ++i) {
    double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (2.0 * a);
}

inline double agm_E(double m) {
  double a = 1.0, b = std::sqrt(1.0 - m), c2sum = 0.5 * m, pow2 = 0.5;
  for (int i = 0; i < 60; ++i) {
    double an = 0.5 * (a + b), cn = 0.5 * (a - b);
    b = std::sqrt(a * b);
    a = an;
    pow2 *= 2.0;
    c2sum += pow2 * cn * cn;
    if (std::abs(cn) < 1e-18) break;
  }
  return agm_K(m) * (1.0 - c2sum);
}

// Square-octagon free energy as a function of the log connector weight a:
//   F(a) = log(4 + e^a) - sum_k (1/2k) C(2k,k)^2 s^{2k},  s = e^{a/2} / (4 + e^a).
// At a = 0, s^2 = 1/25, d log s/da = 3/10 and d^2 log s/da^2 = -4/25.
struct SquareOctagonSeries {
  double first = 0.0;   // dF/da at 0: connector edge probability
  double second = 0.0;  // d^2F/da^2 at 0: connector white-noise amplitude
  double K = 0.0;       // (pi/2) sum_k C(2k,k)^2 25^{-k} = K(m = 16/25)
};

inline SquareOctagonSeries square_octagon_series() {
  SquareOctagonSeries r;
  long double c = 1.0L, x = 1.0L, S0 = 0.0L, S1 = 0.0L, S2 = 0.0L;
  for (int k = 0; k < 400; ++k) {
    if (k > 0) {
      c *= (2.0L * k - 1.0L) * 2.0L / k;  // C(2k,k)
      x /= 25.0L;
    }
    long double t = c * c * x;
    S0 += t;
    if (k > 0) {
      S1 += t;
      S2 += t * (0.18L * k - 0.16L);
    }
  }
  r.first = double(0.2L - 0.3L * S1);
  r.second = double(0.16L - S2);
  r.K = double(0.5L * 3.14159265358979323846264338L * S0);
  return r;
}

// Z2 edge-weight closed forms: area of the (a,b,c,d) quadrilateral and the
// circumradius squared.
inline double z2_area(double a, double b, double c, double d) {
  return 0.25 * std::sqrt((-a + b + c + d) * (a - b + c + d) * (a + b - c + d) * (a + b + c - d));
}
inline double z2_R2(double a, double b, double c, double d) {
  double p = (-a + b + c + d) * (a - b + c + d) * (a + b - c + d) * (a + b + c - d);
  return (a * b + c * d) * (a * c + b * d) * (a * d + b * c) / p;
}
inline double z2_amplitude(double a, double b, double c, double d) {
  return a * b * c * d / (8.0 * kPi * z2_R2(a, b, c, d) * z2_area(a, b, c, d));
}

// Midpoint-rule Fourier coefficient of 1 / P on the unit torus for the uniform
// Z2 polynomial 1 + z + 1/w - z/w; accurate to O(1/N^2) near the two roots.
inline double z2_uniform_inverse(int x, int y, int N) {
  double s = 0.0;
  for (int i = 0; i < N; ++i) {
    std::complex<double> z = std::polar(1.0, 2.0 * kPi * (i + 0.5) / N);
    for (int j = 0; j < N; ++j) {
      std::complex<double> w = std::polar(1.0, 2.0 * kPi * (j + 0.5) / N);
      std::complex<double> P = 1.0 + z + 1.0 / w - z / w;
      s += (std::pow(z, -y) * std::pow(w, x) / P).real();
    }
  }
  return s / (double(N) * N);
}

// Far-field pairing of two disjoint radial bumps of masses m1, m2 at separation d
// (complex), with directions v1, v2: (1/pi) m1 m2 v1^T Hess(G) v2 evaluated
// with G = -(1/2 pi) log|u - v|.
inline double dipole_far_field(double m1, double m2, std::complex<double> d, std::complex<double> v1,
                               std::complex<double> v2) {
  double r2 = std::norm(d);
  double a_dot_b = (std::conj(v1) * v2).real();
  double a_d = (std::conj(v1) * d).real(), b_d = (std::conj(v2) * d).real();
  double hess_log = (a_dot_b * r2 - 2.0 * a_d * b_d) / (r2 * r2);  // v1^T Hess(log|.|) v2
  // d_u d_v G(u - v) = (1/2 pi) Hess(log|.|) at u - v
  return (1.0 / kPi) * m1 * m2 * (1.0 / (2.0 * kPi)) * hess_log;
}

// Cubic B-spline integral of the square: int B(t)^2 dt = 151/315.
constexpr double kBsplineSquare = 151.0 / 315.0;

}  // namespace oracle
