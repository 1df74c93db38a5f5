#include <cmath>

#include "dimers/simd.hpp"

namespace dimers::simd {

namespace {

void laurent_row_scalar(const std::complex<double>* coef, int ncoef, int shift, const double* wre,
                        const double* wim, double* ore, double* oim, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double xr = wre[i], xi = wim[i];
    double ar = 0.0, ai = 0.0;
    for (int t = ncoef - 1; t >= 0; --t) {
      double nr = ar * xr - ai * xi + coef[t].real();
      double ni = ar * xi + ai * xr + coef[t].imag();
      ar = nr;
      ai = ni;
    }
    // Multiply by w^shift.
    double pr = xr, pi = xi;
    int k = shift;
    if (k < 0) {
      double d = xr * xr + xi * xi;
      pr = xr / d;
      pi = -xi / d;
      k = -k;
    }
    for (int j = 0; j < k; ++j) {
      double nr = ar * pr - ai * pi;
      double ni = ar * pi + ai * pr;
      ar = nr;
      ai = ni;
    }
    ore[i] = ar;
    oim[i] = ai;
  }
}

void cdiv_scalar(const double* are, const double* aim, const double* bre, const double* bim, double* ore,
                 double* oim, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double d = bre[i] * bre[i] + bim[i] * bim[i];
    double r = (are[i] * bre[i] + aim[i] * bim[i]) / d;
    double m = (aim[i] * bre[i] - are[i] * bim[i]) / d;
    ore[i] = r;
    oim[i] = m;
  }
}

void axpy_neg_scalar(double s, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] -= s * x[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) s[l] += a[i + l] * b[i + l];
  for (int l = 0; i < n; ++i, ++l) s[l] += a[i] * b[i];
  return (s[0] + s[2]) + (s[1] + s[3]);
}

double sum_log_abs2_scalar(const double* re, const double* im, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::log(re[i] * re[i] + im[i] * im[i]);
  return s;
}

}  // namespace

const Kernels& kernels_scalar() {
  static const Kernels k{laurent_row_scalar, cdiv_scalar, axpy_neg_scalar, dot_scalar, sum_log_abs2_scalar};
  return k;
}

}  // namespace dimers::simd
