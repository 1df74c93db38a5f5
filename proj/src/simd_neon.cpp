#include <arm_neon.h>

#include <cmath>

#include "dimers/simd.hpp"

namespace dimers::simd {

namespace {

void laurent_row_neon(const std::complex<double>* coef, int ncoef, int shift, const double* wre, const double* wim,
                      double* ore, double* oim, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t xr = vld1q_f64(wre + i), xi = vld1q_f64(wim + i);
    float64x2_t ar = vdupq_n_f64(0.0), ai = vdupq_n_f64(0.0);
    for (int t = ncoef - 1; t >= 0; --t) {
      float64x2_t nr = vfmsq_f64(vmulq_f64(ar, xr), ai, xi);
      float64x2_t ni = vfmaq_f64(vmulq_f64(ar, xi), ai, xr);
      ar = vaddq_f64(nr, vdupq_n_f64(coef[t].real()));
      ai = vaddq_f64(ni, vdupq_n_f64(coef[t].imag()));
    }
    float64x2_t pr = xr, pi = xi;
    int k = shift;
    if (k < 0) {
      float64x2_t d = vfmaq_f64(vmulq_f64(xr, xr), xi, xi);
      pr = vdivq_f64(xr, d);
      pi = vnegq_f64(vdivq_f64(xi, d));
      k = -k;
    }
    for (int j = 0; j < k; ++j) {
      float64x2_t nr = vfmsq_f64(vmulq_f64(ar, pr), ai, pi);
      float64x2_t ni = vfmaq_f64(vmulq_f64(ar, pi), ai, pr);
      ar = nr;
      ai = ni;
    }
    vst1q_f64(ore + i, ar);
    vst1q_f64(oim + i, ai);
  }
  if (i < n) kernels_scalar().laurent_row(coef, ncoef, shift, wre + i, wim + i, ore + i, oim + i, n - i);
}

void cdiv_neon(const double* are, const double* aim, const double* bre, const double* bim, double* ore, double* oim,
               std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t ar = vld1q_f64(are + i), ai = vld1q_f64(aim + i);
    float64x2_t br = vld1q_f64(bre + i), bi = vld1q_f64(bim + i);
    float64x2_t d = vfmaq_f64(vmulq_f64(br, br), bi, bi);
    float64x2_t r = vfmaq_f64(vmulq_f64(ar, br), ai, bi);
    float64x2_t m = vfmsq_f64(vmulq_f64(ai, br), ar, bi);
    vst1q_f64(ore + i, vdivq_f64(r, d));
    vst1q_f64(oim + i, vdivq_f64(m, d));
  }
  if (i < n) kernels_scalar().cdiv(are + i, aim + i, bre + i, bim + i, ore + i, oim + i, n - i);
}

void axpy_neg_neon(double s, const double* x, double* y, std::size_t n) {
  float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmsq_f64(vld1q_f64(y + i), vs, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] -= s * x[i];
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t s01 = vdupq_n_f64(0.0), s23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s01 = vfmaq_f64(s01, vld1q_f64(a + i), vld1q_f64(b + i));
    s23 = vfmaq_f64(s23, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s[4] = {vgetq_lane_f64(s01, 0), vgetq_lane_f64(s01, 1), vgetq_lane_f64(s23, 0), vgetq_lane_f64(s23, 1)};
  for (int l = 0; i < n; ++i, ++l) s[l] += a[i] * b[i];
  return (s[0] + s[2]) + (s[1] + s[3]);
}

double sum_log_abs2_neon(const double* re, const double* im, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::log(re[i] * re[i] + im[i] * im[i]);
  return s;
}

}  // namespace

const Kernels& kernels_neon() {
  static const Kernels k{laurent_row_neon, cdiv_neon, axpy_neg_neon, dot_neon, sum_log_abs2_neon};
  return k;
}

}  // namespace dimers::simd
