#include <immintrin.h>

#include <cmath>

#include "dimers/simd.hpp"

namespace dimers::simd {

namespace {

inline void cmul(__m256d ar, __m256d ai, __m256d br, __m256d bi, __m256d& r, __m256d& i) {
  r = _mm256_fmsub_pd(ar, br, _mm256_mul_pd(ai, bi));
  i = _mm256_fmadd_pd(ar, bi, _mm256_mul_pd(ai, br));
}

void laurent_row_avx2(const std::complex<double>* coef, int ncoef, int shift, const double* wre, const double* wim,
                      double* ore, double* oim, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xr = _mm256_loadu_pd(wre + i), xi = _mm256_loadu_pd(wim + i);
    __m256d ar = _mm256_setzero_pd(), ai = _mm256_setzero_pd();
    for (int t = ncoef - 1; t >= 0; --t) {
      __m256d nr, ni;
      cmul(ar, ai, xr, xi, nr, ni);
      ar = _mm256_add_pd(nr, _mm256_set1_pd(coef[t].real()));
      ai = _mm256_add_pd(ni, _mm256_set1_pd(coef[t].imag()));
    }
    __m256d pr = xr, pi = xi;
    int k = shift;
    if (k < 0) {
      __m256d d = _mm256_fmadd_pd(xr, xr, _mm256_mul_pd(xi, xi));
      pr = _mm256_div_pd(xr, d);
      pi = _mm256_div_pd(_mm256_sub_pd(_mm256_setzero_pd(), xi), d);
      k = -k;
    }
    for (int j = 0; j < k; ++j) {
      __m256d nr, ni;
      cmul(ar, ai, pr, pi, nr, ni);
      ar = nr;
      ai = ni;
    }
    _mm256_storeu_pd(ore + i, ar);
    _mm256_storeu_pd(oim + i, ai);
  }
  if (i < n) kernels_scalar().laurent_row(coef, ncoef, shift, wre + i, wim + i, ore + i, oim + i, n - i);
}

void cdiv_avx2(const double* are, const double* aim, const double* bre, const double* bim, double* ore, double* oim,
               std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ar = _mm256_loadu_pd(are + i), ai = _mm256_loadu_pd(aim + i);
    __m256d br = _mm256_loadu_pd(bre + i), bi = _mm256_loadu_pd(bim + i);
    __m256d d = _mm256_fmadd_pd(br, br, _mm256_mul_pd(bi, bi));
    __m256d r = _mm256_fmadd_pd(ar, br, _mm256_mul_pd(ai, bi));
    __m256d m = _mm256_fmsub_pd(ai, br, _mm256_mul_pd(ar, bi));
    _mm256_storeu_pd(ore + i, _mm256_div_pd(r, d));
    _mm256_storeu_pd(oim + i, _mm256_div_pd(m, d));
  }
  if (i < n) kernels_scalar().cdiv(are + i, aim + i, bre + i, bim + i, ore + i, oim + i, n - i);
}

void axpy_neg_avx2(double s, const double* x, double* y, std::size_t n) {
  __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y + i), y1 = _mm256_loadu_pd(y + i + 4);
    y0 = _mm256_fnmadd_pd(vs, _mm256_loadu_pd(x + i), y0);
    y1 = _mm256_fnmadd_pd(vs, _mm256_loadu_pd(x + i + 4), y1);
    _mm256_storeu_pd(y + i, y0);
    _mm256_storeu_pd(y + i + 4, y1);
  }
  for (; i < n; ++i) y[i] -= s * x[i];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  for (int l = 0; i < n; ++i, ++l) s[l] += a[i] * b[i];
  return (s[0] + s[2]) + (s[1] + s[3]);
}

double sum_log_abs2_avx2(const double* re, const double* im, std::size_t n) {
  // log has no AVX2 intrinsic; vectorize the modulus and keep log scalar.
  alignas(32) double m[4];
  double s = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_loadu_pd(re + i), q = _mm256_loadu_pd(im + i);
    _mm256_store_pd(m, _mm256_fmadd_pd(r, r, _mm256_mul_pd(q, q)));
    s += std::log(m[0]) + std::log(m[1]) + std::log(m[2]) + std::log(m[3]);
  }
  for (; i < n; ++i) s += std::log(re[i] * re[i] + im[i] * im[i]);
  return s;
}

}  // namespace

const Kernels& kernels_avx2() {
  static const Kernels k{laurent_row_avx2, cdiv_avx2, axpy_neg_avx2, dot_avx2, sum_log_abs2_avx2};
  return k;
}

}  // namespace dimers::simd
